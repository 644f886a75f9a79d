#pragma once

// Casting spells over point datasets.

#include "geomancer/catalog.hpp"
#include "geomancer/dataset.hpp"
#include "geomancer/spellbook.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <set>
#include <thread>
#include <variant>
#include <vector>

namespace geomancer {

struct CastOptions {
    /// Worker threads for row-level parallelism; output never depends on it.
    std::size_t parallelism = 1;
};

struct CastStats {
    std::size_t queries = 0;
    std::size_t total_candidates = 0;
    std::size_t peak_candidates = 0;

    void merge(const CastStats& o)
    {
        queries += o.queries;
        total_candidates += o.total_candidates;
        peak_candidates = std::max(peak_candidates, o.peak_candidates);
    }
};

namespace detail {

/// Runs body(begin, end, stats) over contiguous row ranges and merges stats.
template <class Body>
void for_row_ranges(std::size_t rows, std::size_t parallelism, CastStats* stats, Body&& body)
{
    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(rows, 1));
    std::vector<CastStats> local(workers);
    if (workers == 1) {
        body(std::size_t{0}, rows, local[0]);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> threads;
            threads.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                const std::size_t begin = rows * w / workers;
                const std::size_t end = rows * (w + 1) / workers;
                threads.emplace_back([&, w, begin, end] {
                    try {
                        body(begin, end, local[w]);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    if (stats)
        for (const auto& s : local)
            stats->merge(s);
}

inline void check_compatible(const Spell& spell, const CatalogLayer& layer)
{
    if (spell.kind == SpellKind::length_of && layer.kind != GeometryKind::polyline && !layer.index.empty())
        throw Error(ErrorKind::validation, "spell '" + spell.feature_name + "': LengthOf needs a polyline layer, '" +
                                               layer.name + "' holds " + std::string(to_string(layer.kind)) +
                                               " geometries");
}

} // namespace detail

/// One feature value per dataset row, in row order.
inline FeatureColumn cast(const Spell& spell, const PointDataset& ds, const Catalog& catalog,
                          const CastOptions& options = {}, CastStats* stats = nullptr)
{
    if (const auto problems = spell_problems(spell); !problems.empty())
        throw Error(ErrorKind::validation, "spell '" + spell.feature_name + "': " + problems.front());
    const CatalogLayer& layer = catalog.at(spell.layer);
    detail::check_compatible(spell, layer);

    FeatureColumn column{spell.feature_name, spell.kind == SpellKind::number_of, {}};
    column.values.resize(ds.size());
    const IndexedLayer& index = layer.index;

    detail::for_row_ranges(ds.size(), options.parallelism, stats,
                           [&](std::size_t begin, std::size_t end, CastStats& local) {
        for (std::size_t row = begin; row < end; ++row) {
            const Coordinate p = ds.rows[row].coord;
            QueryStats q;
            std::optional<double> value;
            switch (spell.kind) {
            case SpellKind::distance_to_nearest:
                if (auto hit = index.nearest(p, spell.radius_m, spell.filter, &q))
                    value = hit->distance_m;
                break;
            case SpellKind::number_of:
                value = static_cast<double>(index.within_radius(p, spell.radius_m, spell.filter, &q).size());
                break;
            case SpellKind::length_of: {
                double total = 0.0;
                for (const Hit& hit : index.within_radius(p, spell.radius_m, spell.filter, &q))
                    if (const auto* line = std::get_if<Polyline>(&index.entry(hit.id).geometry))
                        total += clipped_length_in_radius_m(*line, p, spell.radius_m);
                value = total;
                break;
            }
            }
            column.values[row] = value;
            ++local.queries;
            local.total_candidates += q.candidates;
            local.peak_candidates = std::max(local.peak_candidates, q.candidates);
        }
    });
    return column;
}

/// Casts every spell of `book`; column j is exactly cast(book.spells[j], ...).
inline FeatureMatrix cast_all(const SpellBook& book, const PointDataset& ds, const Catalog& catalog,
                              const CastOptions& options = {}, CastStats* stats = nullptr)
{
    if (const auto diags = validate(book); !diags.empty())
        throw Error(ErrorKind::validation, detail::join_diagnostics(diags));

    std::set<std::string, std::less<>> taken{"row_id", "lon", "lat"};
    taken.insert(ds.passthrough_columns.begin(), ds.passthrough_columns.end());
    std::vector<std::string> clashes;
    for (const auto& s : book.spells)
        if (taken.contains(s.feature_name))
            clashes.push_back(s.feature_name);
    if (!clashes.empty()) {
        std::string list;
        for (const auto& c : clashes)
            list += (list.empty() ? "" : ", ") + c;
        throw Error(ErrorKind::validation, "feature names collide with dataset columns: " + list);
    }

    // Resolve every layer before doing any work so a bad spell fails fast.
    for (const auto& s : book.spells)
        detail::check_compatible(s, catalog.at(s.layer));

    FeatureMatrix matrix{ds, {}};
    matrix.features.reserve(book.spells.size());
    for (const auto& s : book.spells)
        matrix.features.push_back(cast(s, ds, catalog, options, stats));
    return matrix;
}

} // namespace geomancer
