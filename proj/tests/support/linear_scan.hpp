#pragma once

// Brute-force reference: every query scans every entry, with no index and no
// pruning. Distances come from the geo primitives directly.

#include "geomancer/cast.hpp"

#include <optional>
#include <vector>

namespace geomancer::oracle {

inline double scan_distance(Coordinate p, const LayerEntry& e)
{
    if (const auto* c = std::get_if<Coordinate>(&e.geometry))
        return haversine_m(p, *c);
    return point_polyline_distance_m(p, std::get<Polyline>(e.geometry));
}

inline std::optional<Hit> scan_nearest(std::span<const LayerEntry> entries, Coordinate p, double cap,
                                       const TagFilter& f)
{
    std::optional<Hit> best;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
        if (!eval_filter(f, entries[i].tags))
            continue;
        const double d = scan_distance(p, entries[i]);
        if (d > cap)
            continue;
        if (!best || d < best->distance_m)
            best = Hit{GeometryId{i}, d};
    }
    return best;
}

inline std::vector<Hit> scan_within(std::span<const LayerEntry> entries, Coordinate p, double r,
                                    const TagFilter& f)
{
    std::vector<Hit> hits;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
        if (!eval_filter(f, entries[i].tags))
            continue;
        const double d = scan_distance(p, entries[i]);
        if (d <= r)
            hits.push_back({GeometryId{i}, d});
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& a, const Hit& b) { return a.distance_m < b.distance_m; });
    return hits;
}

inline std::optional<double> scan_value(const Spell& spell, std::span<const LayerEntry> entries, Coordinate p)
{
    switch (spell.kind) {
    case SpellKind::distance_to_nearest: {
        auto hit = scan_nearest(entries, p, spell.radius_m, spell.filter);
        if (!hit)
            return std::nullopt;
        return hit->distance_m;
    }
    case SpellKind::number_of: return static_cast<double>(scan_within(entries, p, spell.radius_m, spell.filter).size());
    case SpellKind::length_of: {
        double total = 0.0;
        for (const auto& e : entries)
            if (eval_filter(spell.filter, e.tags))
                if (const auto* line = std::get_if<Polyline>(&e.geometry))
                    total += clipped_length_in_radius_m(*line, p, spell.radius_m);
        return total;
    }
    }
    return std::nullopt;
}

inline FeatureColumn scan_cast(const Spell& spell, const PointDataset& ds, std::span<const LayerEntry> entries)
{
    FeatureColumn col{spell.feature_name, spell.kind == SpellKind::number_of, {}};
    for (const auto& row : ds.rows)
        col.values.push_back(scan_value(spell, entries, row.coord));
    return col;
}

} // namespace geomancer::oracle
