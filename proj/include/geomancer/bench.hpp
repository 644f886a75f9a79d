#pragma once

// Synthetic throughput benchmark: a uniform POI layer and a uniform point
// dataset over a city-sized box, cast with a rotating mix of spells.

#include "geomancer/cast.hpp"

#include <array>
#include <chrono>
#include <random>
#include <sstream>
#include <string>

namespace geomancer {

struct BenchConfig {
    std::size_t points = 1000;
    std::size_t entries = 10000;
    std::size_t spells = 5;
    std::size_t parallelism = 1;
    std::uint64_t seed = 42;
};

struct BenchScenario {
    Catalog catalog;
    PointDataset dataset;
    SpellBook book;
};

inline constexpr std::array<std::string_view, 8> kBenchClasses{
    "restaurant", "school", "bank", "cafe", "supermarket", "bus_stop", "atm", "hotel"};

inline BenchScenario make_bench_scenario(const BenchConfig& config)
{
    constexpr double min_lon = 103.6, max_lon = 104.0, min_lat = 1.2, max_lat = 1.5;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> lon(min_lon, max_lon);
    std::uniform_real_distribution<double> lat(min_lat, max_lat);
    std::uniform_int_distribution<std::size_t> cls(0, kBenchClasses.size() - 1);

    ReferenceLayer pois{"pois", GeometryKind::point, {}};
    pois.entries.reserve(config.entries);
    for (std::size_t i = 0; i < config.entries; ++i) {
        const double x = lon(rng);
        const double y = lat(rng);
        pois.entries.push_back({Coordinate(x, y), Tags{{"fclass", std::string(kBenchClasses[cls(rng)])}}});
    }

    BenchScenario scenario;
    scenario.catalog.add(std::move(pois));
    scenario.catalog.seal();

    scenario.dataset.rows.reserve(config.points);
    for (std::size_t i = 0; i < config.points; ++i) {
        const double x = lon(rng);
        const double y = lat(rng);
        scenario.dataset.add(std::to_string(i), Coordinate(x, y));
    }

    for (std::size_t s = 0; s < config.spells; ++s) {
        const std::string tag(kBenchClasses[s % kBenchClasses.size()]);
        const std::string suffix = "_" + std::to_string(s);
        if (s % 2 == 0)
            scenario.book.add(distance_to_nearest(TagFilter::eq("fclass", tag), "pois", "dist_" + tag + suffix));
        else
            scenario.book.add(number_of(TagFilter::eq("fclass", tag), "pois", 1500.0, "num_" + tag + suffix));
    }
    return scenario;
}

struct BenchReport {
    BenchConfig config;
    std::size_t values = 0;
    double wall_seconds = 0.0;
    double rows_per_second = 0.0;
    CastStats stats;

    /// Single key=value line for scripts.
    std::string machine_line() const
    {
        std::ostringstream os;
        os << "bench points=" << config.points << " entries=" << config.entries << " spells=" << config.spells
           << " parallelism=" << config.parallelism << " values=" << values << " wall_s=" << wall_seconds
           << " rows_per_s=" << rows_per_second << " peak_candidates=" << stats.peak_candidates
           << " total_candidates=" << stats.total_candidates;
        return os.str();
    }

    std::string summary() const
    {
        std::ostringstream os;
        os << "Cast " << config.spells << " spells over " << config.points << " points against "
           << config.entries << " layer entries in " << wall_seconds << " s (" << rows_per_second
           << " rows/s, " << values << " feature values, peak " << stats.peak_candidates
           << " candidates per query)";
        return os.str();
    }
};

/// Times cast_all only; scenario generation is excluded.
inline BenchReport run_bench(const BenchConfig& config, FeatureMatrix* matrix_out = nullptr)
{
    const BenchScenario scenario = make_bench_scenario(config);
    BenchReport report;
    report.config = config;

    const auto start = std::chrono::steady_clock::now();
    FeatureMatrix matrix =
        cast_all(scenario.book, scenario.dataset, scenario.catalog, {config.parallelism}, &report.stats);
    const auto stop = std::chrono::steady_clock::now();

    report.wall_seconds = std::chrono::duration<double>(stop - start).count();
    for (const auto& f : matrix.features)
        report.values += f.values.size();
    report.rows_per_second =
        config.points == 0 || report.wall_seconds <= 0.0 ? 0.0 : static_cast<double>(config.points) / report.wall_seconds;
    if (matrix_out)
        *matrix_out = std::move(matrix);
    return report;
}

} // namespace geomancer
