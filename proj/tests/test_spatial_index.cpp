#include "geomancer/spatial_index.hpp"

#include "support/generators.hpp"
#include "support/linear_scan.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace geomancer;
using namespace geomancer::oracle;

namespace {

void expect_same_hits(const std::vector<Hit>& got, const std::vector<Hit>& want)
{
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].id, want[i].id) << i;
        EXPECT_NEAR(got[i].distance_m, want[i].distance_m, 1e-6);
    }
}

} // namespace

TEST(IndexedLayer, EmptyLayerAnswersNothing)
{
    const auto layer = IndexedLayer::build({});
    EXPECT_TRUE(layer.empty());
    EXPECT_EQ(layer.height(), 0u);
    EXPECT_FALSE(layer.nearest(Coordinate(0, 0), 1e6, TagFilter::any()));
    EXPECT_TRUE(layer.within_radius(Coordinate(0, 0), 1e6, TagFilter::any()).empty());
}

TEST(IndexedLayer, SinglePointIsNearestFromAnywhere)
{
    const auto layer = IndexedLayer::build({{Coordinate(103.85, 1.29), {{"fclass", "mall"}}}});
    for (const Coordinate q : {Coordinate(0, 0), Coordinate(-120, 45), Coordinate(103.9, 1.3)}) {
        const auto hit = layer.nearest(q, 2.1e7, TagFilter::any());
        ASSERT_TRUE(hit);
        EXPECT_EQ(hit->id.value, 0u);
        EXPECT_EQ(hit->distance_m, haversine_m(q, Coordinate(103.85, 1.29)));
    }
}

TEST(IndexedLayer, CoincidentQueryReturnsZero)
{
    const auto layer = IndexedLayer::build({{Coordinate(1, 1), {{"fclass", "a"}}}, {Coordinate(2, 2), {{"fclass", "b"}}}});
    const auto hit = layer.nearest(Coordinate(2, 2), 1000, TagFilter::eq("fclass", "b"));
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->id.value, 1u);
    EXPECT_EQ(hit->distance_m, 0.0);
}

TEST(IndexedLayer, ZeroRadiusIsBoundaryInclusive)
{
    const auto layer = IndexedLayer::build({{Coordinate(5, 5), {}}, {Coordinate(5.001, 5), {}}});
    const auto hits = layer.within_radius(Coordinate(5, 5), 0.0, TagFilter::any());
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].id.value, 0u);
    EXPECT_EQ(hits[0].distance_m, 0.0);
    EXPECT_TRUE(layer.within_radius(Coordinate(6, 6), 100.0, TagFilter::any()).empty());
}

TEST(IndexedLayer, TiesGoToSmallestId)
{
    std::vector<LayerEntry> entries;
    for (int i = 0; i < 40; ++i)
        entries.push_back({Coordinate(10.01, 10), {}});
    entries.push_back({Coordinate(9.99, 10), {}});
    const auto layer = IndexedLayer::build(entries);
    const auto hit = layer.nearest(Coordinate(10, 10), 10'000, TagFilter::any());
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->id.value, 0u);
}

TEST(IndexedLayer, BuildsMultiLevelTree)
{
    Rng rng(1);
    const auto layer = IndexedLayer::build(random_entries(rng, {0, 0, 1, 1}, 10'000, GeometryKind::point));
    // 10000 / 16 = 625 leaves -> 40 -> 3 -> 1
    EXPECT_EQ(layer.height(), 4u);
}

TEST(IndexedLayer, RadiusQueriesMatchBruteForceOnTenThousandPoints)
{
    Rng rng(2024);
    const Region region{103.6, 1.2, 0.4, 0.3};
    const auto entries = random_entries(rng, region, 10'000, GeometryKind::point);
    const auto layer = IndexedLayer::build(entries);
    for (int q = 0; q < 100; ++q) {
        const Coordinate p = region.sample(rng);
        const TagFilter f = q % 2 ? TagFilter::any() : random_layer_filter(rng);
        expect_same_hits(layer.within_radius(p, 1500.0, f), scan_within(entries, p, 1500.0, f));
    }
}

TEST(IndexedLayer, NearestMatchesBruteForce)
{
    Rng rng(99);
    const Region region{-0.2, 51.4, 0.4, 0.3};
    const auto entries = random_entries(rng, region, 1000, GeometryKind::point);
    const auto layer = IndexedLayer::build(entries);
    for (int q = 0; q < 100; ++q) {
        const Coordinate p = region.sample(rng);
        const TagFilter f = random_layer_filter(rng);
        const auto got = layer.nearest(p, 10'000.0, f);
        const auto want = scan_nearest(entries, p, 10'000.0, f);
        ASSERT_EQ(got.has_value(), want.has_value());
        if (got) {
            EXPECT_EQ(got->id, want->id);
            EXPECT_NEAR(got->distance_m, want->distance_m, 1e-6);
        }
    }
}

TEST(IndexedLayer, PolylineQueriesMatchBruteForceAcrossRegions)
{
    Rng rng(404);
    for (int scenario = 0; scenario < 12; ++scenario) {
        const Region region = random_region(rng);
        const auto entries = random_entries(rng, region, 800, GeometryKind::polyline);
        const auto layer = IndexedLayer::build(entries);
        for (int q = 0; q < 40; ++q) {
            const Coordinate p = region.sample(rng);
            const TagFilter f = random_layer_filter(rng);
            const double r = uniform(rng, 10.0, 5000.0);
            expect_same_hits(layer.within_radius(p, r, f), scan_within(entries, p, r, f));
            const auto got = layer.nearest(p, r, f);
            const auto want = scan_nearest(entries, p, r, f);
            ASSERT_EQ(got.has_value(), want.has_value());
            if (got) {
                EXPECT_EQ(got->id, want->id);
                EXPECT_NEAR(got->distance_m, want->distance_m, 1e-6);
            }
        }
    }
}

TEST(IndexedLayer, RadiusMonotoneAndNearestIsFirstHit)
{
    Rng rng(5);
    const Region region{179.8, 0.0, 0.4, 0.2}; // straddles the antimeridian
    const auto layer = IndexedLayer::build(random_entries(rng, region, 3000, GeometryKind::point));
    for (int q = 0; q < 50; ++q) {
        const Coordinate p = region.sample(rng);
        const double r1 = uniform(rng, 0, 3000), r2 = r1 + uniform(rng, 0, 3000);
        const auto small = layer.within_radius(p, r1, TagFilter::any());
        const auto large = layer.within_radius(p, r2, TagFilter::any());
        for (const Hit& h : small)
            ASSERT_NE(std::find(large.begin(), large.end(), h), large.end());
        const auto nearest = layer.nearest(p, r2, TagFilter::any());
        ASSERT_EQ(nearest.has_value(), !large.empty());
        if (nearest) {
            EXPECT_EQ(*nearest, large.front());
        }
    }
}

TEST(IndexedLayer, ConcurrentQueriesAreDeterministic)
{
    Rng rng(8);
    const Region region{2.2, 48.8, 0.2, 0.1};
    const auto layer = IndexedLayer::build(random_entries(rng, region, 5000, GeometryKind::point));
    std::vector<Coordinate> queries;
    for (int i = 0; i < 400; ++i)
        queries.push_back(region.sample(rng));

    auto run = [&](std::size_t begin, std::size_t end, std::vector<std::size_t>& out) {
        for (std::size_t i = begin; i < end; ++i)
            out[i] = layer.within_radius(queries[i], 800, TagFilter::any()).size();
    };
    std::vector<std::size_t> serial(queries.size()), parallel(queries.size());
    run(0, queries.size(), serial);
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < 4; ++t)
            threads.emplace_back([&, t] { run(t * 100, (t + 1) * 100, parallel); });
    }
    EXPECT_EQ(serial, parallel);
}
