#include "geomancer/geo.hpp"

#include "support/generators.hpp"
#include "support/sphere.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace geomancer;
using geomancer::oracle::Rng;
using geomancer::oracle::uniform;
using geomancer::oracle::destination;
using geomancer::oracle::kOneDegreeM;

namespace {

bool covered(const std::vector<BoundingBox>& boxes, Coordinate c)
{
    return std::any_of(boxes.begin(), boxes.end(), [&](const BoundingBox& b) { return b.contains(c); });
}

} // namespace

TEST(Coordinate, CanonicalisesPositiveAntimeridian)
{
    EXPECT_EQ(Coordinate(180.0, 10.0).lon(), -180.0);
    EXPECT_EQ(Coordinate(-180.0, 10.0).lon(), -180.0);
}

TEST(Coordinate, RejectsOutOfRangeAndNonFinite)
{
    EXPECT_THROW(Coordinate(0.0, 91.0), Error);
    EXPECT_THROW(Coordinate(180.5, 0.0), Error);
    EXPECT_THROW(Coordinate(std::nan(""), 0.0), Error);
    EXPECT_THROW(Coordinate(0.0, std::numeric_limits<double>::infinity()), Error);
}

TEST(Polyline, RejectsShortAndRepeatedVertices)
{
    EXPECT_THROW(Polyline({Coordinate(0, 0)}), Error);
    EXPECT_THROW(Polyline({Coordinate(0, 0), Coordinate(0, 0)}), Error);
    EXPECT_NO_THROW(Polyline({Coordinate(0, 0), Coordinate(0, 1), Coordinate(0, 0)}));
}

TEST(Haversine, IdentityIsZero) { EXPECT_EQ(haversine_m(Coordinate(0, 0), Coordinate(0, 0)), 0.0); }

TEST(Haversine, OneDegreeOnMeridianAndEquator)
{
    EXPECT_NEAR(haversine_m(Coordinate(0, 0), Coordinate(0, 1)), kOneDegreeM, 0.01);
    EXPECT_NEAR(haversine_m(Coordinate(0, 0), Coordinate(1, 0)), kOneDegreeM, 0.01);
}

TEST(Haversine, ShortWayAcrossAntimeridian)
{
    EXPECT_NEAR(haversine_m(Coordinate(179.5, 0), Coordinate(-179.5, 0)), kOneDegreeM, 1e-6);
}

TEST(Haversine, SymmetricAndTriangleInequality)
{
    Rng rng(7);
    for (int i = 0; i < 20'000; ++i) {
        const Coordinate a(uniform(rng, -180, 180), uniform(rng, -90, 90));
        const Coordinate b(uniform(rng, -180, 180), uniform(rng, -90, 90));
        const Coordinate c(uniform(rng, -180, 180), uniform(rng, -90, 90));
        ASSERT_EQ(haversine_m(a, b), haversine_m(b, a));
        const double ab = haversine_m(a, b), bc = haversine_m(b, c), ac = haversine_m(a, c);
        ASSERT_LE(ac, (ab + bc) * (1.0 + 1e-6) + 1e-6);
    }
}

TEST(PointSegment, EndpointCoincidence)
{
    EXPECT_EQ(point_segment_distance_m(Coordinate(3, 4), Coordinate(3, 4), Coordinate(3.1, 4)), 0.0);
}

TEST(PointSegment, PerpendicularFoot)
{
    const double d = point_segment_distance_m(Coordinate(0, 0), Coordinate(-1, 1), Coordinate(1, 1));
    EXPECT_NEAR(d, kOneDegreeM, kOneDegreeM * 0.005);
}

TEST(PointSegment, ProjectionBeforeSegmentStartUsesEndpoint)
{
    const Coordinate p(0, 0), a(2, 1), b(3, 1);
    const double expected = haversine_m(p, a);
    EXPECT_NEAR(point_segment_distance_m(p, a, b), expected, expected * 0.005);
}

TEST(PointSegment, DegenerateSegmentIsHaversine)
{
    const Coordinate p(10, 20), a(10.01, 20.02);
    EXPECT_EQ(point_segment_distance_m(p, a, a), haversine_m(p, a));
}

TEST(PointSegment, NeverExceedsEndpointDistances)
{
    Rng rng(11);
    for (int i = 0; i < 20'000; ++i) {
        const Coordinate p(uniform(rng, -180, 180), uniform(rng, -85, 85));
        const Coordinate a(uniform(rng, -180, 180), uniform(rng, -85, 85));
        const Coordinate b = destination(a, uniform(rng, 0, 6.3), uniform(rng, 1, 50'000));
        const double d = point_segment_distance_m(p, a, b);
        ASSERT_LE(d, std::min(haversine_m(p, a), haversine_m(p, b)) + 1e-6);
    }
}

TEST(PointPolyline, VertexAndSingleSegment)
{
    const Polyline line({Coordinate(0, 0), Coordinate(0.01, 0), Coordinate(0.01, 0.01)});
    EXPECT_EQ(point_polyline_distance_m(Coordinate(0.01, 0), line), 0.0);

    const Polyline two({Coordinate(0, 0), Coordinate(0.02, 0.01)});
    const Coordinate p(0.005, 0.01);
    EXPECT_EQ(point_polyline_distance_m(p, two), point_segment_distance_m(p, Coordinate(0, 0), Coordinate(0.02, 0.01)));
}

TEST(PointPolyline, BentLineIsMinimumOverSegments)
{
    const Coordinate v0(0, 0), v1(0.05, 0), v2(0.05, 0.05);
    const Polyline line({v0, v1, v2});
    const Coordinate p(0.06, 0.03); // beside the second segment
    const double s0 = point_segment_distance_m(p, v0, v1);
    const double s1 = point_segment_distance_m(p, v1, v2);
    ASSERT_LT(s1, s0);
    EXPECT_EQ(point_polyline_distance_m(p, line), std::min(s0, s1));
    // Second segment runs due north, so the foot is 0.01 deg of longitude away.
    EXPECT_NEAR(s1, 0.01 * kOneDegreeM * std::cos(0.03 * std::numbers::pi / 180.0), 1e-6);
}

TEST(ClippedLength, ZeroRadius)
{
    const Polyline line({Coordinate(-0.1, 0), Coordinate(0.1, 0)});
    EXPECT_EQ(clipped_length_in_radius_m(line, Coordinate(0, 0), 0.0), 0.0);
}

TEST(ClippedLength, ChordThroughCentre)
{
    const Polyline line({Coordinate(-0.1, 0), Coordinate(0.1, 0)});
    EXPECT_NEAR(clipped_length_in_radius_m(line, Coordinate(0, 0), 1000.0), 2000.0, 1.0);
}

TEST(ClippedLength, LineInsideDiscIsFullLength)
{
    const Coordinate c(103.85, 1.29);
    const Polyline line({Coordinate(103.851, 1.29), Coordinate(103.852, 1.291), Coordinate(103.850, 1.292)});
    double sum = 0.0;
    const auto v = line.vertices();
    for (std::size_t i = 1; i < v.size(); ++i)
        sum += haversine_m(v[i - 1], v[i]);
    EXPECT_NEAR(clipped_length_in_radius_m(line, c, 5000.0), sum, sum * 0.005);
}

TEST(ClippedLength, OffsetChord)
{
    // Horizontal line 600 m north of the centre: chord 2*sqrt(1000^2 - 600^2).
    const double dlat = 600.0 / kOneDegreeM;
    const Polyline line({Coordinate(-0.1, dlat), Coordinate(0.1, dlat)});
    EXPECT_NEAR(clipped_length_in_radius_m(line, Coordinate(0, 0), 1000.0), 1600.0, 1e-6);
}

TEST(ExpandBBox, ZeroRadiusIsDegenerate)
{
    const auto boxes = expand_bbox(Coordinate(5, 6), 0.0);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0], (BoundingBox{5, 6, 5, 6}));
}

TEST(ExpandBBox, OneDegreeAtOrigin)
{
    const auto boxes = expand_bbox(Coordinate(0, 0), kOneDegreeM);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_NEAR(boxes[0].min_lat, -1.0, 1e-9);
    EXPECT_NEAR(boxes[0].max_lat, 1.0, 1e-9);
    EXPECT_NEAR(boxes[0].min_lon, -1.0, 1e-9);
    EXPECT_NEAR(boxes[0].max_lon, 1.0, 1e-9);
}

TEST(ExpandBBox, SplitsAtAntimeridian)
{
    const Coordinate c(179.9, 0);
    const auto boxes = expand_bbox(c, 50'000.0);
    ASSERT_EQ(boxes.size(), 2u);
    EXPECT_EQ(boxes[0].max_lon, 180.0);
    EXPECT_EQ(boxes[1].min_lon, -180.0);
    for (int k = 0; k < 360; ++k) {
        const Coordinate q = destination(c, k * std::numbers::pi / 180.0, 50'000.0);
        EXPECT_TRUE(covered(boxes, q)) << k;
    }
}

TEST(ExpandBBox, PoleInsideDiscSpansAllLongitudes)
{
    const auto boxes = expand_bbox(Coordinate(10, 89.9), 50'000.0);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].min_lon, -180.0);
    EXPECT_EQ(boxes[0].max_lon, 180.0);
    EXPECT_EQ(boxes[0].max_lat, 90.0);
}

TEST(ExpandBBox, SoundForRandomDiscs)
{
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Coordinate c(uniform(rng, -180, 180), uniform(rng, -89.5, 89.5));
        const double r = uniform(rng, 0.0, 100'000.0);
        const auto boxes = expand_bbox(c, r);
        for (int k = 0; k < 64; ++k) {
            // Half the samples sit exactly on the boundary circle.
            const double d = k % 2 ? r : uniform(rng, 0.0, r);
            const Coordinate q = destination(c, uniform(rng, 0.0, 2 * std::numbers::pi), d);
            if (haversine_m(c, q) > r)
                continue;
            ASSERT_TRUE(covered(boxes, q)) << "center " << c.lon() << "," << c.lat() << " r=" << r;
        }
    }
}

TEST(LocalProjection, AgreesWithHaversineWithinHalfPercent)
{
    Rng rng(5);
    for (int i = 0; i < 20'000; ++i) {
        const Coordinate p(uniform(rng, -180, 180), uniform(rng, -70, 70));
        const Coordinate q = destination(p, uniform(rng, 0, 2 * std::numbers::pi), uniform(rng, 1.0, 10'000.0));
        const LocalPoint xy = LocalProjection(p).project(q);
        const double hav = haversine_m(p, q);
        ASSERT_NEAR(std::hypot(xy.x, xy.y), hav, hav * 0.005);
    }
}

TEST(Bounds, NeverExceedExactDistance)
{
    Rng rng(13);
    for (int i = 0; i < 20'000; ++i) {
        const Coordinate p(uniform(rng, -180, 180), uniform(rng, -89, 89));
        const Coordinate a(uniform(rng, -180, 180), uniform(rng, -89, 89));
        const Coordinate b = destination(a, uniform(rng, 0, 6.3), uniform(rng, 1, 50'000));
        if (a == b)
            continue;
        const Polyline line({a, b});
        const BoundingBox box = line.bbox();
        const double lb = bounds::conservative(std::min(bounds::great_circle(p, box), bounds::projected(p, box)));
        ASSERT_LE(lb, point_polyline_distance_m(p, line));
        ASSERT_LE(bounds::conservative(bounds::great_circle(p, BoundingBox::of(a))), haversine_m(p, a));
    }
}
