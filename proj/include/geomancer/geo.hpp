#pragma once

// Spherical-earth geometry on EPSG:4326 coordinates.
//
// Point-to-point distances are great-circle (haversine). Anything involving a
// segment is evaluated in a local equirectangular projection centred on the
// query point, which stays within 0.5% of the sphere for the short segments
// ingestion produces (<= 50 km) and query radii of tens of kilometres.

#include "geomancer/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace geomancer {

inline constexpr double kEarthRadiusM = 6'371'008.8;
inline constexpr double kMetersPerDegree = kEarthRadiusM * std::numbers::pi / 180.0;
inline constexpr double kMaxSegmentM = 50'000.0;

constexpr double to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }
constexpr double to_degrees(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Maps a longitude difference in [-360, 360] into [-180, 180).
constexpr double wrap_lon_delta(double d)
{
    if (d >= 180.0)
        return d - 360.0;
    if (d < -180.0)
        return d + 360.0;
    return d;
}

/// A validated EPSG:4326 position. Longitude +180 is stored as -180.
class Coordinate {
  public:
    constexpr Coordinate() = default;

    Coordinate(double lon, double lat) : lon_(lon), lat_(lat)
    {
        if (!std::isfinite(lon) || !std::isfinite(lat))
            throw Error(ErrorKind::validation, "coordinate must be finite");
        if (lat < -90.0 || lat > 90.0)
            throw Error(ErrorKind::validation, "latitude " + std::to_string(lat) + " outside [-90, 90]");
        if (lon < -180.0 || lon > 180.0)
            throw Error(ErrorKind::validation,
                        "longitude " + std::to_string(lon) + " outside [-180, 180]");
        if (lon_ == 180.0)
            lon_ = -180.0;
    }

    constexpr double lon() const { return lon_; }
    constexpr double lat() const { return lat_; }

    friend constexpr bool operator==(const Coordinate&, const Coordinate&) = default;

  private:
    double lon_ = 0.0;
    double lat_ = 0.0;
};

/// Axis-aligned lon/lat box. Never wraps across the antimeridian.
struct BoundingBox {
    double min_lon = 0.0;
    double min_lat = 0.0;
    double max_lon = 0.0;
    double max_lat = 0.0;

    static BoundingBox of(Coordinate c) { return {c.lon(), c.lat(), c.lon(), c.lat()}; }
    static BoundingBox world() { return {-180.0, -90.0, 180.0, 90.0}; }

    bool contains(Coordinate c) const
    {
        return c.lon() >= min_lon && c.lon() <= max_lon && c.lat() >= min_lat && c.lat() <= max_lat;
    }

    bool intersects(const BoundingBox& o) const
    {
        return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
               o.min_lat <= max_lat;
    }

    void extend(const BoundingBox& o)
    {
        min_lon = std::min(min_lon, o.min_lon);
        min_lat = std::min(min_lat, o.min_lat);
        max_lon = std::max(max_lon, o.max_lon);
        max_lat = std::max(max_lat, o.max_lat);
    }

    double center_lon() const { return 0.5 * (min_lon + max_lon); }
    double center_lat() const { return 0.5 * (min_lat + max_lat); }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Ordered vertex chain with at least two vertices and no consecutive repeats.
class Polyline {
  public:
    explicit Polyline(std::vector<Coordinate> vertices) : vertices_(std::move(vertices))
    {
        if (vertices_.size() < 2)
            throw Error(ErrorKind::validation, "polyline needs at least 2 vertices");
        for (std::size_t i = 1; i < vertices_.size(); ++i)
            if (vertices_[i] == vertices_[i - 1])
                throw Error(ErrorKind::validation,
                            "polyline has consecutive duplicate vertex at index " + std::to_string(i));
    }

    std::span<const Coordinate> vertices() const { return vertices_; }
    std::size_t segment_count() const { return vertices_.size() - 1; }

    /// Bounding box of all vertices; spans every longitude if a segment crosses
    /// the antimeridian.
    BoundingBox bbox() const
    {
        BoundingBox box = BoundingBox::of(vertices_.front());
        bool crosses = false;
        for (std::size_t i = 1; i < vertices_.size(); ++i) {
            box.extend(BoundingBox::of(vertices_[i]));
            if (std::abs(vertices_[i].lon() - vertices_[i - 1].lon()) >= 180.0)
                crosses = true;
        }
        if (crosses) {
            box.min_lon = -180.0;
            box.max_lon = 180.0;
        }
        return box;
    }

    friend bool operator==(const Polyline&, const Polyline&) = default;

  private:
    std::vector<Coordinate> vertices_;
};

/// Great-circle distance in metres.
inline double haversine_m(Coordinate a, Coordinate b)
{
    const double dlat = to_radians(std::abs(b.lat() - a.lat()));
    const double dlon = to_radians(std::abs(b.lon() - a.lon()));
    const double s_lat = std::sin(0.5 * dlat);
    const double s_lon = std::sin(0.5 * dlon);
    const double h =
        s_lat * s_lat + std::cos(to_radians(a.lat())) * std::cos(to_radians(b.lat())) * s_lon * s_lon;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Planar metre offsets in the equirectangular projection centred at `origin`.
struct LocalPoint {
    double x = 0.0;
    double y = 0.0;
};

class LocalProjection {
  public:
    explicit LocalProjection(Coordinate origin)
        : origin_(origin), kx_(std::cos(to_radians(origin.lat())) * kMetersPerDegree)
    {
    }

    LocalPoint project(Coordinate c) const
    {
        return {wrap_lon_delta(c.lon() - origin_.lon()) * kx_, (c.lat() - origin_.lat()) * kMetersPerDegree};
    }

    /// Projects `to` continuing from the already-projected `from_projected`
    /// along the short way, so segments never jump across the wrap seam.
    LocalPoint project_after(LocalPoint from_projected, Coordinate from, Coordinate to) const
    {
        return {from_projected.x + wrap_lon_delta(to.lon() - from.lon()) * kx_,
                (to.lat() - origin_.lat()) * kMetersPerDegree};
    }

    double meters_per_degree_lon() const { return kx_; }

  private:
    Coordinate origin_;
    double kx_;
};

namespace detail {

inline double origin_to_segment(LocalPoint a, LocalPoint b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(-(a.x * dx + a.y * dy) / len2, 0.0, 1.0);
    const double px = a.x + t * dx;
    const double py = a.y + t * dy;
    return std::hypot(px, py);
}

/// Length of the part of segment a-b inside the origin-centred disc of radius r.
inline double clipped_segment_length(LocalPoint a, LocalPoint b, double r)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double qa = dx * dx + dy * dy;
    if (qa == 0.0)
        return 0.0;
    const double qb = 2.0 * (a.x * dx + a.y * dy);
    const double qc = a.x * a.x + a.y * a.y - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0)
        return 0.0;
    const double root = std::sqrt(disc);
    const double t0 = std::max(0.0, (-qb - root) / (2.0 * qa));
    const double t1 = std::min(1.0, (-qb + root) / (2.0 * qa));
    if (t1 <= t0)
        return 0.0;
    return (t1 - t0) * std::sqrt(qa);
}

} // namespace detail

/// Distance from `p` to segment a-b. Never exceeds the great-circle distance
/// to either endpoint; reduces to haversine_m(p, a) when a == b.
inline double point_segment_distance_m(Coordinate p, Coordinate a, Coordinate b)
{
    const double to_a = haversine_m(p, a);
    if (a == b)
        return to_a;
    const LocalProjection proj(p);
    const LocalPoint pa = proj.project(a);
    const LocalPoint pb = proj.project_after(pa, a, b);
    return std::min({detail::origin_to_segment(pa, pb), to_a, haversine_m(p, b)});
}

inline double point_polyline_distance_m(Coordinate p, const Polyline& line)
{
    const auto v = line.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i)
        best = std::min(best, point_segment_distance_m(p, v[i - 1], v[i]));
    return best;
}

/// Total length of `line` inside the disc of radius `r_m` around `center`.
inline double clipped_length_in_radius_m(const Polyline& line, Coordinate center, double r_m)
{
    if (!(r_m > 0.0))
        return 0.0;
    const LocalProjection proj(center);
    const auto v = line.vertices();
    double total = 0.0;
    LocalPoint prev = proj.project(v[0]);
    for (std::size_t i = 1; i < v.size(); ++i) {
        const LocalPoint cur = proj.project_after(prev, v[i - 1], v[i]);
        total += detail::clipped_segment_length(prev, cur, r_m);
        prev = cur;
    }
    return total;
}

/// Boxes (one, or two when the span crosses +-180) jointly covering every
/// point within great-circle distance `r_m` of `center`, and every point whose
/// local-projection offset from `center` is within `r_m`.
inline std::vector<BoundingBox> expand_bbox(Coordinate center, double r_m)
{
    if (!(r_m >= 0.0) || !std::isfinite(r_m))
        throw Error(ErrorKind::validation, "radius must be finite and non-negative");
    if (r_m == 0.0)
        return {BoundingBox::of(center)};

    // Guards the boundary-inclusive comparisons against last-bit rounding.
    constexpr double pad = 1e-12;
    const double dlat = r_m / kMetersPerDegree * (1.0 + 1e-15) + pad;
    const double lat_lo = std::max(-90.0, center.lat() - dlat);
    const double lat_hi = std::min(90.0, center.lat() + dlat);

    double dlon = 180.0;
    const double angular = r_m / kEarthRadiusM;
    if (lat_hi < 90.0 && lat_lo > -90.0 && angular < std::numbers::pi / 2) {
        const double c = std::cos(to_radians(center.lat()));
        // The projected metric needs the full 1/cos stretch, which is never
        // narrower than the cos-clamped span.
        dlon = dlat / c;
        const double s = std::sin(angular) / c;
        dlon = s >= 1.0 ? 180.0 : std::max(dlon, to_degrees(std::asin(s)) * (1.0 + 1e-15) + pad);
    }
    if (dlon >= 180.0)
        return {{-180.0, lat_lo, 180.0, lat_hi}};

    const double lon_lo = center.lon() - dlon;
    const double lon_hi = center.lon() + dlon;
    if (lon_lo < -180.0)
        return {{lon_lo + 360.0, lat_lo, 180.0, lat_hi}, {-180.0, lat_lo, lon_hi, lat_hi}};
    if (lon_hi > 180.0)
        return {{lon_lo, lat_lo, 180.0, lat_hi}, {-180.0, lat_lo, lon_hi - 360.0, lat_hi}};
    return {{lon_lo, lat_lo, lon_hi, lat_hi}};
}

/// Lower bounds on the distance from `p` to anything inside `box`.
namespace bounds {

inline double lon_gap_degrees(double lon, const BoundingBox& box)
{
    if (lon >= box.min_lon && lon <= box.max_lon)
        return 0.0;
    auto circular = [](double a, double b) {
        const double d = std::abs(a - b);
        return std::min(d, 360.0 - d);
    };
    return std::min(circular(lon, box.min_lon), circular(lon, box.max_lon));
}

inline double lat_gap_degrees(double lat, const BoundingBox& box)
{
    if (lat < box.min_lat)
        return box.min_lat - lat;
    if (lat > box.max_lat)
        return lat - box.max_lat;
    return 0.0;
}

/// Bounds haversine_m(p, q) from below for every q in `box`.
inline double great_circle(Coordinate p, const BoundingBox& box)
{
    const double dphi = to_radians(lat_gap_degrees(p.lat(), box));
    const double dlam = to_radians(lon_gap_degrees(p.lon(), box));
    const double min_cos = std::min(std::cos(to_radians(box.min_lat)), std::cos(to_radians(box.max_lat)));
    const double s_lat = std::sin(0.5 * dphi);
    const double s_lon = std::sin(0.5 * dlam);
    const double h = s_lat * s_lat + std::cos(to_radians(p.lat())) * std::max(0.0, min_cos) * s_lon * s_lon;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Bounds the local-projection distance from `p` to any point in `box`.
inline double projected(Coordinate p, const BoundingBox& box)
{
    const double x = lon_gap_degrees(p.lon(), box) * std::cos(to_radians(p.lat())) * kMetersPerDegree;
    const double y = lat_gap_degrees(p.lat(), box) * kMetersPerDegree;
    return std::hypot(x, y);
}

/// Shrinks a bound slightly so rounding never lifts it above the exact value.
inline double conservative(double bound) { return std::max(0.0, bound * (1.0 - 1e-12) - 1e-9); }

} // namespace bounds

} // namespace geomancer
