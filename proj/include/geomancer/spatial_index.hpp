#pragma once

// Immutable Sort-Tile-Recursive packed R-tree over a layer's geometries.
//
// Exact distances always come from geo.hpp; the tree only prunes with bounds
// that never exceed those distances, so results equal a linear scan.

#include "geomancer/filter.hpp"
#include "geomancer/geo.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace geomancer {

/// Dense identifier of an entry within one IndexedLayer (its ingestion order).
struct GeometryId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(GeometryId, GeometryId) = default;
};

enum class GeometryKind { point, polyline };

constexpr std::string_view to_string(GeometryKind kind)
{
    return kind == GeometryKind::point ? "point" : "polyline";
}

using Geometry = std::variant<Coordinate, Polyline>;

inline GeometryKind kind_of(const Geometry& g)
{
    return std::holds_alternative<Coordinate>(g) ? GeometryKind::point : GeometryKind::polyline;
}

inline BoundingBox bbox_of(const Geometry& g)
{
    if (const auto* c = std::get_if<Coordinate>(&g))
        return BoundingBox::of(*c);
    return std::get<Polyline>(g).bbox();
}

inline double distance_m(Coordinate p, const Geometry& g)
{
    if (const auto* c = std::get_if<Coordinate>(&g))
        return haversine_m(p, *c);
    return point_polyline_distance_m(p, std::get<Polyline>(g));
}

struct LayerEntry {
    Geometry geometry;
    Tags tags;
};

struct Hit {
    GeometryId id;
    double distance_m = 0.0;
    friend bool operator==(const Hit&, const Hit&) = default;
};

/// Per-query work counters. `candidates` counts entries whose box survived
/// the spatial pre-filter.
struct QueryStats {
    std::size_t candidates = 0;
    std::size_t nodes_visited = 0;
};

class IndexedLayer {
  public:
    static constexpr std::size_t kNodeCapacity = 16;

    IndexedLayer() = default;

    static IndexedLayer build(std::vector<LayerEntry> entries)
    {
        IndexedLayer layer;
        if (entries.size() > std::numeric_limits<std::uint32_t>::max())
            throw Error(ErrorKind::validation, "layer exceeds 2^32 entries");
        layer.entries_ = std::move(entries);
        layer.boxes_.reserve(layer.entries_.size());
        for (const auto& e : layer.entries_) {
            layer.boxes_.push_back(bbox_of(e.geometry));
            if (!std::holds_alternative<Coordinate>(e.geometry))
                layer.has_polylines_ = true;
        }
        layer.pack();
        return layer;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const LayerEntry& entry(GeometryId id) const { return entries_.at(id.value); }
    const BoundingBox& entry_bbox(GeometryId id) const { return boxes_.at(id.value); }
    std::span<const LayerEntry> entries() const { return entries_; }

    /// Depth of the tree (0 for an empty layer, 1 for a single leaf).
    std::size_t height() const { return height_; }

    /// Closest filter-passing entry within `cap_m`; ties go to the smaller id.
    std::optional<Hit> nearest(Coordinate p, double cap_m, const TagFilter& filter,
                               QueryStats* stats = nullptr) const
    {
        if (nodes_.empty() || !(cap_m >= 0.0))
            return std::nullopt;

        // Nodes sort ahead of entries at equal keys so that an unexpanded node
        // whose bound equals a candidate distance is opened before returning.
        struct Item {
            double key;
            bool is_entry;
            std::uint32_t index;
            bool operator>(const Item& o) const
            {
                if (key != o.key)
                    return key > o.key;
                if (is_entry != o.is_entry)
                    return is_entry;
                return index > o.index;
            }
        };
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        queue.push({0.0, false, root_});

        while (!queue.empty()) {
            const Item top = queue.top();
            queue.pop();
            if (top.is_entry)
                return Hit{GeometryId{top.index}, top.key};
            const Node& node = nodes_[top.index];
            if (stats)
                ++stats->nodes_visited;
            if (node.leaf) {
                for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                    const std::uint32_t id = leaf_items_[i];
                    if (lower_bound(p, boxes_[id]) > cap_m)
                        continue;
                    if (stats)
                        ++stats->candidates;
                    if (!filter.matches(entries_[id].tags))
                        continue;
                    const double d = distance_m(p, entries_[id].geometry);
                    if (d <= cap_m)
                        queue.push({d, true, id});
                }
            } else {
                for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                    const double lb = lower_bound(p, nodes_[i].box);
                    if (lb <= cap_m)
                        queue.push({lb, false, i});
                }
            }
        }
        return std::nullopt;
    }

    /// Every filter-passing entry with distance <= r_m, sorted by (distance, id).
    std::vector<Hit> within_radius(Coordinate p, double r_m, const TagFilter& filter,
                                   QueryStats* stats = nullptr) const
    {
        std::vector<Hit> hits;
        if (nodes_.empty())
            return hits;
        const std::vector<BoundingBox> query = expand_bbox(p, r_m);
        auto overlaps = [&](const BoundingBox& box) {
            return std::any_of(query.begin(), query.end(), [&](const BoundingBox& q) { return q.intersects(box); });
        };

        std::vector<std::uint32_t> stack{root_};
        while (!stack.empty()) {
            const Node& node = nodes_[stack.back()];
            stack.pop_back();
            if (stats)
                ++stats->nodes_visited;
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                if (!node.leaf) {
                    if (overlaps(nodes_[i].box))
                        stack.push_back(i);
                    continue;
                }
                const std::uint32_t id = leaf_items_[i];
                if (!overlaps(boxes_[id]))
                    continue;
                if (stats)
                    ++stats->candidates;
                if (!filter.matches(entries_[id].tags))
                    continue;
                const double d = distance_m(p, entries_[id].geometry);
                if (d <= r_m)
                    hits.push_back({GeometryId{id}, d});
            }
        }
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
            return a.distance_m != b.distance_m ? a.distance_m < b.distance_m : a.id < b.id;
        });
        return hits;
    }

  private:
    struct Node {
        BoundingBox box;
        std::uint32_t first = 0; // into nodes_ (internal) or leaf_items_ (leaf)
        std::uint32_t count = 0;
        bool leaf = false;
    };

    struct Packable {
        BoundingBox box;
        std::uint32_t ref;
    };

    double lower_bound(Coordinate p, const BoundingBox& box) const
    {
        double lb = bounds::great_circle(p, box);
        if (has_polylines_)
            lb = std::min(lb, bounds::projected(p, box));
        return bounds::conservative(lb);
    }

    /// Orders `items` into STR tiles: vertical slices by centre longitude,
    /// then runs of kNodeCapacity by centre latitude within each slice.
    static void str_order(std::vector<Packable>& items)
    {
        auto by_lon = [](const Packable& a, const Packable& b) {
            const double ca = a.box.center_lon(), cb = b.box.center_lon();
            return ca != cb ? ca < cb : a.ref < b.ref;
        };
        auto by_lat = [](const Packable& a, const Packable& b) {
            const double ca = a.box.center_lat(), cb = b.box.center_lat();
            return ca != cb ? ca < cb : a.ref < b.ref;
        };
        std::sort(items.begin(), items.end(), by_lon);
        const std::size_t leaves = (items.size() + kNodeCapacity - 1) / kNodeCapacity;
        const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
        const std::size_t slice_size = slices * kNodeCapacity;
        for (std::size_t start = 0; start < items.size(); start += slice_size) {
            const auto end = items.begin() + static_cast<std::ptrdiff_t>(std::min(items.size(), start + slice_size));
            std::sort(items.begin() + static_cast<std::ptrdiff_t>(start), end, by_lat);
        }
    }

    /// Groups ordered children into parents; returns the parents.
    std::vector<Packable> group(const std::vector<Packable>& ordered, bool leaf_level, std::uint32_t first_slot)
    {
        std::vector<Packable> parents;
        for (std::size_t start = 0; start < ordered.size(); start += kNodeCapacity) {
            const std::size_t end = std::min(ordered.size(), start + kNodeCapacity);
            Node node;
            node.leaf = leaf_level;
            node.first = first_slot + static_cast<std::uint32_t>(start);
            node.count = static_cast<std::uint32_t>(end - start);
            node.box = ordered[start].box;
            for (std::size_t i = start + 1; i < end; ++i)
                node.box.extend(ordered[i].box);
            parents.push_back({node.box, static_cast<std::uint32_t>(nodes_.size())});
            nodes_.push_back(node);
        }
        return parents;
    }

    void pack()
    {
        if (entries_.empty())
            return;
        std::vector<Packable> level;
        level.reserve(entries_.size());
        for (std::uint32_t i = 0; i < entries_.size(); ++i)
            level.push_back({boxes_[i], i});

        str_order(level);
        leaf_items_.reserve(level.size());
        for (const auto& item : level)
            leaf_items_.push_back(item.ref);
        level = group(level, true, 0);
        height_ = 1;

        // Children of each parent must be contiguous in nodes_, so every
        // level is re-emitted in its STR order before grouping.
        while (level.size() > 1) {
            str_order(level);
            const auto first_slot = static_cast<std::uint32_t>(nodes_.size());
            for (const auto& item : level) {
                const Node copy = nodes_[item.ref];
                nodes_.push_back(copy);
            }
            level = group(level, false, first_slot);
            ++height_;
        }
        root_ = level.front().ref;
    }

    std::vector<LayerEntry> entries_;
    std::vector<BoundingBox> boxes_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> leaf_items_;
    std::uint32_t root_ = 0;
    std::size_t height_ = 0;
    bool has_polylines_ = false;
};

} // namespace geomancer
