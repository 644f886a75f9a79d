#pragma once

// Reference layers: ingestion from GeoJSON/CSV extracts and the sealed,
// name-addressed catalog that spells query.

#include "geomancer/csv.hpp"
#include "geomancer/filter.hpp"
#include "geomancer/geo.hpp"
#include "geomancer/spatial_index.hpp"
#include "geomancer/text.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace geomancer {

struct ReferenceLayer {
    std::string name;
    GeometryKind kind = GeometryKind::point;
    std::vector<LayerEntry> entries;
};

namespace detail {

/// Inserts vertices so that no segment is longer than kMaxSegmentM.
inline std::vector<Coordinate> densify(const std::vector<Coordinate>& vertices)
{
    std::vector<Coordinate> out;
    out.reserve(vertices.size());
    out.push_back(vertices.front());
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const Coordinate a = vertices[i - 1];
        const Coordinate b = vertices[i];
        const double length = haversine_m(a, b);
        const auto pieces = static_cast<std::size_t>(std::ceil(length / kMaxSegmentM));
        const double dlon = wrap_lon_delta(b.lon() - a.lon());
        const double dlat = b.lat() - a.lat();
        for (std::size_t k = 1; k < pieces; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(pieces);
            double lon = a.lon() + t * dlon;
            if (lon >= 180.0)
                lon -= 360.0;
            else if (lon < -180.0)
                lon += 360.0;
            out.emplace_back(lon, a.lat() + t * dlat);
        }
        out.push_back(b);
    }
    return out;
}

inline std::string stringify_scalar(const nlohmann::json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

} // namespace detail

/// Builds a polyline from raw vertices: consecutive repeats collapse and long
/// segments are split.
inline Polyline make_polyline(std::vector<Coordinate> vertices)
{
    std::vector<Coordinate> unique;
    unique.reserve(vertices.size());
    for (const auto& v : vertices)
        if (unique.empty() || !(unique.back() == v))
            unique.push_back(v);
    if (unique.size() < 2)
        throw Error(ErrorKind::validation, "line needs at least 2 distinct vertices");
    return Polyline(detail::densify(unique));
}

/// Loads an RFC 7946 FeatureCollection of Point or LineString features.
inline ReferenceLayer load_geojson(std::string_view bytes, std::string layer_name)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, "invalid JSON at byte offset " + std::to_string(e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
        throw Error(ErrorKind::schema, "expected a GeoJSON FeatureCollection");
    const auto features = doc.find("features");
    if (features == doc.end() || !features->is_array())
        throw Error(ErrorKind::schema, "FeatureCollection lacks a 'features' array");

    ReferenceLayer layer{std::move(layer_name), GeometryKind::point, {}};
    std::optional<std::string> first_kind;
    std::size_t index = 0;

    auto position = [&](const json& pos) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
            throw Error(ErrorKind::schema, "feature " + std::to_string(index) + ": position must be [lon, lat]");
        try {
            return Coordinate(pos[0].get<double>(), pos[1].get<double>());
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, "feature " + std::to_string(index) + ": " + e.detail());
        }
    };

    for (const json& feature : *features) {
        if (!feature.is_object() || feature.value("type", "") != "Feature")
            throw Error(ErrorKind::schema, "feature " + std::to_string(index) + ": not a GeoJSON Feature");
        const auto geometry = feature.find("geometry");
        if (geometry == feature.end() || !geometry->is_object())
            throw Error(ErrorKind::schema, "feature " + std::to_string(index) + ": missing geometry");
        const std::string type = geometry->value("type", "");
        if (type != "Point" && type != "LineString")
            throw Error(ErrorKind::schema,
                        "feature " + std::to_string(index) + ": unsupported geometry type '" + type + "'");
        if (first_kind && *first_kind != type)
            throw Error(ErrorKind::schema, "mixed geometry kinds in one layer: " + *first_kind + " and " + type +
                                               " (feature " + std::to_string(index) + ")");
        first_kind = type;

        const auto coords = geometry->find("coordinates");
        if (coords == geometry->end())
            throw Error(ErrorKind::schema, "feature " + std::to_string(index) + ": missing coordinates");

        LayerEntry entry{Coordinate{}, {}};
        if (type == "Point") {
            entry.geometry = position(*coords);
        } else {
            if (!coords->is_array())
                throw Error(ErrorKind::schema, "feature " + std::to_string(index) + ": LineString coordinates");
            std::vector<Coordinate> vertices;
            for (const json& pos : *coords)
                vertices.push_back(position(pos));
            try {
                entry.geometry = make_polyline(std::move(vertices));
            } catch (const Error& e) {
                throw Error(ErrorKind::validation, "feature " + std::to_string(index) + ": " + e.detail());
            }
            layer.kind = GeometryKind::polyline;
        }

        const auto props = feature.find("properties");
        if (props != feature.end() && props->is_object()) {
            for (const auto& [key, value] : props->items()) {
                if (key.empty() || value.is_null() || value.is_object() || value.is_array())
                    continue;
                entry.tags.emplace(key, detail::stringify_scalar(value));
            }
        }
        layer.entries.push_back(std::move(entry));
        ++index;
    }
    return layer;
}

struct CsvLayerConfig {
    std::string lon_col = "lon";
    std::string lat_col = "lat";
    /// Columns copied into tags; empty means every non-coordinate column.
    std::vector<std::string> tag_cols;
};

/// Loads one point per data row.
inline ReferenceLayer load_csv(std::string_view bytes, std::string layer_name, const CsvLayerConfig& config = {})
{
    const csv::Table table = csv::parse(bytes);
    const std::size_t lon_i = table.column(config.lon_col);
    const std::size_t lat_i = table.column(config.lat_col);
    if (lon_i == csv::Table::npos)
        throw Error(ErrorKind::schema, "missing column '" + config.lon_col + "'");
    if (lat_i == csv::Table::npos)
        throw Error(ErrorKind::schema, "missing column '" + config.lat_col + "'");

    std::vector<std::pair<std::string, std::size_t>> tag_columns;
    if (config.tag_cols.empty()) {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (i != lon_i && i != lat_i && !table.header[i].empty())
                tag_columns.emplace_back(table.header[i], i);
    } else {
        for (const auto& name : config.tag_cols) {
            const std::size_t i = table.column(name);
            if (i == csv::Table::npos)
                throw Error(ErrorKind::schema, "missing column '" + name + "'");
            tag_columns.emplace_back(name, i);
        }
    }

    ReferenceLayer layer{std::move(layer_name), GeometryKind::point, {}};
    layer.entries.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "row " + std::to_string(table.row_numbers[r]);
        const auto lon = parse_double(row[lon_i]);
        const auto lat = parse_double(row[lat_i]);
        if (!lon)
            throw Error(ErrorKind::parse, where + ": cannot parse longitude '" + row[lon_i] + "'");
        if (!lat)
            throw Error(ErrorKind::parse, where + ": cannot parse latitude '" + row[lat_i] + "'");
        LayerEntry entry{Coordinate{}, {}};
        try {
            entry.geometry = Coordinate(*lon, *lat);
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, where + ": " + e.detail());
        }
        for (const auto& [name, i] : tag_columns)
            entry.tags.emplace(name, row[i]);
        layer.entries.push_back(std::move(entry));
    }
    return layer;
}

/// A layer after indexing.
struct CatalogLayer {
    std::string name;
    GeometryKind kind;
    IndexedLayer index;
};

/// Name-addressed collection of indexed layers; read-only once sealed.
class Catalog {
  public:
    void add(ReferenceLayer layer)
    {
        if (sealed_)
            throw Error(ErrorKind::validation, "catalog is sealed");
        if (layers_.contains(layer.name))
            throw Error(ErrorKind::validation, "duplicate layer name '" + layer.name + "'");
        for (const auto& e : layer.entries)
            if (kind_of(e.geometry) != layer.kind)
                throw Error(ErrorKind::schema, "layer '" + layer.name + "' mixes geometry kinds");
        auto name = layer.name;
        layers_.emplace(name, std::make_shared<const CatalogLayer>(
                                  CatalogLayer{layer.name, layer.kind, IndexedLayer::build(std::move(layer.entries))}));
    }

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    const CatalogLayer* find(std::string_view name) const
    {
        auto it = layers_.find(name);
        return it == layers_.end() ? nullptr : it->second.get();
    }

    const CatalogLayer& at(std::string_view name) const
    {
        if (const auto* layer = find(name))
            return *layer;
        std::string available;
        for (const auto& [n, _] : layers_)
            available += (available.empty() ? "" : ", ") + n;
        throw Error(ErrorKind::lookup, "unknown layer '" + std::string(name) + "' (available: " +
                                           (available.empty() ? "none" : available) + ")");
    }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& [n, _] : layers_)
            out.push_back(n);
        return out;
    }

  private:
    std::map<std::string, std::shared_ptr<const CatalogLayer>, std::less<>> layers_;
    bool sealed_ = false;
};

} // namespace geomancer
