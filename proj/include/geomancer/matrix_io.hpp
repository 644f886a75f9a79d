#pragma once

#include "geomancer/csv.hpp"
#include "geomancer/dataset.hpp"
#include "geomancer/text.hpp"

#include <json.hpp>

#include <string>

namespace geomancer {

namespace detail {

inline std::string format_feature(const FeatureColumn& column, std::size_t row)
{
    const auto& v = column.values[row];
    if (!v)
        return {};
    return column.integral ? format_count(*v) : format_double(*v);
}

} // namespace detail

/// CSV with columns row_id, lon, lat, passthrough..., features...; a missing
/// feature value is an empty field.
inline std::string to_csv(const FeatureMatrix& matrix)
{
    std::string out;
    csv::append_record(out, matrix.column_names());
    csv::Record record;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto& row = matrix.dataset.rows[r];
        record.clear();
        record.push_back(row.id);
        record.push_back(format_double(row.coord.lon()));
        record.push_back(format_double(row.coord.lat()));
        record.insert(record.end(), row.passthrough.begin(), row.passthrough.end());
        for (const auto& f : matrix.features)
            record.push_back(detail::format_feature(f, r));
        csv::append_record(out, record);
    }
    return out;
}

/// FeatureCollection of Points; every non-coordinate column becomes a property.
inline std::string to_geojson(const FeatureMatrix& matrix)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = ordered_json::array();
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto& row = matrix.dataset.rows[r];
        ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"] = {{"type", "Point"}, {"coordinates", {row.coord.lon(), row.coord.lat()}}};
        ordered_json props;
        props["row_id"] = row.id;
        for (std::size_t c = 0; c < row.passthrough.size(); ++c)
            props[matrix.dataset.passthrough_columns[c]] = row.passthrough[c];
        for (const auto& f : matrix.features) {
            const auto& v = f.values[r];
            if (!v)
                props[f.name] = nullptr;
            else if (f.integral)
                props[f.name] = static_cast<long long>(std::llround(*v));
            else
                props[f.name] = *v;
        }
        feature["properties"] = std::move(props);
        doc["features"].push_back(std::move(feature));
    }
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

} // namespace geomancer
