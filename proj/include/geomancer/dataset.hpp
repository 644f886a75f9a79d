#pragma once

#include "geomancer/csv.hpp"
#include "geomancer/geo.hpp"
#include "geomancer/text.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geomancer {

/// Input points with opaque ids and passthrough columns; row order is kept.
struct PointDataset {
    std::vector<std::string> passthrough_columns;
    struct Row {
        std::string id;
        Coordinate coord;
        std::vector<std::string> passthrough;
    };
    std::vector<Row> rows;

    std::size_t size() const { return rows.size(); }

    void add(std::string id, Coordinate coord, std::vector<std::string> passthrough = {})
    {
        if (passthrough.size() != passthrough_columns.size())
            throw Error(ErrorKind::schema, "row '" + id + "' has " + std::to_string(passthrough.size()) +
                                               " passthrough values, expected " +
                                               std::to_string(passthrough_columns.size()));
        rows.push_back({std::move(id), coord, std::move(passthrough)});
    }
};

struct DatasetCsvConfig {
    std::string lon_col = "lon";
    std::string lat_col = "lat";
    /// Row id column; when absent from the file, ids are 0-based row indices.
    std::string id_col = "row_id";
};

inline PointDataset read_points_csv(std::string_view bytes, const DatasetCsvConfig& config = {})
{
    const csv::Table table = csv::parse(bytes);
    const std::size_t lon_i = table.column(config.lon_col);
    const std::size_t lat_i = table.column(config.lat_col);
    const std::size_t id_i = table.column(config.id_col);
    if (lon_i == csv::Table::npos)
        throw Error(ErrorKind::schema, "missing column '" + config.lon_col + "'");
    if (lat_i == csv::Table::npos)
        throw Error(ErrorKind::schema, "missing column '" + config.lat_col + "'");

    PointDataset ds;
    std::vector<std::size_t> passthrough;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (i != lon_i && i != lat_i && i != id_i) {
            passthrough.push_back(i);
            ds.passthrough_columns.push_back(table.header[i]);
        }

    std::set<std::string, std::less<>> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "row " + std::to_string(table.row_numbers[r]);
        const auto lon = parse_double(row[lon_i]);
        const auto lat = parse_double(row[lat_i]);
        if (!lon || !lat)
            throw Error(ErrorKind::parse, where + ": cannot parse coordinate");
        std::string id = id_i == csv::Table::npos ? std::to_string(r) : row[id_i];
        if (!seen.insert(id).second)
            throw Error(ErrorKind::validation, where + ": duplicate row id '" + id + "'");
        std::vector<std::string> values;
        for (std::size_t i : passthrough)
            values.push_back(row[i]);
        try {
            ds.add(std::move(id), Coordinate(*lon, *lat), std::move(values));
        } catch (const Error& e) {
            throw Error(e.kind(), where + ": " + e.detail());
        }
    }
    return ds;
}

/// One scalar per dataset row; nullopt where the feature is undefined.
struct FeatureColumn {
    std::string name;
    bool integral = false;
    std::vector<std::optional<double>> values;

    friend bool operator==(const FeatureColumn&, const FeatureColumn&) = default;
};

/// Dataset columns followed by one feature column per spell.
struct FeatureMatrix {
    PointDataset dataset;
    std::vector<FeatureColumn> features;

    std::size_t rows() const { return dataset.size(); }

    /// Column names in output order.
    std::vector<std::string> column_names() const
    {
        std::vector<std::string> names{"row_id", "lon", "lat"};
        names.insert(names.end(), dataset.passthrough_columns.begin(), dataset.passthrough_columns.end());
        for (const auto& f : features)
            names.push_back(f.name);
        return names;
    }
};

} // namespace geomancer
