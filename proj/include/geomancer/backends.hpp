#pragma once

// Warehouse backends: database URLs and compilation of spells to SQL.
//
// Every dialect emits the same result shape, one row per input point:
//   (row_id, <feature_name>)
// with the reference table filtered by the spell's tag predicate and matched
// on spherical distance. The points table needs (row_id, geom); reference
// tables need a `geom` column plus one text column per tag key.

#include "geomancer/error.hpp"
#include "geomancer/filter.hpp"
#include "geomancer/geo.hpp"
#include "geomancer/spell.hpp"

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace geomancer {

enum class Dialect { postgis, spatialite, bigquery };

constexpr std::string_view to_string(Dialect d)
{
    switch (d) {
    case Dialect::postgis: return "postgis";
    case Dialect::spatialite: return "spatialite";
    case Dialect::bigquery: return "bigquery";
    }
    return "";
}

struct PostgresTarget {
    std::string user;
    std::string password;
    std::string host;
    std::optional<int> port;
    std::string database;
    friend bool operator==(const PostgresTarget&, const PostgresTarget&) = default;
};

struct SqliteTarget {
    std::string path;
    friend bool operator==(const SqliteTarget&, const SqliteTarget&) = default;
};

struct BigQueryTarget {
    std::string project;
    std::string dataset; // optional default dataset
    friend bool operator==(const BigQueryTarget&, const BigQueryTarget&) = default;
};

struct ConnectionSpec {
    std::variant<PostgresTarget, SqliteTarget, BigQueryTarget> target;

    Dialect dialect() const
    {
        switch (target.index()) {
        case 0: return Dialect::postgis;
        case 1: return Dialect::spatialite;
        default: return Dialect::bigquery;
        }
    }

    /// Canonical URL; parse_dburl(to_url()) == *this.
    std::string to_url() const
    {
        if (const auto* pg = std::get_if<PostgresTarget>(&target)) {
            std::string url = "postgresql://";
            if (!pg->user.empty()) {
                url += pg->user;
                if (!pg->password.empty())
                    url += ":" + pg->password;
                url += "@";
            }
            url += pg->host;
            if (pg->port)
                url += ":" + std::to_string(*pg->port);
            if (!pg->database.empty())
                url += "/" + pg->database;
            return url;
        }
        if (const auto* lite = std::get_if<SqliteTarget>(&target))
            return "sqlite://" + lite->path;
        const auto& bq = std::get<BigQueryTarget>(target);
        return "bigquery://" + bq.project + (bq.dataset.empty() ? "" : "/" + bq.dataset);
    }

    friend bool operator==(const ConnectionSpec&, const ConnectionSpec&) = default;
};

namespace detail {

[[noreturn]] inline void url_error(std::size_t pos, const std::string& what)
{
    throw Error(ErrorKind::parse, "database URL error at position " + std::to_string(pos) + ": " + what);
}

inline PostgresTarget parse_postgres(std::string_view rest, std::size_t offset)
{
    PostgresTarget pg;
    const std::size_t slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    if (slash != std::string_view::npos) {
        pg.database = std::string(rest.substr(slash + 1));
        if (pg.database.find('/') != std::string::npos)
            url_error(offset + slash + 1 + pg.database.find('/'), "unexpected '/' in database name");
    }
    std::size_t host_offset = offset;
    if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos) {
        std::string_view userinfo = authority.substr(0, at);
        const std::size_t colon = userinfo.find(':');
        pg.user = std::string(userinfo.substr(0, colon));
        if (colon != std::string_view::npos)
            pg.password = std::string(userinfo.substr(colon + 1));
        if (pg.user.empty())
            url_error(offset, "empty user name before '@'");
        authority.remove_prefix(at + 1);
        host_offset += at + 1;
    }
    const std::size_t colon = authority.rfind(':');
    pg.host = std::string(authority.substr(0, colon));
    if (colon != std::string_view::npos) {
        const std::string_view port = authority.substr(colon + 1);
        int value = 0;
        const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
        if (port.empty() || ec != std::errc() || end != port.data() + port.size() || value < 1 || value > 65535)
            url_error(host_offset + colon + 1, "invalid port '" + std::string(port) + "'");
        pg.port = value;
    }
    return pg;
}

} // namespace detail

inline ConnectionSpec parse_dburl(std::string_view url)
{
    const std::size_t sep = url.find("://");
    if (sep == std::string_view::npos) {
        const std::size_t colon = url.find(':');
        detail::url_error(colon == std::string_view::npos ? url.size() : colon, "expected '<scheme>://'");
    }
    const std::string_view scheme = url.substr(0, sep);
    if (scheme.empty())
        detail::url_error(0, "empty scheme");
    const std::size_t offset = sep + 3;
    const std::string_view rest = url.substr(offset);

    if (scheme == "postgresql")
        return {detail::parse_postgres(rest, offset)};
    if (scheme == "sqlite") {
        if (rest.empty())
            detail::url_error(offset, "missing database path");
        if (rest.front() != '/')
            detail::url_error(offset, "sqlite URLs take no host; expected sqlite:///path");
        return {SqliteTarget{std::string(rest)}};
    }
    if (scheme == "bigquery") {
        const std::size_t slash = rest.find('/');
        BigQueryTarget bq{std::string(rest.substr(0, slash)), {}};
        if (bq.project.empty())
            detail::url_error(offset, "missing project id");
        if (slash != std::string_view::npos) {
            bq.dataset = std::string(rest.substr(slash + 1));
            if (bq.dataset.empty() || bq.dataset.find('/') != std::string::npos)
                detail::url_error(offset + slash + 1, "expected bigquery://project[/dataset]");
        }
        return {bq};
    }
    throw Error(ErrorKind::lookup,
                "unsupported scheme '" + std::string(scheme) + "' (supported: postgresql, sqlite, bigquery)");
}

struct QueryBinding {
    std::string points_table;
    std::string source_table;
    std::string output_column;
    friend bool operator==(const QueryBinding&, const QueryBinding&) = default;
};

struct CompiledQuery {
    std::string sql;
    QueryBinding binding;
};

namespace detail {

/// Fixed notation, shortest round-trip digits.
inline std::string sql_number(double v)
{
    char buf[512];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc())
        throw Error(ErrorKind::compile, "number out of range for SQL literal");
    return std::string(buf, end);
}

inline bool is_safe_literal(std::string_view v)
{
    for (unsigned char c : v)
        if (c == '\'' || c == '\\' || c < 0x20 || c == 0x7f)
            return false;
    return true;
}

class SqlWriter {
  public:
    explicit SqlWriter(Dialect dialect) : dialect_(dialect) {}

    std::string column(std::string_view name) const
    {
        if (!is_identifier(name))
            throw Error(ErrorKind::compile, "tag key '" + std::string(name) + "' is not representable as a column name");
        return dialect_ == Dialect::bigquery ? "`" + std::string(name) + "`" : "\"" + std::string(name) + "\"";
    }

    std::string table(std::string_view name) const
    {
        if (!is_identifier(name, true))
            throw Error(ErrorKind::compile, "table name '" + std::string(name) + "' must match [A-Za-z_][A-Za-z0-9_.]*");
        return dialect_ == Dialect::bigquery ? "`" + std::string(name) + "`" : std::string(name);
    }

    std::string literal(std::string_view value) const
    {
        if (!is_safe_literal(value))
            throw Error(ErrorKind::compile, "tag value '" + std::string(value) +
                                                "' contains a quote, backslash, or control character");
        return "'" + std::string(value) + "'";
    }

    /// Boolean SQL for `filter`. A missing tag column value (NULL) behaves as
    /// a failed comparison, matching the in-memory evaluator.
    std::string predicate(const TagFilter& f) const
    {
        switch (f.op()) {
        case TagFilter::Op::any: return "TRUE";
        case TagFilter::Op::eq: return column(f.key()) + " = " + literal(f.value());
        case TagFilter::Op::negate: return "NOT COALESCE(" + predicate(f.lhs()) + ", FALSE)";
        case TagFilter::Op::both: return "(" + predicate(f.lhs()) + " AND " + predicate(f.rhs()) + ")";
        case TagFilter::Op::either: return "(" + predicate(f.lhs()) + " OR " + predicate(f.rhs()) + ")";
        }
        return "TRUE";
    }

  private:
    Dialect dialect_;
};

struct DialectParts {
    std::string aggregate; // over matching rows of s
    std::string spatial;   // join predicate between p and s
};

inline DialectParts dialect_parts(const Spell& spell, Dialect dialect)
{
    const std::string r = sql_number(spell.radius_m);
    switch (dialect) {
    case Dialect::postgis: {
        const std::string pg = "p.geom::geography";
        const std::string sg = "s.geom::geography";
        std::string spatial = "ST_DWithin(" + pg + ", " + sg + ", " + r + ", false)";
        switch (spell.kind) {
        case SpellKind::distance_to_nearest: return {"MIN(ST_Distance(" + pg + ", " + sg + ", false))", spatial};
        case SpellKind::number_of: return {"COUNT(*)", spatial};
        case SpellKind::length_of:
            return {"COALESCE(SUM(ST_Length(ST_Intersection(" + sg + ", ST_Buffer(" + pg + ", " + r + ")), false)), 0)",
                    spatial};
        }
        break;
    }
    case Dialect::spatialite: {
        const std::string k = sql_number(kMetersPerDegree);
        // Square MBR wide enough in longitude at the point's latitude.
        std::string spatial = "MbrIntersects(s.geom, BuildCircleMbr(X(p.geom), Y(p.geom), " + r + " / " + k +
                              " / max(Cos(Radians(Y(p.geom))), 0.01), SRID(p.geom)))\n      AND Distance(p.geom, "
                              "s.geom, 0) <= " +
                              r;
        switch (spell.kind) {
        case SpellKind::distance_to_nearest: return {"MIN(Distance(p.geom, s.geom, 0))", spatial};
        case SpellKind::number_of: return {"COUNT(*)", spatial};
        case SpellKind::length_of:
            // Clips in a local equirectangular frame centred on the point:
            // shift to the origin, shrink longitude by cos(lat), intersect
            // with a disc of r metres expressed in degrees, scale back.
            return {"COALESCE(SUM(GLength(Intersection(ScaleCoords(ShiftCoords(s.geom, -X(p.geom), -Y(p.geom)), "
                    "Cos(Radians(Y(p.geom))), 1.0), Buffer(MakePoint(0, 0, SRID(p.geom)), " +
                        r + " / " + k + ", 64)))), 0) * " + k,
                    spatial};
        }
        break;
    }
    case Dialect::bigquery: {
        std::string spatial = "ST_DWITHIN(p.geom, s.geom, " + r + ")";
        switch (spell.kind) {
        case SpellKind::distance_to_nearest: return {"MIN(ST_DISTANCE(p.geom, s.geom))", spatial};
        case SpellKind::number_of: return {"COUNT(*)", spatial};
        case SpellKind::length_of:
            return {"COALESCE(SUM(ST_LENGTH(ST_INTERSECTION(s.geom, ST_BUFFER(p.geom, " + r + ")))), 0)", spatial};
        }
        break;
    }
    }
    throw Error(ErrorKind::compile, "unsupported dialect");
}

} // namespace detail

/// Lowers one spell to a single SELECT returning (row_id, feature_name).
inline CompiledQuery compile(const Spell& spell, Dialect dialect, std::string_view source_table,
                             std::string_view points_table)
{
    if (const auto problems = spell_problems(spell); !problems.empty())
        throw Error(ErrorKind::compile, "spell '" + spell.feature_name + "': " + problems.front());

    const detail::SqlWriter w(dialect);
    const std::string src = w.table(source_table);
    const std::string pts = w.table(points_table);
    const auto parts = detail::dialect_parts(spell, dialect);

    std::string where;
    if (spell.filter.op() != TagFilter::Op::any)
        where = w.predicate(spell.filter) + "\n      AND ";
    where += parts.spatial;

    std::string sql;
    sql += "SELECT\n";
    sql += "  p.row_id,\n";
    sql += "  (\n";
    sql += "    SELECT " + parts.aggregate + "\n";
    sql += "    FROM " + src + " AS s\n";
    sql += "    WHERE " + where + "\n";
    sql += "  ) AS " + spell.feature_name + "\n";
    sql += "FROM " + pts + " AS p\n";
    sql += "ORDER BY p.row_id;\n";

    return {std::move(sql), {std::string(points_table), std::string(source_table), spell.feature_name}};
}

} // namespace geomancer
