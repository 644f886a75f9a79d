#pragma once

// Command-line front end. Exit codes: 0 success, 1 invalid input or
// configuration, 2 I/O failure.

#include "geomancer/backends.hpp"
#include "geomancer/bench.hpp"
#include "geomancer/cast.hpp"
#include "geomancer/catalog.hpp"
#include "geomancer/matrix_io.hpp"
#include "geomancer/spellbook.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace geomancer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

inline int exit_code_for(const Error& e) { return e.kind() == ErrorKind::io ? kExitIo : kExitInvalid; }

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error(ErrorKind::io, "failed reading '" + path + "'");
    return buf.str();
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial output.
inline void write_file_atomic(const std::string& path, std::string_view contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw Error(ErrorKind::io, "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw Error(ErrorKind::io, "cannot move output into '" + path + "': " + ec.message());
    }
}

struct LayerSpec {
    std::string name;
    std::string path;
    std::string format; // "csv" or "geojson"
};

/// Parses `name=path[:format]`; the format defaults from the file extension.
inline LayerSpec parse_layer_spec(const std::string& text)
{
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
        throw Error(ErrorKind::validation, "--layer expects name=path[:format], got '" + text + "'");
    LayerSpec spec{text.substr(0, eq), text.substr(eq + 1), {}};
    if (const std::size_t colon = spec.path.rfind(':'); colon != std::string::npos) {
        const std::string suffix = spec.path.substr(colon + 1);
        if (suffix == "csv" || suffix == "geojson") {
            spec.format = suffix;
            spec.path.resize(colon);
        }
    }
    if (spec.format.empty()) {
        const std::string ext = std::filesystem::path(spec.path).extension().string();
        if (ext == ".csv")
            spec.format = "csv";
        else if (ext == ".geojson" || ext == ".json")
            spec.format = "geojson";
        else
            throw Error(ErrorKind::validation,
                        "cannot infer format of layer '" + spec.name + "' from '" + spec.path + "'; append :csv or :geojson");
    }
    return spec;
}

inline ReferenceLayer load_layer(const LayerSpec& spec)
{
    const std::string bytes = read_file(spec.path);
    try {
        if (spec.format == "csv")
            return load_csv(bytes, spec.name);
        return load_geojson(bytes, spec.name);
    } catch (const Error& e) {
        throw e.with_context(spec.path);
    }
}

inline Catalog load_catalog(const std::vector<std::string>& layer_args)
{
    Catalog catalog;
    for (const auto& arg : layer_args)
        catalog.add(load_layer(parse_layer_spec(arg)));
    catalog.seal();
    return catalog;
}

inline SpellBook load_spellbook(const std::string& path)
{
    const std::string bytes = read_file(path);
    try {
        return from_json(bytes);
    } catch (const Error& e) {
        throw e.with_context(path);
    }
}

inline std::map<std::string, std::string> parse_bindings(const std::vector<std::string>& args)
{
    std::map<std::string, std::string> out;
    for (const auto& a : args) {
        const std::size_t eq = a.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == a.size())
            throw Error(ErrorKind::validation, "--source-table expects layer=table, got '" + a + "'");
        out[a.substr(0, eq)] = a.substr(eq + 1);
    }
    return out;
}

struct CastArgs {
    std::vector<std::string> layers;
    std::string input;
    std::string lon_col = "lon";
    std::string lat_col = "lat";
    std::string id_col = "row_id";
    std::string spellbook;
    std::string output;
    std::string format = "csv";
    std::size_t parallelism = 1;
};

inline int cmd_cast(const CastArgs& args, std::ostream& out)
{
    const SpellBook book = load_spellbook(args.spellbook);
    const Catalog catalog = load_catalog(args.layers);
    PointDataset dataset;
    {
        const std::string bytes = read_file(args.input);
        try {
            dataset = read_points_csv(bytes, {args.lon_col, args.lat_col, args.id_col});
        } catch (const Error& e) {
            throw e.with_context(args.input);
        }
    }
    const FeatureMatrix matrix = cast_all(book, dataset, catalog, {args.parallelism});
    const std::string text = args.format == "geojson" ? to_geojson(matrix) : to_csv(matrix);
    write_file_atomic(args.output, text);
    out << "wrote " << matrix.rows() << " rows x " << matrix.features.size() << " features to " << args.output
        << "\n";
    return kExitOk;
}

struct CompileArgs {
    std::string spellbook;
    std::string dburl;
    std::vector<std::string> source_tables;
    std::string points_table = "points";
};

/// Every spell's SQL under a `-- spell: <feature_name>` header, blank-line separated.
inline std::string compile_book(const SpellBook& book, Dialect dialect,
                                const std::map<std::string, std::string>& bindings, const std::string& points_table)
{
    std::string text;
    for (std::size_t i = 0; i < book.spells.size(); ++i) {
        const Spell& spell = book.spells[i];
        const auto bound = bindings.find(spell.layer);
        const std::string& table = bound == bindings.end() ? spell.layer : bound->second;
        CompiledQuery q;
        try {
            q = compile(spell, dialect, table, points_table);
        } catch (const Error& e) {
            throw Error(e.kind(), "spell " + std::to_string(i) + ": " + e.detail());
        }
        if (i)
            text += "\n";
        text += "-- spell: " + spell.feature_name + "\n" + q.sql;
    }
    return text;
}

inline int cmd_compile(const CompileArgs& args, std::ostream& out)
{
    const ConnectionSpec conn = parse_dburl(args.dburl);
    const SpellBook book = load_spellbook(args.spellbook);
    out << compile_book(book, conn.dialect(), parse_bindings(args.source_tables), args.points_table);
    return kExitOk;
}

inline int cmd_validate(const std::string& path, std::ostream& out)
{
    const std::string bytes = read_file(path);
    SpellBook book;
    try {
        book = parse_spellbook(bytes);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::io)
            throw;
        out << path << ": " << e.detail() << "\n";
        return kExitInvalid;
    }
    const auto diags = validate(book);
    for (const auto& d : diags)
        out << path << ": " << d.to_string() << "\n";
    return diags.empty() ? kExitOk : kExitInvalid;
}

inline int cmd_ingest_check(const std::vector<std::string>& layer_args, std::ostream& out)
{
    if (layer_args.empty())
        throw Error(ErrorKind::validation, "ingest-check needs at least one --layer");
    for (const auto& arg : layer_args) {
        const LayerSpec spec = parse_layer_spec(arg);
        const ReferenceLayer layer = load_layer(spec);
        out << spec.name << ": " << layer.entries.size() << " " << to_string(layer.kind) << " entries from "
            << spec.path << "\n";
    }
    return kExitOk;
}

inline int cmd_bench(const BenchConfig& config, std::ostream& out)
{
    const BenchReport report = run_bench(config);
    out << report.machine_line() << "\n" << report.summary() << "\n";
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Geospatial feature engineering: cast spellbooks over point datasets"};
    app.set_config("--config", "", "TOML/INI file with default option values; command-line flags win");
    app.require_subcommand(1);

    CastArgs cast_args;
    auto* cast_cmd = app.add_subcommand("cast", "Cast a spellbook over a point dataset");
    cast_cmd->add_option("--layer", cast_args.layers, "Reference layer name=path[:csv|geojson] (repeatable)");
    cast_cmd->add_option("--input", cast_args.input, "Point dataset CSV")->required();
    cast_cmd->add_option("--lon-col", cast_args.lon_col, "Longitude column")->capture_default_str();
    cast_cmd->add_option("--lat-col", cast_args.lat_col, "Latitude column")->capture_default_str();
    cast_cmd->add_option("--id-col", cast_args.id_col, "Row id column (row index when absent)")->capture_default_str();
    cast_cmd->add_option("--spellbook", cast_args.spellbook, "SpellBook JSON")->required();
    cast_cmd->add_option("--output", cast_args.output, "Output path")->required();
    cast_cmd->add_option("--format", cast_args.format, "Output format")
        ->check(CLI::IsMember({"csv", "geojson"}))
        ->capture_default_str();
    cast_cmd->add_option("--parallelism", cast_args.parallelism, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    CompileArgs compile_args;
    auto* compile_cmd = app.add_subcommand("compile", "Print warehouse SQL for each spell");
    compile_cmd->add_option("--spellbook", compile_args.spellbook, "SpellBook JSON")->required();
    compile_cmd->add_option("--dburl", compile_args.dburl, "Database URL selecting the dialect")->required();
    compile_cmd->add_option("--source-table", compile_args.source_tables, "Layer binding layer=table (repeatable)");
    compile_cmd->add_option("--points-table", compile_args.points_table, "Table holding the input points")
        ->capture_default_str();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a spellbook and print diagnostics");
    validate_cmd->add_option("--spellbook,spellbook", validate_path, "SpellBook JSON")->required();

    BenchConfig bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time cast_all on synthetic data");
    bench_cmd->add_option("--points", bench.points, "Dataset points N")->capture_default_str();
    bench_cmd->add_option("--entries", bench.entries, "Layer entries M")->capture_default_str();
    bench_cmd->add_option("--spells", bench.spells, "Spells S")->capture_default_str();
    bench_cmd->add_option("--parallelism", bench.parallelism, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "RNG seed")->capture_default_str();

    std::vector<std::string> check_layers;
    auto* check_cmd = app.add_subcommand("ingest-check", "Parse layer files without casting");
    check_cmd->add_option("--layer", check_layers, "Reference layer name=path[:csv|geojson] (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (*cast_cmd)
            return cmd_cast(cast_args, out);
        if (*compile_cmd)
            return cmd_compile(compile_args, out);
        if (*validate_cmd)
            return cmd_validate(validate_path, out);
        if (*bench_cmd)
            return cmd_bench(bench, out);
        if (*check_cmd)
            return cmd_ingest_check(check_layers, out);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

} // namespace geomancer::cli
