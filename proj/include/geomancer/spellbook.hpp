#pragma once

// SpellBook: an ordered, versioned, shareable collection of spells.
//
// JSON layout (keys always in this order, two-space indent, trailing newline):
//
//   {
//     "schema_version": 1,
//     "author": "...",
//     "description": "...",
//     "spells": [
//       {"kind": "DistanceToNearest", "filter": "fclass=embassy",
//        "layer": "pois", "feature_name": "dist_embassy", "params": {"cap": 10000.0}}
//     ]
//   }

#include "geomancer/spell.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace geomancer {

inline constexpr int kSchemaVersion = 1;

struct SpellBook {
    int schema_version = kSchemaVersion;
    std::string author;
    std::string description;
    std::vector<Spell> spells;

    SpellBook& add(Spell spell)
    {
        spells.push_back(std::move(spell));
        return *this;
    }

    friend bool operator==(const SpellBook&, const SpellBook&) = default;
};

struct Diagnostic {
    /// Index of the offending spell; nullopt for book-level problems.
    std::optional<std::size_t> spell_index;
    std::string message;

    std::string to_string() const
    {
        if (spell_index)
            return "spell " + std::to_string(*spell_index) + ": " + message;
        return "spellbook: " + message;
    }
};

inline std::vector<Diagnostic> validate(const SpellBook& book)
{
    std::vector<Diagnostic> out;
    if (book.schema_version != kSchemaVersion)
        out.push_back({std::nullopt, "unsupported schema_version " + std::to_string(book.schema_version)});

    std::map<std::string, std::vector<std::size_t>> by_name;
    for (std::size_t i = 0; i < book.spells.size(); ++i) {
        for (auto& problem : spell_problems(book.spells[i]))
            out.push_back({i, std::move(problem)});
        by_name[book.spells[i].feature_name].push_back(i);
    }
    for (const auto& [name, indices] : by_name) {
        if (indices.size() < 2)
            continue;
        std::string list;
        for (std::size_t i : indices)
            list += (list.empty() ? "" : ", ") + std::to_string(i);
        out.push_back({indices.front(), "duplicate feature_name '" + name + "' used by spells " + list});
    }
    return out;
}

namespace detail {

inline std::string join_diagnostics(const std::vector<Diagnostic>& diags)
{
    std::string out;
    for (const auto& d : diags)
        out += (out.empty() ? "" : "; ") + d.to_string();
    return out;
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where)
{
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            throw Error(ErrorKind::schema, where + ": unknown key '" + key + "'");
    }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        throw Error(ErrorKind::schema, where + ": missing key '" + key + "'");
    return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (!v.is_string())
        throw Error(ErrorKind::schema, where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

inline Spell spell_from_json(const nlohmann::json& j, std::size_t index)
{
    const std::string where = "spell " + std::to_string(index);
    if (!j.is_object())
        throw Error(ErrorKind::schema, where + ": must be an object");
    reject_unknown_keys(j, {"kind", "filter", "layer", "feature_name", "params"}, where);

    const std::string kind_name = require_string(j, "kind", where);
    const auto kind = spell_kind_from_string(kind_name);
    if (!kind)
        throw Error(ErrorKind::schema,
                    where + ": unknown kind '" + kind_name + "', supported kinds are " + supported_spell_kinds());

    Spell spell;
    spell.kind = *kind;
    try {
        spell.filter = parse_filter(require_string(j, "filter", where));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::parse)
            throw;
        throw Error(ErrorKind::parse, where + ": " + e.detail());
    }
    spell.layer = require_string(j, "layer", where);

    if (j.contains("feature_name"))
        spell.feature_name = require_string(j, "feature_name", where);
    else
        try {
            spell.feature_name = default_feature_name(spell.kind, spell.filter);
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, where + ": " + e.detail());
        }

    const std::string pname(param_name(spell.kind));
    const auto params = j.find("params");
    if (params == j.end()) {
        if (spell.kind != SpellKind::distance_to_nearest)
            throw Error(ErrorKind::schema, where + ": missing 'params' with '" + pname + "'");
        spell.radius_m = kDefaultCapM;
    } else {
        if (!params->is_object())
            throw Error(ErrorKind::schema, where + ": 'params' must be an object");
        reject_unknown_keys(*params, {pname}, where + " params");
        const auto v = params->find(pname);
        if (v == params->end()) {
            if (spell.kind != SpellKind::distance_to_nearest)
                throw Error(ErrorKind::schema, where + ": params lacks '" + pname + "'");
            spell.radius_m = kDefaultCapM;
        } else {
            if (!v->is_number())
                throw Error(ErrorKind::schema, where + ": '" + pname + "' must be a number");
            spell.radius_m = v->get<double>();
        }
    }
    return spell;
}

} // namespace detail

/// Parses structure only; invariants are left for validate().
inline SpellBook parse_spellbook(std::string_view bytes)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, "invalid JSON at byte offset " + std::to_string(e.byte == 0 ? 0 : e.byte - 1));
    }
    if (!doc.is_object())
        throw Error(ErrorKind::schema, "spellbook must be a JSON object");
    detail::reject_unknown_keys(doc, {"schema_version", "author", "description", "spells"}, "spellbook");

    SpellBook book;
    const auto& version = detail::require(doc, "schema_version", "spellbook");
    if (!version.is_number_integer())
        throw Error(ErrorKind::schema, "spellbook: 'schema_version' must be an integer");
    const auto v = version.get<long long>();
    if (v != kSchemaVersion)
        throw Error(ErrorKind::schema, "unsupported schema_version " + std::to_string(v));
    book.schema_version = static_cast<int>(v);

    if (doc.contains("author"))
        book.author = detail::require_string(doc, "author", "spellbook");
    if (doc.contains("description"))
        book.description = detail::require_string(doc, "description", "spellbook");

    const auto& spells = detail::require(doc, "spells", "spellbook");
    if (!spells.is_array())
        throw Error(ErrorKind::schema, "spellbook: 'spells' must be an array");
    for (std::size_t i = 0; i < spells.size(); ++i)
        book.spells.push_back(detail::spell_from_json(spells[i], i));
    return book;
}

inline SpellBook from_json(std::string_view bytes)
{
    SpellBook book = parse_spellbook(bytes);
    if (const auto diags = validate(book); !diags.empty())
        throw Error(ErrorKind::validation, detail::join_diagnostics(diags));
    return book;
}

inline std::string to_json(const SpellBook& book)
{
    if (const auto diags = validate(book); !diags.empty())
        throw Error(ErrorKind::validation, detail::join_diagnostics(diags));

    nlohmann::ordered_json doc;
    doc["schema_version"] = book.schema_version;
    doc["author"] = book.author;
    doc["description"] = book.description;
    doc["spells"] = nlohmann::ordered_json::array();
    for (const auto& s : book.spells) {
        nlohmann::ordered_json spell;
        spell["kind"] = std::string(to_string(s.kind));
        spell["filter"] = s.filter.to_string();
        spell["layer"] = s.layer;
        spell["feature_name"] = s.feature_name;
        spell["params"][std::string(param_name(s.kind))] = s.radius_m;
        doc["spells"].push_back(std::move(spell));
    }
    try {
        return doc.dump(2) + "\n";
    } catch (const nlohmann::json::type_error& e) {
        throw Error(ErrorKind::validation, std::string("spellbook text is not valid UTF-8: ") + e.what());
    }
}

} // namespace geomancer
