#pragma once

// A Spell is one logical feature: a function from a coordinate to a scalar,
// parameterised by a reference layer, a tag filter, and a radius or cap.

#include "geomancer/error.hpp"
#include "geomancer/filter.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geomancer {

enum class SpellKind { distance_to_nearest, number_of, length_of };

inline constexpr std::array<SpellKind, 3> kAllSpellKinds{SpellKind::distance_to_nearest, SpellKind::number_of,
                                                         SpellKind::length_of};

constexpr std::string_view to_string(SpellKind kind)
{
    switch (kind) {
    case SpellKind::distance_to_nearest: return "DistanceToNearest";
    case SpellKind::number_of: return "NumberOf";
    case SpellKind::length_of: return "LengthOf";
    }
    return "";
}

inline std::optional<SpellKind> spell_kind_from_string(std::string_view name)
{
    for (SpellKind k : kAllSpellKinds)
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

inline std::string supported_spell_kinds()
{
    std::string out;
    for (SpellKind k : kAllSpellKinds)
        out += (out.empty() ? "" : ", ") + std::string(to_string(k));
    return "{" + out + "}";
}

/// Name of the distance parameter as it appears in SpellBook JSON.
constexpr std::string_view param_name(SpellKind kind)
{
    return kind == SpellKind::distance_to_nearest ? "cap" : "radius";
}

inline constexpr double kDefaultCapM = 10'000.0;

struct Spell {
    SpellKind kind = SpellKind::distance_to_nearest;
    TagFilter filter;
    std::string layer;
    std::string feature_name;
    /// Search cap for DistanceToNearest, disc radius for NumberOf/LengthOf.
    double radius_m = kDefaultCapM;

    friend bool operator==(const Spell&, const Spell&) = default;
};

/// "dist_"/"num_"/"len_" + tag for single-comparison filters.
inline std::string default_feature_name(SpellKind kind, const TagFilter& filter)
{
    const auto tag = filter.single_tag();
    if (!tag)
        throw Error(ErrorKind::validation, "filter '" + filter.to_string() +
                                               "' has no single tag; an explicit feature_name is required");
    switch (kind) {
    case SpellKind::distance_to_nearest: return "dist_" + *tag;
    case SpellKind::number_of: return "num_" + *tag;
    case SpellKind::length_of: return "len_" + *tag;
    }
    return *tag;
}

inline bool is_identifier(std::string_view s, bool allow_dots = false)
{
    if (s.empty())
        return false;
    auto start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    if (!start(s.front()))
        return false;
    for (char c : s.substr(1))
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (allow_dots && c == '.')))
            return false;
    return true;
}

namespace detail {

inline Spell make_spell(SpellKind kind, TagFilter filter, std::string layer, double radius_m,
                        std::string feature_name)
{
    if (feature_name.empty())
        feature_name = default_feature_name(kind, filter);
    return Spell{kind, std::move(filter), std::move(layer), std::move(feature_name), radius_m};
}

} // namespace detail

inline Spell distance_to_nearest(TagFilter filter, std::string layer, std::string feature_name = {},
                                 double cap_m = kDefaultCapM)
{
    return detail::make_spell(SpellKind::distance_to_nearest, std::move(filter), std::move(layer), cap_m,
                              std::move(feature_name));
}

inline Spell number_of(TagFilter filter, std::string layer, double radius_m, std::string feature_name = {})
{
    return detail::make_spell(SpellKind::number_of, std::move(filter), std::move(layer), radius_m,
                              std::move(feature_name));
}

inline Spell length_of(TagFilter filter, std::string layer, double radius_m, std::string feature_name = {})
{
    return detail::make_spell(SpellKind::length_of, std::move(filter), std::move(layer), radius_m,
                              std::move(feature_name));
}

/// Invariant violations of a single spell, independent of any catalog.
inline std::vector<std::string> spell_problems(const Spell& spell)
{
    std::vector<std::string> problems;
    if (!is_identifier(spell.feature_name))
        problems.push_back("feature_name '" + spell.feature_name + "' must match [A-Za-z_][A-Za-z0-9_]*");
    if (!(spell.radius_m > 0.0) || !std::isfinite(spell.radius_m))
        problems.push_back(std::string(param_name(spell.kind)) + " must be positive and finite");
    if (spell.layer.empty())
        problems.push_back("layer must be non-empty");
    return problems;
}

} // namespace geomancer
