/**
 * @file detector_config.hpp
 * @brief Configuration of the rule-based PHI detector.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/types.hpp"
#include "radvlp/deid/lexicon.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace radvlp::deid {

/// French month names and abbreviations, numbered 1..12.
struct MonthName {
    std::u32string_view name;
    int month;
    bool abbreviation;
};

inline constexpr std::array<MonthName, 31> kFrenchMonths{{
    {U"janvier", 1, false},  {U"février", 2, false}, {U"fevrier", 2, false},  {U"mars", 3, false},
    {U"avril", 4, false},    {U"mai", 5, false},     {U"juin", 6, false},     {U"juillet", 7, false},
    {U"août", 8, false},     {U"aout", 8, false},    {U"septembre", 9, false}, {U"octobre", 10, false},
    {U"novembre", 11, false}, {U"décembre", 12, false}, {U"decembre", 12, false}, {U"janv", 1, true},
    {U"jan", 1, true},       {U"févr", 2, true},     {U"fevr", 2, true},      {U"fév", 2, true},
    {U"fev", 2, true},       {U"avr", 4, true},      {U"juil", 7, true},      {U"sept", 9, true},
    {U"sep", 9, true},       {U"oct", 10, true},     {U"nov", 11, true},      {U"déc", 12, true},
    {U"dec", 12, true},      {U"mar", 3, true},       {U"aoû", 8, true},
}};

/// Month number for a normalized month token, or 0.
inline int month_number(std::u32string_view normalized) {
    for (const MonthName& m : kFrenchMonths) {
        if (m.name == normalized) return m.month;
    }
    return 0;
}

inline Lexicon default_month_lexicon() {
    Lexicon lex("months");
    for (const MonthName& m : kFrenchMonths) lex.add(text::encode_utf8(m.name));
    return lex;
}

inline std::vector<std::string> default_title_triggers() {
    return {"Dr", "Docteur", "Pr", "Professeur", "Monsieur", "Madame", "M.", "Mme", "Mlle"};
}

/// Highest precedence first.
inline std::array<PhiCategory, kPhiCategoryCount> default_category_precedence() {
    return {PhiCategory::PatientName, PhiCategory::PersonName,  PhiCategory::IdNumber,
            PhiCategory::Date,        PhiCategory::PhoneNumber, PhiCategory::UrlEmail,
            PhiCategory::Age,         PhiCategory::Institution, PhiCategory::Location};
}

struct DetectorConfig {
    Lexicon first_names{"first_names"};
    Lexicon last_names{"last_names"};
    Lexicon cities{"cities"};
    Lexicon institutions{"institutions"};
    Lexicon months = default_month_lexicon();
    int min_id_digits = 7;
    std::vector<std::string> title_triggers = default_title_triggers();
    std::array<PhiCategory, kPhiCategoryCount> category_precedence = default_category_precedence();

    /// Rank of a category in the precedence order; lower rank wins.
    std::size_t rank(PhiCategory c) const {
        for (std::size_t i = 0; i < category_precedence.size(); ++i) {
            if (category_precedence[i] == c) return i;
        }
        return category_precedence.size();
    }

    void validate() const {
        std::array<bool, kPhiCategoryCount> seen{};
        for (PhiCategory c : category_precedence) {
            if (seen[index_of(c)]) throw InputError("category_precedence lists a category twice");
            seen[index_of(c)] = true;
        }
        if (min_id_digits < 1) throw InputError("min_id_digits must be >= 1");
    }
};

namespace detail {

inline Lexicon load_lexicon_field(const io::json& j, const std::string& name, const std::filesystem::path& base) {
    std::vector<Lexicon> parts;
    auto load_one = [&](const io::json& p) {
        if (!p.is_string()) throw InputError("lexicon path for '" + name + "' must be a string");
        std::filesystem::path path(p.get<std::string>());
        if (path.is_relative()) path = base / path;
        parts.push_back(load_lexicon(path.string(), name));
    };
    if (j.is_array()) {
        for (const auto& p : j) load_one(p);
    } else {
        load_one(j);
    }
    std::vector<const Lexicon*> ptrs;
    for (const auto& p : parts) ptrs.push_back(&p);
    return merge_lexicons(name, ptrs);
}

}  // namespace detail

/**
 * @brief Builds a DetectorConfig from its JSON form.
 *
 * Lexicon paths may be a string or an array of strings and are resolved
 * relative to @p base_dir. Missing keys keep their defaults.
 */
inline DetectorConfig detector_config_from_json(const io::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw InputError("detector config must be a JSON object");
    DetectorConfig cfg;
    if (const auto it = j.find("lexicons"); it != j.end()) {
        if (!it->is_object()) throw InputError("detector.lexicons must be an object");
        for (const auto& [key, value] : it->items()) {
            if (key == "first_names") cfg.first_names = detail::load_lexicon_field(value, key, base_dir);
            else if (key == "last_names") cfg.last_names = detail::load_lexicon_field(value, key, base_dir);
            else if (key == "cities") cfg.cities = detail::load_lexicon_field(value, key, base_dir);
            else if (key == "institutions") cfg.institutions = detail::load_lexicon_field(value, key, base_dir);
            else if (key == "months") cfg.months = detail::load_lexicon_field(value, key, base_dir);
            else throw InputError("unknown detector lexicon '" + key + "'");
        }
    }
    if (const auto it = j.find("min_id_digits"); it != j.end()) cfg.min_id_digits = it->get<int>();
    if (const auto it = j.find("title_triggers"); it != j.end()) {
        cfg.title_triggers = it->get<std::vector<std::string>>();
    }
    if (const auto it = j.find("category_precedence"); it != j.end()) {
        const auto names = it->get<std::vector<std::string>>();
        if (names.size() != kPhiCategoryCount) {
            throw InputError("category_precedence must list all 9 categories exactly once");
        }
        for (std::size_t i = 0; i < names.size(); ++i) cfg.category_precedence[i] = parse_category(names[i]);
    }
    cfg.validate();
    return cfg;
}

inline DetectorConfig load_detector_config(const std::string& path) {
    const io::json j = io::read_json_file(path);
    return detector_config_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace radvlp::deid
