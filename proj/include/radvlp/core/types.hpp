/**
 * @file types.hpp
 * @brief Domain value types shared by the de-identification, curation and
 *        evaluation modules.
 */

#pragma once

#include "radvlp/core/date.hpp"
#include "radvlp/core/error.hpp"
#include "radvlp/core/text.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radvlp {

/**
 * @brief The nine kinds of protected health information.
 *
 * Declaration order is the reporting order of the metrics table, and the
 * underlying values index per-category arrays throughout the code base.
 */
enum class PhiCategory : std::uint8_t {
    PatientName = 0,
    PersonName,
    Location,
    Institution,
    Date,
    Age,
    IdNumber,
    PhoneNumber,
    UrlEmail,
};

inline constexpr std::size_t kPhiCategoryCount = 9;

inline constexpr std::array<PhiCategory, kPhiCategoryCount> kAllPhiCategories{
    PhiCategory::PatientName, PhiCategory::PersonName, PhiCategory::Location,
    PhiCategory::Institution, PhiCategory::Date,       PhiCategory::Age,
    PhiCategory::IdNumber,    PhiCategory::PhoneNumber, PhiCategory::UrlEmail,
};

constexpr std::size_t index_of(PhiCategory c) noexcept { return static_cast<std::size_t>(c); }

/// Identifier used in JSON files ("PatientName", ...).
constexpr std::string_view category_name(PhiCategory c) noexcept {
    constexpr std::array<std::string_view, kPhiCategoryCount> names{
        "PatientName", "PersonName", "Location", "Institution", "Date",
        "Age",         "IdNumber",   "PhoneNumber", "UrlEmail",
    };
    return names[index_of(c)];
}

/// Row label of the metrics table.
constexpr std::string_view category_label(PhiCategory c) noexcept {
    constexpr std::array<std::string_view, kPhiCategoryCount> labels{
        "Patient names", "Person names", "Locations",     "Institutions", "Dates",
        "Ages",          "ID numbers",   "Phone numbers", "URL/e-mails",
    };
    return labels[index_of(c)];
}

inline PhiCategory parse_category(std::string_view name) {
    for (PhiCategory c : kAllPhiCategories) {
        if (category_name(c) == name) return c;
    }
    throw InputError("unknown PHI category '" + std::string(name) + "'");
}

/// Annotated stretch of text; offsets are code points, end exclusive.
struct PhiSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    PhiCategory category = PhiCategory::PatientName;
    std::string surface;

    std::size_t length() const noexcept { return end - start; }
    bool overlaps(const PhiSpan& o) const noexcept { return start < o.end && o.start < end; }

    friend bool operator==(const PhiSpan&, const PhiSpan&) = default;
};

/// Checks 0 <= start < end <= |text| and that the surface matches the slice.
inline bool span_is_consistent(const PhiSpan& s, std::u32string_view text) {
    if (s.start >= s.end || s.end > text.size()) return false;
    return text::encode_utf8(text.substr(s.start, s.end - s.start)) == s.surface;
}

struct PersonNameParts {
    std::string first;
    std::string last;

    friend bool operator==(const PersonNameParts&, const PersonNameParts&) = default;
};

struct RawDocument {
    std::string doc_id;
    std::string patient_id;
    CalendarDate date;
    std::string text;
    std::vector<PersonNameParts> known_patient_names;
    /// Seconds since midnight; only used when pairing reports with studies.
    std::optional<std::int32_t> timestamp;
};

struct AppliedReplacement {
    PhiSpan original;          // offsets into the source text
    std::string replacement;
    std::size_t out_start = 0;  // offsets of the replacement in the rewritten text
    std::size_t out_end = 0;
};

struct DeidDocument {
    std::string doc_id;
    std::string pseudo_patient_id;
    CalendarDate date;
    std::string text;
    std::vector<AppliedReplacement> applied;
};

struct StudyRecord {
    std::string study_id;
    std::string patient_id;
    CalendarDate date;
    std::optional<std::int32_t> timestamp;
    std::vector<std::string> image_ids;
    /// Insertion-ordered key/value metadata.
    std::vector<std::pair<std::string, std::string>> metadata;
};

}  // namespace radvlp
