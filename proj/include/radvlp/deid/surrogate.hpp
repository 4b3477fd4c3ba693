/**
 * @file surrogate.hpp
 * @brief Rewrites detected PHI with consistent fictitious values.
 *
 * Each patient owns a random stream, a date offset, a pseudo identifier and
 * a replacement table. Documents of one patient are processed in doc_id
 * order, so the output only depends on (corpus, policy, master seed).
 */

#pragma once

#include "radvlp/core/date.hpp"
#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/parallel.hpp"
#include "radvlp/core/rng.hpp"
#include "radvlp/core/text.hpp"
#include "radvlp/core/types.hpp"
#include "radvlp/deid/detect.hpp"
#include "radvlp/deid/detector_config.hpp"
#include "radvlp/deid/lexicon.hpp"
#include "radvlp/deid/rules.hpp"
#include "radvlp/deid/tokens.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace radvlp::deid {

enum class AgeMode { Keep, Jitter };

struct AgePolicy {
    AgeMode mode = AgeMode::Keep;
    int jitter = 0;  // max absolute change in years for Jitter
};

struct SurrogateLexicons {
    Lexicon female_first_names{"first_names_female"};
    Lexicon male_first_names{"first_names_male"};
    Lexicon last_names{"last_names"};
    Lexicon cities{"cities"};
    Lexicon institutions{"institutions"};
};

struct SurrogatePolicy {
    std::uint64_t master_seed = 0;
    std::int64_t shift_low = -1000;
    std::int64_t shift_high = 1000;
    std::set<PhiCategory> removal_categories{PhiCategory::PhoneNumber, PhiCategory::UrlEmail};
    AgePolicy age;
    SurrogateLexicons lexicons;

    void validate() const {
        if (shift_low > shift_high) throw InputError("surrogate policy: date_shift_range low > high");
        if (age.mode == AgeMode::Jitter && age.jitter < 1) throw InputError("surrogate policy: jitter must be >= 1");
        if (lexicons.last_names.empty() || lexicons.cities.empty() || lexicons.institutions.empty() ||
            (lexicons.female_first_names.empty() && lexicons.male_first_names.empty())) {
            throw InputError("surrogate policy: replacement lexicons must not be empty");
        }
    }
};

struct PatientSurrogates {
    std::int64_t date_offset_days = 0;
    std::string pseudo_id;
    /// (category, normalized original) -> replacement as first rendered.
    std::map<std::pair<PhiCategory, std::string>, std::string> replacements;
    /// (category, normalized replacement) already handed out.
    std::set<std::pair<PhiCategory, std::string>> used;
    /// Normalized original name tokens of this patient; never used as replacements.
    std::set<std::string> reserved;
    RandomStream stream;
};

struct SurrogateMap {
    std::map<std::string, PatientSurrogates> patients;
};

namespace surrogate_detail {

inline constexpr std::size_t kSampleTries = 64;

inline std::string key_of(std::u32string_view s) { return text::encode_utf8(text::normalize_key(s)); }
inline std::string key_of(std::string_view s) { return text::normalize_key(s); }

inline std::int64_t draw_offset(RandomStream& rng, std::int64_t lo, std::int64_t hi) {
    if (lo == 0 && hi == 0) return 0;
    if (lo <= 0 && hi >= 0) {
        const std::int64_t x = rng.between(lo, hi - 1);
        return x >= 0 ? x + 1 : x;
    }
    return rng.between(lo, hi);
}

inline std::size_t draw_index(const Lexicon& lex, RandomStream& rng) {
    if (!lex.weighted()) return static_cast<std::size_t>(rng.below(lex.size()));
    std::vector<double> w(lex.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = lex.weight(i);
    return rng.weighted(w);
}

/// Matches the casing of @p like: all caps stays all caps, otherwise the display form.
inline std::u32string recase(std::u32string_view display, std::u32string_view like) {
    std::size_t letters = 0;
    for (const char32_t c : like) letters += text::is_letter(c) ? 1 : 0;
    if (letters > 1 && text::is_all_upper(like)) return text::uppercase(display);
    if (!like.empty() && text::is_lower(like.front())) return text::lowercase(display);
    return std::u32string(display);
}

inline std::u32string syllable_name(RandomStream& rng) {
    static constexpr std::u32string_view kConsonants = U"bcdfghjklmnprstvz";
    static constexpr std::u32string_view kVowels = U"aeiou";
    std::u32string out;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t i = 0; i < syllables; ++i) {
        out += kConsonants[rng.below(kConsonants.size())];
        out += kVowels[rng.below(kVowels.size())];
    }
    out.front() = text::to_upper(out.front());
    return out;
}

/// True if any letter run of @p cand ("Saint-Jean" has two) is a reserved name token.
inline bool has_reserved_word(const PatientSurrogates& p, std::u32string_view cand) {
    std::size_t i = 0;
    while (i < cand.size()) {
        if (!text::is_letter(cand[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cand.size() && (text::is_letter(cand[j]) || text::is_combining_mark(cand[j]))) ++j;
        if (p.reserved.count(key_of(cand.substr(i, j - i)))) return true;
        i = j;
    }
    return p.reserved.count(key_of(cand)) > 0;
}

/**
 * Draws a lexicon entry that differs from @p original_key, has not been
 * handed out in @p cls yet and contains no reserved word. After kSampleTries failures
 * either a generated name (injective) or any entry differing from the
 * original is returned.
 */
inline std::u32string sample_distinct(PatientSurrogates& p, PhiCategory cls, const Lexicon& lex,
                                      const std::string& original_key, bool injective) {
    if (!lex.empty()) {
        for (std::size_t t = 0; t < kSampleTries; ++t) {
            const std::u32string cand = text::decode_utf8(lex.display()[draw_index(lex, p.stream)]);
            const std::string k = key_of(cand);
            if (k == original_key || has_reserved_word(p, cand) || p.used.count({cls, k})) continue;
            return cand;
        }
    }
    if (injective) {
        for (std::size_t t = 0; t < 1000; ++t) {
            std::u32string cand = syllable_name(p.stream);
            const std::string k = key_of(cand);
            if (k == original_key || has_reserved_word(p, cand) || p.used.count({cls, k})) continue;
            return cand;
        }
        throw ComputeError("could not generate a distinct surrogate name");
    }
    for (std::size_t t = 0; t < 1000 && lex.size() > 1; ++t) {
        const std::u32string cand = text::decode_utf8(lex.display()[draw_index(lex, p.stream)]);
        if (key_of(cand) != original_key && !has_reserved_word(p, cand)) return cand;
    }
    for (;;) {
        std::u32string cand = syllable_name(p.stream);
        if (!has_reserved_word(p, cand)) return cand;
    }
}

/// Replacement cached under (cls, key); @p make is only called the first time.
template <typename Make>
std::u32string remembered(PatientSurrogates& p, PhiCategory cls, const std::string& key, Make&& make) {
    if (const auto it = p.replacements.find({cls, key}); it != p.replacements.end()) {
        return text::decode_utf8(it->second);
    }
    std::u32string value = make();
    p.replacements.emplace(std::pair{cls, key}, text::encode_utf8(value));
    p.used.insert({cls, key_of(value)});
    return value;
}

inline std::u32string random_digits(RandomStream& rng, std::size_t n, bool leading_nonzero) {
    std::u32string out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool first = i == 0 && leading_nonzero && n > 1;
        out += static_cast<char32_t>(U'0' + (first ? 1 + rng.below(9) : rng.below(10)));
    }
    return out;
}

// --- names -------------------------------------------------------------------

enum class Gender { Unknown, Female, Male };

/// Gender implied by the title immediately before @p start, if any.
inline Gender title_gender(std::u32string_view text, std::size_t start) {
    std::size_t i = start;
    while (i > 0 && text::is_space(text[i - 1])) --i;
    if (i == start) return Gender::Unknown;
    const bool dotted = i > 0 && text[i - 1] == U'.';
    if (dotted) --i;
    std::size_t b = i;
    while (b > 0 && text::is_letter(text[b - 1])) --b;
    const std::u32string_view word = text.substr(b, i - b);
    if (word.empty()) return Gender::Unknown;
    if (word == U"M" && dotted) return Gender::Male;
    const std::u32string low = text::lowercase(word);
    if (low == U"monsieur") return Gender::Male;
    if (low == U"mme" || low == U"madame" || low == U"mlle" || low == U"mademoiselle") return Gender::Female;
    return Gender::Unknown;
}

inline bool is_name_particle(std::u32string_view word) {
    const std::u32string low = text::lowercase(word);
    const auto& words = rules::detail::name_particles().words;
    return std::find(words.begin(), words.end(), low) != words.end();
}

struct NameContext {
    Gender title = Gender::Unknown;
    std::set<std::string> known_first;  // normalized tokens of known first names
    std::set<std::string> known_last;
};

inline std::u32string replace_name_span(PatientSurrogates& p, const SurrogateLexicons& lex, std::u32string_view surface,
                                        const NameContext& ctx) {
    const std::vector<Token> toks = tokenize(surface);
    std::vector<std::size_t> words;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind == TokenKind::Word) words.push_back(i);
    }
    std::u32string out;
    std::size_t cursor = 0;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const Token& t = toks[words[w]];
        const std::u32string_view word = surface.substr(t.start, t.end - t.start);
        out.append(surface.substr(cursor, t.start - cursor));
        cursor = t.end;

        const bool initial = word.size() == 1 && t.end < surface.size() && surface[t.end] == U'.';
        if (initial) {
            const std::string k = key_of(word) + ".";
            out += remembered(p, PhiCategory::PersonName, k, [&] {
                char32_t c;
                do {
                    c = static_cast<char32_t>(U'A' + p.stream.below(26));
                } while (text::to_lower(c) == text::to_lower(word.front()));
                return std::u32string(1, c);
            });
            continue;
        }
        if (words.size() > 1 && is_name_particle(word)) {
            out.append(word);
            continue;
        }
        const std::string k = key_of(word);
        const bool more_names_follow = std::any_of(words.begin() + static_cast<std::ptrdiff_t>(w) + 1, words.end(),
                                                   [&](std::size_t j) {
                                                       const Token& u = toks[j];
                                                       return !is_name_particle(surface.substr(u.start, u.end - u.start));
                                                   });
        const std::u32string nk = text::normalize_key(word);
        const bool in_female = lex.female_first_names.contains(nk);
        const bool in_male = lex.male_first_names.contains(nk);
        const bool first = ctx.known_first.count(k) ||
                           (!ctx.known_last.count(k) && (in_female || in_male) && more_names_follow);
        const std::u32string rep = remembered(p, PhiCategory::PersonName, k, [&] {
            if (!first) return sample_distinct(p, PhiCategory::PersonName, lex.last_names, k, true);
            Gender g = ctx.title;
            if (g == Gender::Unknown && in_female != in_male) g = in_female ? Gender::Female : Gender::Male;
            if (g == Gender::Unknown) g = p.stream.below(2) == 0 ? Gender::Female : Gender::Male;
            const Lexicon& pool = (g == Gender::Female ? lex.female_first_names : lex.male_first_names).empty()
                                      ? (g == Gender::Female ? lex.male_first_names : lex.female_first_names)
                                      : (g == Gender::Female ? lex.female_first_names : lex.male_first_names);
            return sample_distinct(p, PhiCategory::PersonName, pool, k, true);
        });
        out += recase(rep, word);
    }
    out.append(surface.substr(cursor));
    return out;
}

// --- locations and institutions ------------------------------------------------

inline std::u32string replace_location(PatientSurrogates& p, const SurrogateLexicons& lex, std::u32string_view surface) {
    const std::vector<Token> toks = tokenize(surface);
    const std::string key = key_of(surface);
    const std::u32string rep = remembered(p, PhiCategory::Location, key, [&]() -> std::u32string {
        if (toks.size() >= 2 && toks[0].kind == TokenKind::Number) {
            std::size_t kw = 1;
            while (kw < toks.size() && toks[kw].kind == TokenKind::Punct) ++kw;
            const std::u32string_view number = surface.substr(0, toks[0].end);
            if (kw < toks.size() && rules::detail::lower_in(surface.substr(toks[kw].start, toks[kw].end - toks[kw].start),
                                                            rules::kStreetKeywords)) {
                std::u32string out = random_digits(p.stream, number.size(), true);
                out.append(surface.substr(toks[0].end, toks[kw].end - toks[0].end));
                const std::u32string_view street = surface.substr(toks[kw].end);
                out += U' ';
                out += sample_distinct(p, PhiCategory::Location, lex.last_names, key_of(street), false);
                return out;
            }
            // postal code + city
            std::u32string out = random_digits(p.stream, number.size(), true);
            out.append(surface.substr(toks[0].end, toks[1].start - toks[0].end));
            const std::u32string_view city = surface.substr(toks[1].start);
            out += sample_distinct(p, PhiCategory::Location, lex.cities, key_of(city), false);
            return out;
        }
        return sample_distinct(p, PhiCategory::Location, lex.cities, key, true);
    });
    return recase(rep, surface);
}

inline std::u32string replace_institution(PatientSurrogates& p, const SurrogateLexicons& lex,
                                          std::u32string_view surface) {
    const std::string key = key_of(surface);
    const std::u32string rep = remembered(p, PhiCategory::Institution, key, [&] {
        return sample_distinct(p, PhiCategory::Institution, lex.institutions, key, false);
    });
    return recase(rep, surface);
}

// --- dates ---------------------------------------------------------------------

inline constexpr std::array<std::u32string_view, 12> kMonthFull{U"janvier", U"février", U"mars",     U"avril",
                                                                U"mai",     U"juin",    U"juillet",  U"août",
                                                                U"septembre", U"octobre", U"novembre", U"décembre"};
inline constexpr std::array<std::u32string_view, 12> kMonthShort{U"janv", U"févr", U"mars", U"avr", U"mai", U"juin",
                                                                 U"juil", U"août", U"sept", U"oct", U"nov", U"déc"};

inline std::u32string strip_accents(std::u32string_view s) {
    std::u32string out(s);
    for (char32_t& c : out) {
        switch (c) {
            case U'é': case U'è': case U'ê': c = U'e'; break;
            case U'û': case U'ù': c = U'u'; break;
            default: break;
        }
    }
    return out;
}

inline std::u32string number_text(int value, std::size_t min_width) {
    std::string s = std::to_string(value);
    if (s.size() < min_width) s.insert(0, min_width - s.size(), '0');
    return text::decode_utf8(s);
}

struct DigitRun {
    int value = 0;
    std::size_t width = 0;
};

inline bool read_digits(std::u32string_view s, std::size_t& i, DigitRun& out) {
    const std::size_t b = i;
    int v = 0;
    while (i < s.size() && text::is_digit(s[i]) && i - b < 6) v = v * 10 + static_cast<int>(s[i++] - U'0');
    out = {v, i - b};
    return out.width > 0;
}

inline std::u32string render_textual(const CalendarDate& d, std::u32string_view day_suffix, std::size_t day_width,
                                     std::u32string_view gap1, std::u32string_view month_like, int original_month,
                                     bool abbreviated, bool period, std::u32string_view gap2) {
    auto ascii = [](std::u32string_view s) { return std::all_of(s.begin(), s.end(), [](char32_t c) { return c < 0x80; }); };
    std::u32string month(abbreviated ? kMonthShort[d.month - 1] : kMonthFull[d.month - 1]);
    const bool has_period = period && abbreviated && month != kMonthFull[d.month - 1];
    if (original_month != 0) {
        // The writer dropped accents if the original month is normally accented but was typed in ASCII.
        const std::u32string_view canonical =
            abbreviated ? kMonthShort[original_month - 1] : kMonthFull[original_month - 1];
        if (!ascii(canonical) && ascii(month_like)) month = strip_accents(month);
    }
    if (!month_like.empty()) {
        if (month_like.size() > 1 && text::is_all_upper(month_like)) {
            month = text::uppercase(month);
        } else if (text::is_upper(month_like.front())) {
            month.front() = text::to_upper(month.front());
        }
    }
    std::u32string out = number_text(d.day, day_width);
    if (d.day == 1 && !day_suffix.empty()) out.append(day_suffix);
    out.append(gap1);
    out += month;
    if (has_period) out += U'.';
    out.append(gap2);
    out += number_text(d.year, 4);
    return out;
}

/**
 * Shifts the date written in @p surface by @p offset and writes it back in
 * the same shape. Numeric dates keep separators, field widths and 2-digit
 * years (pivot 1930); textual dates keep the month form and capitalization.
 * A day past the end of its month is clamped. Unparseable dates fall back to
 * the shifted document date in the same shape class.
 */
inline std::u32string shift_date_surface(std::u32string_view surface, std::int64_t offset,
                                         const CalendarDate& document_date) {
    std::size_t i = 0;
    DigitRun day;
    if (!read_digits(surface, i, day)) {
        const CalendarDate s = shift_date(document_date, offset);
        return number_text(s.day, 2) + U"/" + number_text(s.month, 2) + U"/" + number_text(s.year, 4);
    }

    auto clamp_and_shift = [&](int y, int m, int dd) -> std::optional<CalendarDate> {
        if (m < 1 || m > 12 || y < kMinSupportedYear || y > kMaxSupportedYear || dd < 1) return std::nullopt;
        CalendarDate c{y, m, std::min(dd, days_in_month(y, m))};
        try {
            return shift_date(c, offset);
        } catch (const InputError&) {
            return std::nullopt;
        }
    };

    if (i < surface.size() && rules::is_date_separator(surface[i])) {
        const char32_t sep1 = surface[i++];
        DigitRun month, year;
        bool ok = read_digits(surface, i, month);
        char32_t sep2 = sep1;
        if (ok && i < surface.size() && rules::is_date_separator(surface[i])) {
            sep2 = surface[i++];
            ok = read_digits(surface, i, year) && i == surface.size() && (year.width == 2 || year.width == 4);
        } else {
            ok = false;
        }
        std::optional<CalendarDate> shifted;
        if (ok) {
            const int full_year = year.width == 2 ? (year.value < 30 ? 2000 + year.value : 1900 + year.value) : year.value;
            shifted = clamp_and_shift(full_year, month.value, day.value);
        }
        const CalendarDate s = shifted ? *shifted : shift_date(document_date, offset);
        const std::size_t dw = ok ? day.width : 2, mw = ok ? month.width : 2, yw = ok ? year.width : 4;
        std::u32string out = number_text(s.day, dw);
        out += sep1;
        out += number_text(s.month, mw);
        out += sep2;
        out += number_text(yw == 2 ? s.year % 100 : s.year, yw);
        return out;
    }

    // textual: <day>[er] <month>[.] <year>
    std::u32string_view suffix;
    if (surface.substr(i, 2) == U"er") {
        suffix = surface.substr(i, 2);
        i += 2;
    }
    std::size_t g = i;
    while (i < surface.size() && text::is_space(surface[i])) ++i;
    const std::u32string_view gap1 = surface.substr(g, i - g);
    const std::size_t mb = i;
    while (i < surface.size() && text::is_letter(surface[i])) ++i;
    const std::u32string_view month_word = surface.substr(mb, i - mb);
    const bool period = i < surface.size() && surface[i] == U'.';
    if (period) ++i;
    g = i;
    while (i < surface.size() && text::is_space(surface[i])) ++i;
    const std::u32string_view gap2 = surface.substr(g, i - g);
    DigitRun year;
    const bool year_ok = read_digits(surface, i, year) && year.width == 4 && i == surface.size();

    const std::u32string mkey = text::normalize_key(month_word);
    const int month = month_number(mkey);
    bool abbreviated = false;
    for (const MonthName& m : kFrenchMonths) {
        if (m.name == mkey) abbreviated = m.abbreviation;
    }
    std::optional<CalendarDate> shifted;
    if (month != 0 && year_ok) shifted = clamp_and_shift(year.value, month, day.value);
    if (!shifted) {
        const CalendarDate s = shift_date(document_date, offset);
        return render_textual(s, suffix, 1, U" ", month_word, month, abbreviated, period, U" ");
    }
    const std::size_t day_width = surface.front() == U'0' ? day.width : 1;
    return render_textual(*shifted, suffix, day_width, gap1.empty() ? U" " : gap1, month_word, month, abbreviated,
                          period, gap2.empty() ? U" " : gap2);
}

// --- ages and ids --------------------------------------------------------------

inline std::u32string jitter_age(RandomStream& rng, std::u32string_view surface, int k) {
    std::size_t i = 0;
    DigitRun n;
    if (!read_digits(surface, i, n)) return std::u32string(surface);
    std::int64_t delta = draw_offset(rng, -k, k);
    std::int64_t value = n.value + delta;
    if (value < 0) value = n.value - delta;
    return number_text(static_cast<int>(value), 1) + std::u32string(surface.substr(i));
}

inline std::u32string replace_id(PatientSurrogates& p, std::u32string_view surface) {
    return remembered(p, PhiCategory::IdNumber, key_of(surface), [&] {
        std::u32string out(surface);
        for (std::size_t t = 0; t < 1000; ++t) {
            for (char32_t& c : out) {
                if (text::is_digit(c)) c = static_cast<char32_t>(U'0' + p.stream.below(10));
            }
            if (out != surface) return out;
        }
        throw ComputeError("could not draw a distinct identifier");
    });
}

}  // namespace surrogate_detail

/// Creates the patient's entry on first use: offset first, then pseudo id.
inline PatientSurrogates& ensure_patient(SurrogateMap& map, const SurrogatePolicy& policy,
                                         const std::string& patient_id) {
    auto [it, inserted] = map.patients.try_emplace(patient_id);
    if (inserted) {
        PatientSurrogates& p = it->second;
        p.stream = derive_patient_stream(policy.master_seed, patient_id);
        p.date_offset_days = surrogate_detail::draw_offset(p.stream, policy.shift_low, policy.shift_high);
        p.pseudo_id = p.stream.hex128();
    }
    return it->second;
}

/// Adds the document's original name tokens to the patient's reserved set.
inline void reserve_name_tokens(PatientSurrogates& p, const AnnotatedDocument& doc) {
    auto add_tokens = [&](std::u32string_view s) {
        for (const Token& t : tokenize(s)) {
            if (t.kind == TokenKind::Word && t.end - t.start > 1) {
                p.reserved.insert(surrogate_detail::key_of(s.substr(t.start, t.end - t.start)));
            }
        }
    };
    const std::u32string cps = text::decode_utf8(doc.doc.text);
    for (const PhiSpan& s : doc.spans) {
        if ((s.category == PhiCategory::PatientName || s.category == PhiCategory::PersonName) && s.end <= cps.size()) {
            add_tokens(std::u32string_view(cps).substr(s.start, s.end - s.start));
        }
    }
    for (const PersonNameParts& n : doc.doc.known_patient_names) {
        add_tokens(text::decode_utf8(n.first));
        add_tokens(text::decode_utf8(n.last));
    }
}

/**
 * @brief Rewrites one annotated document, updating the patient's entry in @p map.
 *
 * Spans must be sorted and non-overlapping. Removed spans leave no text; if
 * that leaves whitespace on both sides, the following whitespace character
 * is dropped so no double space remains.
 */
inline DeidDocument apply_surrogates(const AnnotatedDocument& annotated, const SurrogatePolicy& policy,
                                     SurrogateMap& map) {
    namespace sd = surrogate_detail;
    const std::u32string src = text::decode_utf8(annotated.doc.text);
    for (std::size_t i = 0; i < annotated.spans.size(); ++i) {
        const PhiSpan& s = annotated.spans[i];
        if (s.start >= s.end || s.end > src.size()) {
            throw InputError("document " + annotated.doc.doc_id + ": span [" + std::to_string(s.start) + ", " +
                             std::to_string(s.end) + ") outside text");
        }
        if (i > 0 && annotated.spans[i - 1].end > s.start) {
            throw InputError("document " + annotated.doc.doc_id + ": spans overlap or are unsorted");
        }
    }

    PatientSurrogates& p = ensure_patient(map, policy, annotated.doc.patient_id);
    reserve_name_tokens(p, annotated);

    sd::NameContext names;
    for (const PersonNameParts& n : annotated.doc.known_patient_names) {
        for (const Token& t : tokenize(text::decode_utf8(n.first))) {
            if (t.kind == TokenKind::Word) names.known_first.insert(sd::key_of(text::decode_utf8(n.first).substr(t.start, t.end - t.start)));
        }
        for (const Token& t : tokenize(text::decode_utf8(n.last))) {
            if (t.kind == TokenKind::Word) names.known_last.insert(sd::key_of(text::decode_utf8(n.last).substr(t.start, t.end - t.start)));
        }
    }

    DeidDocument out;
    out.doc_id = annotated.doc.doc_id;
    out.pseudo_patient_id = p.pseudo_id;
    out.date = shift_date(annotated.doc.date, p.date_offset_days);

    std::u32string text;
    std::size_t cursor = 0;
    for (const PhiSpan& s : annotated.spans) {
        text.append(src, cursor, s.start - cursor);
        const std::u32string_view surface = std::u32string_view(src).substr(s.start, s.end - s.start);
        std::u32string rep;
        if (policy.removal_categories.count(s.category)) {
            // left empty
        } else {
            switch (s.category) {
                case PhiCategory::PatientName:
                case PhiCategory::PersonName:
                    names.title = sd::title_gender(src, s.start);
                    rep = sd::replace_name_span(p, policy.lexicons, surface, names);
                    break;
                case PhiCategory::Location: rep = sd::replace_location(p, policy.lexicons, surface); break;
                case PhiCategory::Institution: rep = sd::replace_institution(p, policy.lexicons, surface); break;
                case PhiCategory::Date:
                    rep = sd::shift_date_surface(surface, p.date_offset_days, annotated.doc.date);
                    break;
                case PhiCategory::Age:
                    rep = policy.age.mode == AgeMode::Keep ? std::u32string(surface)
                                                           : sd::jitter_age(p.stream, surface, policy.age.jitter);
                    break;
                case PhiCategory::IdNumber: rep = sd::replace_id(p, surface); break;
                case PhiCategory::PhoneNumber:
                case PhiCategory::UrlEmail:
                    throw InputError("no surrogate rule for " + std::string(category_name(s.category)) +
                                     " unless it is removed");
            }
        }
        AppliedReplacement a;
        a.original = s;
        a.original.surface = text::encode_utf8(surface);
        a.out_start = text.size();
        text += rep;
        a.out_end = text.size();
        a.replacement = text::encode_utf8(rep);
        out.applied.push_back(std::move(a));
        cursor = s.end;
        if (rep.empty() && !text.empty() && text::is_space(text.back()) && cursor < src.size() &&
            text::is_space(src[cursor])) {
            ++cursor;
        }
    }
    text.append(src, std::min(cursor, src.size()));
    out.text = text::encode_utf8(text);
    return out;
}

/**
 * @brief Rewrites a corpus. Patients are processed independently (possibly
 * in parallel); each patient's documents go in doc_id order. Output is
 * sorted by doc_id.
 */
inline std::vector<DeidDocument> apply_surrogates_corpus(std::span<const AnnotatedDocument> docs,
                                                         const SurrogatePolicy& policy, SurrogateMap& map,
                                                         unsigned threads = 1) {
    policy.validate();
    std::map<std::string, std::vector<std::size_t>> by_patient;
    for (std::size_t i = 0; i < docs.size(); ++i) by_patient[docs[i].doc.patient_id].push_back(i);

    std::vector<std::pair<PatientSurrogates*, std::vector<std::size_t>>> groups;
    for (auto& [pid, idx] : by_patient) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return docs[a].doc.doc_id < docs[b].doc.doc_id; });
        for (std::size_t k = 1; k < idx.size(); ++k) {
            if (docs[idx[k - 1]].doc.doc_id == docs[idx[k]].doc.doc_id) {
                throw InputError("duplicate doc_id '" + docs[idx[k]].doc.doc_id + "'");
            }
        }
        PatientSurrogates& p = ensure_patient(map, policy, pid);
        for (const std::size_t i : idx) reserve_name_tokens(p, docs[i]);
        groups.emplace_back(&p, idx);
    }

    std::vector<DeidDocument> out(docs.size());
    parallel_for(groups.size(), threads, [&](std::size_t g) {
        // Each worker touches only its own patient's entry; the map itself is not modified.
        SurrogateMap local;
        const std::string& pid = docs[groups[g].second.front()].doc.patient_id;
        local.patients.emplace(pid, std::move(*groups[g].first));
        for (const std::size_t i : groups[g].second) out[i] = apply_surrogates(docs[i], policy, local);
        *groups[g].first = std::move(local.patients.at(pid));
    });

    std::set<std::string> pseudo;
    for (const auto& [pid, p] : map.patients) {
        if (!pseudo.insert(p.pseudo_id).second) throw ComputeError("pseudo patient id collision");
    }
    std::sort(out.begin(), out.end(), [](const DeidDocument& a, const DeidDocument& b) { return a.doc_id < b.doc_id; });
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k - 1].doc_id == out[k].doc_id) throw InputError("duplicate doc_id '" + out[k].doc_id + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pseudo identifiers for curation
// ---------------------------------------------------------------------------

struct PseudoIdMapping {
    std::map<std::string, std::string> patients;
    std::map<std::string, std::string> studies;
};

/// Fresh 128-bit hex ids for every patient and study id. Patients first, in sorted order.
inline PseudoIdMapping assign_pseudo_ids(const std::vector<std::string>& patients,
                                         const std::vector<std::string>& studies, RandomStream& stream) {
    PseudoIdMapping m;
    std::set<std::string> taken(patients.begin(), patients.end());
    taken.insert(studies.begin(), studies.end());
    auto assign = [&](const std::vector<std::string>& ids, std::map<std::string, std::string>& into,
                      const char* what) {
        std::vector<std::string> sorted(ids);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InputError(std::string("duplicate ") + what + " id");
        }
        for (const std::string& id : sorted) {
            std::string fresh = stream.hex128();
            int retries = 0;
            while (taken.count(fresh)) {
                if (++retries > 8) throw ComputeError("pseudo id collision persisted after 8 retries");
                fresh = stream.hex128();
            }
            taken.insert(fresh);
            into.emplace(id, std::move(fresh));
        }
    };
    assign(patients, m.patients, "patient");
    assign(studies, m.studies, "study");
    return m;
}

inline io::ordered_json to_json(const PseudoIdMapping& m) {
    io::ordered_json j;
    j["patients"] = io::ordered_json::object();
    j["studies"] = io::ordered_json::object();
    for (const auto& [k, v] : m.patients) j["patients"][k] = v;
    for (const auto& [k, v] : m.studies) j["studies"][k] = v;
    return j;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline std::string hex64(std::uint64_t x) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int k = 15; k >= 0; --k, x >>= 4) s[static_cast<std::size_t>(k)] = kHex[x & 0xF];
    return s;
}

/// Contains re-identification keys: store with restricted permissions.
inline io::ordered_json to_json(const SurrogateMap& map) {
    io::ordered_json j = io::ordered_json::object();
    for (const auto& [pid, p] : map.patients) {
        io::ordered_json e;
        e["date_offset_days"] = p.date_offset_days;
        e["pseudo_id"] = p.pseudo_id;
        e["stream_state"] = hex64(p.stream.state());
        io::ordered_json reps = io::ordered_json::array();
        for (const auto& [key, value] : p.replacements) {
            reps.push_back({{"category", category_name(key.first)}, {"original", key.second}, {"replacement", value}});
        }
        e["replacements"] = std::move(reps);
        e["reserved"] = p.reserved;
        j[pid] = std::move(e);
    }
    return j;
}

inline SurrogateMap surrogate_map_from_json(const io::json& j) {
    if (!j.is_object()) throw InputError("surrogate map must be a JSON object");
    SurrogateMap map;
    for (const auto& [pid, e] : j.items()) {
        PatientSurrogates p;
        try {
            p.date_offset_days = e.at("date_offset_days").get<std::int64_t>();
            p.pseudo_id = e.at("pseudo_id").get<std::string>();
            p.stream = RandomStream(std::stoull(e.at("stream_state").get<std::string>(), nullptr, 16));
            for (const auto& r : e.at("replacements")) {
                const PhiCategory c = parse_category(r.at("category").get<std::string>());
                const std::string value = r.at("replacement").get<std::string>();
                p.replacements.emplace(std::pair{c, r.at("original").get<std::string>()}, value);
                p.used.insert({c, text::normalize_key(value)});
            }
            for (const auto& r : e.value("reserved", io::json::array())) p.reserved.insert(r.get<std::string>());
        } catch (const io::json::exception& ex) {
            throw InputError("surrogate map entry '" + pid + "': " + ex.what());
        } catch (const std::logic_error& ex) {
            throw InputError("surrogate map entry '" + pid + "': " + ex.what());
        }
        map.patients.emplace(pid, std::move(p));
    }
    return map;
}

/**
 * Policy JSON:
 * {"master_seed": 42, "date_shift_range": [-1000, 1000],
 *  "removal_categories": ["PhoneNumber", "UrlEmail"],
 *  "age_policy": "keep" | {"jitter": 2},
 *  "lexicons": {"first_names_female": path, "first_names_male": path,
 *               "last_names": path, "cities": path, "institutions": path}}
 * Lexicon paths are relative to @p base_dir.
 */
inline SurrogatePolicy surrogate_policy_from_json(const io::json& j, const std::filesystem::path& base_dir) {
    SurrogatePolicy p;
    try {
        if (j.contains("master_seed")) p.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("date_shift_range")) {
            const auto& r = j.at("date_shift_range");
            if (!r.is_array() || r.size() != 2) throw InputError("date_shift_range must be [low, high]");
            p.shift_low = r[0].get<std::int64_t>();
            p.shift_high = r[1].get<std::int64_t>();
        }
        if (j.contains("removal_categories")) {
            p.removal_categories.clear();
            for (const auto& c : j.at("removal_categories")) p.removal_categories.insert(parse_category(c.get<std::string>()));
        }
        if (j.contains("age_policy")) {
            const auto& a = j.at("age_policy");
            if (a.is_string() && a.get<std::string>() == "keep") {
                p.age = {};
            } else if (a.is_object() && a.contains("jitter")) {
                p.age = {AgeMode::Jitter, a.at("jitter").get<int>()};
            } else {
                throw InputError("age_policy must be \"keep\" or {\"jitter\": k}");
            }
        }
        const auto& lex = j.at("lexicons");
        auto load = [&](const char* key, Lexicon& into) {
            if (!lex.contains(key)) return;
            into = load_lexicon((base_dir / lex.at(key).get<std::string>()).string(), key);
        };
        load("first_names_female", p.lexicons.female_first_names);
        load("first_names_male", p.lexicons.male_first_names);
        load("last_names", p.lexicons.last_names);
        load("cities", p.lexicons.cities);
        load("institutions", p.lexicons.institutions);
    } catch (const io::json::exception& e) {
        throw InputError(std::string("surrogate policy: ") + e.what());
    }
    p.validate();
    return p;
}

inline SurrogatePolicy load_surrogate_policy(const std::string& path) {
    return surrogate_policy_from_json(io::read_json_file(path), std::filesystem::path(path).parent_path());
}

}  // namespace radvlp::deid
