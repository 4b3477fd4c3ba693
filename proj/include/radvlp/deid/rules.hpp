/**
 * @file rules.hpp
 * @brief The nine PHI detection rules for French clinical text.
 *
 * Each rule scans a DocumentView and appends candidate spans (surfaces are
 * filled in later by detect()). Candidates from different rules may
 * overlap; resolve_overlaps() in detect.hpp settles them.
 *
 * | Rule | Category    | Trigger                                               |
 * |------|-------------|-------------------------------------------------------|
 * | R1   | PatientName | known name components, "J. Dupont"                    |
 * | R2   | PersonName  | title + capitalized tokens, first-name lexicon hits   |
 * | R3   | Location    | city lexicon, street address, postal code + city      |
 * | R4   | Institution | institution lexicon, hospital keyword + proper noun   |
 * | R5   | Date        | dd/mm/yyyy-like numerics, "12 janvier 2015"           |
 * | R6   | Age         | "67 ans"                                              |
 * | R7   | IdNumber    | long digit runs, Belgian national number shape        |
 * | R8   | PhoneNumber | +32 / +33 / 0 followed by 8-10 grouped digits         |
 * | R9   | UrlEmail    | e-mail addresses, http(s):// and www. links           |
 */

#pragma once

#include "radvlp/core/types.hpp"
#include "radvlp/deid/detector_config.hpp"
#include "radvlp/deid/lexicon.hpp"
#include "radvlp/deid/tokens.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace radvlp::deid::rules {

using Candidates = std::vector<PhiSpan>;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

namespace detail {

inline bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

inline bool lower_equals(std::u32string_view word, std::u32string_view lower) {
    if (word.size() != lower.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (text::to_lower(word[i]) != lower[i]) return false;
    }
    return true;
}

template <std::size_t N>
bool lower_in(std::u32string_view word, const std::array<std::u32string_view, N>& set) {
    for (auto s : set) {
        if (lower_equals(word, s)) return true;
    }
    return false;
}

/// Index of the first token starting at or after @p pos.
inline std::size_t token_at_or_after(const DocumentView& v, std::size_t pos) {
    std::size_t lo = 0, hi = v.tokens.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (v.tokens[mid].start < pos) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

inline bool is_word(const DocumentView& v, std::size_t i) {
    return i < v.tokens.size() && v.tokens[i].kind == TokenKind::Word;
}

inline bool is_number(const DocumentView& v, std::size_t i) {
    return i < v.tokens.size() && v.tokens[i].kind == TokenKind::Number;
}

inline std::size_t token_length(const DocumentView& v, std::size_t i) { return v.tokens[i].end - v.tokens[i].start; }

/**
 * @brief Longest lexicon phrase beginning at word token @p i.
 *
 * Phrase words may be separated by same-line whitespace or an apostrophe
 * ("Braine-l'Alleud"). Returns the end offset, or npos.
 */
inline std::size_t match_phrase(const DocumentView& v, std::size_t i, const Lexicon& lex) {
    if (lex.empty() || !is_word(v, i)) return npos;
    const std::size_t limit = 3 * lex.max_words() + 2;
    std::size_t best = npos;
    std::size_t words = 0;
    for (std::size_t j = i; j < v.tokens.size() && words < limit; ++j) {
        if (j > i) {
            const Token& prev = v.tokens[j - 1];
            const Token& cur = v.tokens[j];
            const bool glued_apostrophe = cur.kind == TokenKind::Punct && is_apostrophe(v.at(cur.start)) &&
                                          prev.end == cur.start && prev.kind == TokenKind::Word;
            const bool after_apostrophe = prev.kind == TokenKind::Punct && prev.end == cur.start;
            if (!glued_apostrophe && !after_apostrophe && !is_inline_gap(v.text, prev.end, cur.start)) break;
            if (cur.kind == TokenKind::Punct) {
                if (!glued_apostrophe) break;
                continue;
            }
        }
        if (v.tokens[j].kind != TokenKind::Word) break;
        ++words;
        const std::u32string key = text::normalize_key(v.slice(v.tokens[i].start, v.tokens[j].end));
        if (lex.contains(key)) best = v.tokens[j].end;
    }
    return best;
}

/// True when [start, end) equals @p normalized after key normalization and ends on a token boundary.
inline std::size_t match_exact_phrase(const DocumentView& v, std::size_t i, std::u32string_view normalized) {
    if (normalized.empty() || !is_word(v, i)) return npos;
    for (std::size_t j = i; j < v.tokens.size(); ++j) {
        if (v.tokens[j].end - v.tokens[i].start > normalized.size() + 8) break;
        if (v.tokens[j].kind != TokenKind::Word) continue;
        if (text::normalize_key(v.slice(v.tokens[i].start, v.tokens[j].end)) == normalized) {
            return v.tokens[j].end;
        }
    }
    return npos;
}

struct ParticleSet {
    std::vector<std::u32string> words;  // lowercase, whitespace-separated particles
    bool elided = false;                // accept d' and l'
};

/**
 * @brief Extends a proper-noun sequence starting at token @p k.
 *
 * Accepts up to @p max_caps capitalized words (or "X." initials), with
 * particles in between; trailing particles are not included. Returns the
 * end offset of the last capitalized word, or npos if none was found.
 */
inline std::size_t extend_proper_noun(const DocumentView& v, std::size_t k, std::size_t max_caps,
                                      const ParticleSet& particles) {
    std::size_t caps = 0;
    std::size_t end = npos;
    std::size_t idx = k;
    while (idx < v.tokens.size() && caps < max_caps) {
        const Token& tok = v.tokens[idx];
        if (tok.kind != TokenKind::Word) break;
        const std::u32string_view cased = v.cased_word(idx);
        std::size_t effective_end = tok.end;
        std::size_t next = idx + 1;
        bool glued_next = false;
        bool is_particle = false;
        if (particles.elided && tok.end - tok.start == 1 && detail::is_apostrophe(v.at(tok.end)) &&
            (lower_equals(cased, U"d") || lower_equals(cased, U"l"))) {
            is_particle = true;
            next = idx + 2;
            glued_next = true;
        } else if (!text::is_capitalized(cased)) {
            bool listed = false;
            for (const auto& p : particles.words) listed = listed || cased == p;
            if (!listed) break;
            is_particle = true;
        }
        if (!is_particle) {
            if (tok.end - tok.start == 1 && v.at(tok.end) == U'.') {
                effective_end = tok.end + 1;
                next = idx + 2;
            }
            ++caps;
            end = effective_end;
        }
        if (next >= v.tokens.size()) break;
        const std::size_t gap_from = glued_next ? tok.end + 1 : effective_end;
        if (glued_next) {
            if (v.tokens[next].start != gap_from) break;
        } else if (!is_inline_gap(v.text, gap_from, v.tokens[next].start)) {
            break;
        }
        idx = next;
    }
    return caps > 0 ? end : npos;
}

inline const ParticleSet& name_particles() {
    static const ParticleSet p{{U"de", U"du", U"des", U"van", U"von", U"den", U"der", U"le", U"la"}, false};
    return p;
}

inline const ParticleSet& place_particles() {
    static const ParticleSet p{{U"de", U"du", U"des", U"la", U"le", U"les"}, true};
    return p;
}

/// Next token after offset @p pos if separated from it by same-line whitespace only.
inline std::size_t next_after_gap(const DocumentView& v, std::size_t pos) {
    const std::size_t k = token_at_or_after(v, pos);
    if (k >= v.tokens.size() || !is_inline_gap(v.text, pos, v.tokens[k].start)) return npos;
    return k;
}

inline bool is_initial(const DocumentView& v, std::size_t i) {
    return is_word(v, i) && token_length(v, i) == 1 && text::is_upper(v.cased[v.tokens[i].start]) &&
           v.at(v.tokens[i].end) == U'.';
}

inline bool digit_before(const DocumentView& v, std::size_t pos) { return text::is_digit(v.before(pos)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// R1 patient names
// ---------------------------------------------------------------------------

inline void patient_names(const DocumentView& v, const std::vector<PersonNameParts>& names, Candidates& out) {
    std::vector<std::u32string> components;
    std::vector<std::u32string> last_names;
    for (const auto& n : names) {
        for (const std::string* part : {&n.first, &n.last}) {
            std::u32string key = text::normalize_key(std::u32string_view(text::decode_utf8(*part)));
            if (!key.empty()) components.push_back(key);
        }
        std::u32string last = text::normalize_key(std::u32string_view(text::decode_utf8(n.last)));
        if (!last.empty()) last_names.push_back(std::move(last));
    }
    if (components.empty()) return;

    std::vector<PhiSpan> hits;
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (!detail::is_word(v, i)) continue;
        std::size_t best = npos;
        for (const auto& c : components) {
            const std::size_t end = detail::match_exact_phrase(v, i, c);
            if (end != npos && (best == npos || end > best)) best = end;
        }
        if (detail::is_initial(v, i)) {
            const std::size_t k = detail::token_at_or_after(v, v.tokens[i].end + 1);
            const bool spaced = k < v.tokens.size() &&
                                (v.tokens[k].start == v.tokens[i].end + 1 ||
                                 is_inline_gap(v.text, v.tokens[i].end + 1, v.tokens[k].start));
            if (spaced) {
                for (const auto& last : last_names) {
                    const std::size_t end = detail::match_exact_phrase(v, k, last);
                    if (end != npos && (best == npos || end > best)) best = end;
                }
            }
        }
        if (best != npos) hits.push_back({v.tokens[i].start, best, PhiCategory::PatientName, {}});
    }
    // "Jean Dupont" -> one span rather than two adjacent ones.
    for (const PhiSpan& h : hits) {
        if (!out.empty() && out.back().category == PhiCategory::PatientName && h.start >= out.back().end &&
            is_inline_gap(v.text, out.back().end, h.start)) {
            out.back().end = std::max(out.back().end, h.end);
        } else if (!out.empty() && out.back().category == PhiCategory::PatientName && h.start < out.back().end) {
            out.back().end = std::max(out.back().end, h.end);
        } else {
            out.push_back(h);
        }
    }
}

// ---------------------------------------------------------------------------
// R2 person names
// ---------------------------------------------------------------------------

struct TitleTrigger {
    std::u32string word;  // without trailing period
    bool needs_period = false;
    bool case_sensitive = false;
};

inline std::vector<TitleTrigger> compile_triggers(const std::vector<std::string>& triggers) {
    std::vector<TitleTrigger> out;
    for (const auto& t : triggers) {
        std::u32string w = text::decode_utf8(t);
        TitleTrigger trig;
        if (!w.empty() && w.back() == U'.') {
            trig.needs_period = true;
            w.pop_back();
        }
        if (w.empty()) continue;
        trig.case_sensitive = w.size() <= 4;
        trig.word = std::move(w);
        out.push_back(std::move(trig));
    }
    return out;
}

/// Offset right after a title trigger at token @p i (including its period), or npos.
inline std::size_t match_title(const DocumentView& v, std::size_t i, const std::vector<TitleTrigger>& triggers) {
    if (!detail::is_word(v, i)) return npos;
    const std::u32string_view cased = v.cased_word(i);
    for (const auto& t : triggers) {
        const bool equal = t.case_sensitive ? cased == t.word : text::lowercase(cased) == text::lowercase(t.word);
        if (!equal) continue;
        std::size_t end = v.tokens[i].end;
        if (v.at(end) == U'.') {
            ++end;
        } else if (t.needs_period) {
            continue;
        }
        return end;
    }
    return npos;
}

inline void person_names(const DocumentView& v, const DetectorConfig& cfg, Candidates& out) {
    const auto triggers = compile_triggers(cfg.title_triggers);
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (!detail::is_word(v, i)) continue;

        // Title trigger followed by 1-3 capitalized tokens.
        if (const std::size_t after = match_title(v, i, triggers); after != npos) {
            const std::size_t k = detail::next_after_gap(v, after);
            if (k != npos && match_title(v, k, triggers) == npos) {
                const std::size_t end = detail::extend_proper_noun(v, k, 3, detail::name_particles());
                if (end != npos) out.push_back({v.tokens[k].start, end, PhiCategory::PersonName, {}});
            }
        }

        const std::u32string_view cased = v.cased_word(i);
        if (!text::is_capitalized(cased)) continue;

        // First name from the lexicon followed by a capitalized token.
        if (cfg.first_names.contains(text::normalize_key(v.word(i)))) {
            const std::size_t k = detail::next_after_gap(v, v.tokens[i].end);
            if (k != npos && detail::is_word(v, k) && match_title(v, k, triggers) == npos) {
                const std::size_t end = detail::extend_proper_noun(v, k, 2, detail::name_particles());
                if (end != npos) out.push_back({v.tokens[i].start, end, PhiCategory::PersonName, {}});
            }
        }

        // "J. Dupont" with a lexicon surname; "M." stays a title.
        if (detail::is_initial(v, i) && match_title(v, i, triggers) == npos) {
            const std::size_t after = v.tokens[i].end + 1;
            const std::size_t k = detail::token_at_or_after(v, after);
            if (k < v.tokens.size() && (v.tokens[k].start == after || is_inline_gap(v.text, after, v.tokens[k].start))) {
                const std::size_t end = detail::match_phrase(v, k, cfg.last_names);
                if (end != npos && text::is_capitalized(v.cased_word(k))) {
                    out.push_back({v.tokens[i].start, end, PhiCategory::PersonName, {}});
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// R3 locations
// ---------------------------------------------------------------------------

inline constexpr std::array<std::u32string_view, 5> kStreetKeywords{U"rue", U"avenue", U"boulevard", U"chaussée",
                                                                     U"place"};

inline void locations(const DocumentView& v, const DetectorConfig& cfg, Candidates& out) {
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (detail::is_word(v, i) && text::is_capitalized(v.cased_word(i))) {
            const std::size_t end = detail::match_phrase(v, i, cfg.cities);
            if (end != npos) out.push_back({v.tokens[i].start, end, PhiCategory::Location, {}});
            continue;
        }
        if (!detail::is_number(v, i) || detail::digit_before(v, v.tokens[i].start)) continue;
        const std::size_t len = detail::token_length(v, i);

        // <number> <street keyword> <Capitalized...>
        if (len <= 4) {
            std::size_t after = v.tokens[i].end;
            if (v.at(after) == U',') ++after;
            const std::size_t kw = detail::next_after_gap(v, after);
            if (kw != npos && detail::is_word(v, kw) && detail::lower_in(v.cased_word(kw), kStreetKeywords)) {
                const std::size_t k = detail::next_after_gap(v, v.tokens[kw].end);
                if (k != npos) {
                    const std::size_t end = detail::extend_proper_noun(v, k, 4, detail::place_particles());
                    if (end != npos) out.push_back({v.tokens[i].start, end, PhiCategory::Location, {}});
                }
            }
        }

        // <postal code> <city>
        if ((len == 4 || len == 5) && v.before(v.tokens[i].start) != U'.') {
            const std::size_t k = detail::next_after_gap(v, v.tokens[i].end);
            if (k != npos && detail::is_word(v, k) && text::is_capitalized(v.cased_word(k))) {
                const std::size_t end = detail::match_phrase(v, k, cfg.cities);
                if (end != npos) out.push_back({v.tokens[i].start, end, PhiCategory::Location, {}});
            }
        }
    }
}

// ---------------------------------------------------------------------------
// R4 institutions
// ---------------------------------------------------------------------------

inline void institutions(const DocumentView& v, const DetectorConfig& cfg, Candidates& out) {
    static constexpr std::array<std::u32string_view, 7> kKeywords{
        U"clinique", U"cliniques", U"hôpital", U"hopital", U"hôpitaux", U"chu", U"polyclinique"};
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (!detail::is_word(v, i)) continue;
        if (const std::size_t end = detail::match_phrase(v, i, cfg.institutions); end != npos) {
            out.push_back({v.tokens[i].start, end, PhiCategory::Institution, {}});
        }

        std::size_t kw_end = npos;
        if (detail::lower_in(v.cased_word(i), kKeywords)) {
            kw_end = v.tokens[i].end;
        } else if (detail::lower_equals(v.cased_word(i), U"maison")) {
            const std::size_t de = detail::next_after_gap(v, v.tokens[i].end);
            if (de != npos && detail::lower_equals(v.cased_word(de), U"de")) {
                const std::size_t repos = detail::next_after_gap(v, v.tokens[de].end);
                if (repos != npos && detail::lower_equals(v.cased_word(repos), U"repos")) kw_end = v.tokens[repos].end;
            }
        }
        if (kw_end == npos) continue;
        const std::size_t k = detail::next_after_gap(v, kw_end);
        if (k == npos) continue;
        const std::size_t end = detail::extend_proper_noun(v, k, 4, detail::place_particles());
        if (end != npos) out.push_back({v.tokens[i].start, end, PhiCategory::Institution, {}});
    }
}

// ---------------------------------------------------------------------------
// R5 dates
// ---------------------------------------------------------------------------

inline bool is_date_separator(char32_t c) { return c == U'/' || c == U'.' || c == U'-'; }

inline void dates(const DocumentView& v, const DetectorConfig& cfg, Candidates& out) {
    const auto& t = v.tokens;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!detail::is_number(v, i)) continue;
        const std::size_t len = detail::token_length(v, i);
        if (len < 1 || len > 2) continue;

        // d{1,2} sep d{1,2} sep (d{2}|d{4})
        if (i + 4 < t.size() && is_date_separator(v.at(t[i].end)) && t[i + 1].end == t[i].end + 1 &&
            detail::is_number(v, i + 2) && t[i + 2].start == t[i].end + 1 && detail::token_length(v, i + 2) <= 2 &&
            is_date_separator(v.at(t[i + 2].end)) && detail::is_number(v, i + 4) &&
            t[i + 4].start == t[i + 2].end + 1) {
            const std::size_t ylen = detail::token_length(v, i + 4);
            if (ylen == 2 || ylen == 4) out.push_back({t[i].start, t[i + 4].end, PhiCategory::Date, {}});
        }

        // d{1,2}[er] <month>[.] d{4}
        std::size_t after_day = t[i].end;
        if (detail::is_word(v, i + 1) && t[i + 1].start == after_day && detail::lower_equals(v.cased_word(i + 1), U"er")) {
            after_day = t[i + 1].end;
        }
        const std::size_t m = detail::next_after_gap(v, after_day);
        if (m == npos || !detail::is_word(v, m)) continue;
        if (!cfg.months.contains(text::normalize_key(v.word(m)))) continue;
        std::size_t month_end = t[m].end;
        if (v.at(month_end) == U'.') ++month_end;
        const std::size_t y = detail::next_after_gap(v, month_end);
        if (y == npos || !detail::is_number(v, y) || detail::token_length(v, y) != 4) continue;
        out.push_back({t[i].start, t[y].end, PhiCategory::Date, {}});
    }
}

// ---------------------------------------------------------------------------
// R6 ages
// ---------------------------------------------------------------------------

inline void ages(const DocumentView& v, Candidates& out) {
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (!detail::is_number(v, i) || detail::token_length(v, i) > 3) continue;
        const std::size_t start = v.tokens[i].start;
        const char32_t prev = v.before(start);
        if ((prev == U',' || prev == U'.') && detail::digit_before(v, start - 1)) continue;
        const std::size_t k = detail::next_after_gap(v, v.tokens[i].end);
        if (k == npos || !detail::is_word(v, k) || !detail::lower_equals(v.cased_word(k), U"ans")) continue;
        out.push_back({start, v.tokens[k].end, PhiCategory::Age, {}});
    }
}

// ---------------------------------------------------------------------------
// R7 identification numbers
// ---------------------------------------------------------------------------

inline void id_numbers(const DocumentView& v, const DetectorConfig& cfg, Candidates& out) {
    // Belgian national register number: yy.mm.dd-xxx.xx, each separator optional.
    static constexpr std::u32string_view kShape = U"dd.dd.dd-ddd.dd";
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (!detail::is_number(v, i)) continue;
        const std::size_t start = v.tokens[i].start;
        if (detail::token_length(v, i) >= static_cast<std::size_t>(cfg.min_id_digits)) {
            out.push_back({start, v.tokens[i].end, PhiCategory::IdNumber, {}});
            continue;
        }
        std::size_t pos = start;
        bool ok = true;
        for (char32_t p : kShape) {
            if (p == U'd') {
                if (!text::is_digit(v.at(pos))) {
                    ok = false;
                    break;
                }
                ++pos;
            } else if (v.at(pos) == p && text::is_digit(v.at(pos + 1))) {
                ++pos;
            }
        }
        if (ok && !text::is_digit(v.at(pos))) out.push_back({start, pos, PhiCategory::IdNumber, {}});
    }
}

// ---------------------------------------------------------------------------
// R8 phone numbers
// ---------------------------------------------------------------------------

inline bool is_phone_separator(char32_t c) { return c == U' ' || c == U'/' || c == U'.' || c == U'-'; }

inline void phone_numbers(const DocumentView& v, Candidates& out) {
    const std::u32string& s = v.text;
    for (std::size_t p = 0; p < s.size(); ++p) {
        std::size_t pos;
        if (s[p] == U'+' && p + 2 < s.size() && s[p + 1] == U'3' && (s[p + 2] == U'2' || s[p + 2] == U'3')) {
            if (text::is_alnum(v.before(p))) continue;
            pos = p + 3;
        } else if (s[p] == U'0') {
            const char32_t prev = v.before(p);
            if (text::is_alnum(prev) || prev == U'+') continue;
            if ((prev == U'.' || prev == U'/' || prev == U'-') && p >= 2 && text::is_digit(s[p - 2])) continue;
            pos = p + 1;
        } else {
            continue;
        }
        if (pos < s.size() && is_phone_separator(s[pos]) && pos + 1 < s.size() && text::is_digit(s[pos + 1])) ++pos;
        std::size_t digits = 0;
        std::size_t end = npos;
        while (pos < s.size()) {
            if (text::is_digit(s[pos])) {
                ++digits;
                ++pos;
                end = pos;
                if (digits > 10) break;
            } else if (digits > 0 && is_phone_separator(s[pos]) && pos + 1 < s.size() && text::is_digit(s[pos + 1]) &&
                       digits < 10) {
                ++pos;
            } else {
                break;
            }
        }
        if (digits < 8 || digits > 10 || text::is_digit(v.at(end))) continue;
        out.push_back({p, end, PhiCategory::PhoneNumber, {}});
    }
}

// ---------------------------------------------------------------------------
// R9 URLs and e-mail addresses
// ---------------------------------------------------------------------------

inline void urls_emails(const DocumentView& v, Candidates& out) {
    const std::u32string& s = v.text;
    auto local_char = [](char32_t c) {
        return (c < 0x80 && text::is_alnum(c)) || c == U'.' || c == U'_' || c == U'%' || c == U'+' || c == U'-';
    };
    auto domain_char = [](char32_t c) { return (c < 0x80 && text::is_alnum(c)) || c == U'.' || c == U'-'; };

    for (std::size_t a = 0; a < s.size(); ++a) {
        if (s[a] != U'@') continue;
        std::size_t left = a;
        while (left > 0 && local_char(s[left - 1])) --left;
        std::size_t right = a + 1;
        while (right < s.size() && domain_char(s[right])) ++right;
        while (right > a + 1 && (s[right - 1] == U'.' || s[right - 1] == U'-')) --right;
        if (left == a || right == a + 1 || !text::is_alnum(s[a + 1])) continue;
        const std::u32string_view domain(s.data() + a + 1, right - a - 1);
        const std::size_t dot = domain.rfind(U'.');
        if (dot == std::u32string_view::npos || domain.size() - dot - 1 < 2) continue;
        bool tld_letters = true;
        for (std::size_t k = dot + 1; k < domain.size(); ++k) tld_letters = tld_letters && text::is_letter(domain[k]);
        if (!tld_letters) continue;
        out.push_back({left, right, PhiCategory::UrlEmail, {}});
    }

    static constexpr std::array<std::u32string_view, 3> kPrefixes{U"http://", U"https://", U"www."};
    for (std::size_t p = 0; p < s.size(); ++p) {
        const char32_t prev = v.before(p);
        if (text::is_alnum(prev) || prev == U'.' || prev == U'/' || prev == U'@') continue;
        std::size_t prefix = 0;
        for (auto pre : kPrefixes) {
            if (s.size() - p >= pre.size() && detail::lower_equals(std::u32string_view(s).substr(p, pre.size()), pre)) {
                prefix = pre.size();
                break;
            }
        }
        if (prefix == 0) continue;
        std::size_t end = p + prefix;
        while (end < s.size() && !text::is_space(s[end]) && s[end] != U'<' && s[end] != U'>' && s[end] != U'"' &&
               s[end] != 0xAB && s[end] != 0xBB) {
            ++end;
        }
        static constexpr std::u32string_view kTrailing = U".,;:!?)]}'\"";
        while (end > p + prefix && kTrailing.find(s[end - 1]) != std::u32string_view::npos) --end;
        if (end == p + prefix) continue;
        out.push_back({p, end, PhiCategory::UrlEmail, {}});
    }
}

}  // namespace radvlp::deid::rules
