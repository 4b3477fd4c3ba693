/**
 * @file text.hpp
 * @brief UTF-8 <-> code point conversion and the small amount of Unicode
 *        knowledge the French de-identification rules need.
 *
 * All offsets in radvlp are Unicode code points. Character classes and case
 * mappings cover ASCII, Latin-1 Supplement and Latin Extended-A, which is
 * the whole repertoire of written French (plus Dutch/German names found in
 * Belgian reports). Canonical composition is likewise limited to Latin
 * letters with the combining accents used in those languages.
 */

#pragma once

#include "radvlp/core/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace radvlp::text {

/// Decodes UTF-8; malformed sequences raise InputError.
inline std::u32string decode_utf8(std::string_view in) {
    std::u32string out;
    out.reserve(in.size());
    std::size_t i = 0;
    const auto bad = [&] { throw InputError("malformed UTF-8 at byte " + std::to_string(i)); };
    while (i < in.size()) {
        const auto b0 = static_cast<unsigned char>(in[i]);
        char32_t cp = 0;
        int extra = 0;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            extra = 1;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            extra = 2;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            extra = 3;
        } else {
            bad();
        }
        if (i + static_cast<std::size_t>(extra) >= in.size() && extra > 0) bad();
        for (int k = 1; k <= extra; ++k) {
            const auto b = static_cast<unsigned char>(in[i + k]);
            if ((b & 0xC0) != 0x80) bad();
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad();
        out.push_back(cp);
        i += 1 + extra;
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode_utf8(std::u32string_view in) {
    std::string out;
    out.reserve(in.size());
    for (char32_t cp : in) append_utf8(out, cp);
    return out;
}

inline std::size_t codepoint_length(std::string_view utf8) {
    std::size_t n = 0;
    for (char c : utf8) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

/// Substring [start, end) counted in code points.
inline std::string slice_codepoints(std::string_view utf8, std::size_t start, std::size_t end) {
    const std::u32string cps = decode_utf8(utf8);
    if (start > end || end > cps.size()) {
        throw InputError("slice_codepoints: range [" + std::to_string(start) + ", " + std::to_string(end) +
                         ") outside text of length " + std::to_string(cps.size()));
    }
    return encode_utf8(std::u32string_view(cps).substr(start, end - start));
}

// ---------------------------------------------------------------------------
// Character classes
// ---------------------------------------------------------------------------

inline bool is_space(char32_t c) noexcept {
    switch (c) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

inline bool is_digit(char32_t c) noexcept { return c >= U'0' && c <= U'9'; }

inline bool is_combining_mark(char32_t c) noexcept { return c >= 0x0300 && c <= 0x036F; }

inline bool is_letter(char32_t c) noexcept {
    if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
    if (c >= 0xC0 && c <= 0x24F) return c != 0xD7 && c != 0xF7;
    return is_combining_mark(c);
}

inline bool is_alnum(char32_t c) noexcept { return is_letter(c) || is_digit(c); }

namespace detail {

// Latin Extended-A alternates upper/lower in pairs, with the parity flipped
// on 0x0139..0x0148 and 0x0179..0x017E.
inline bool ext_a_is_upper(char32_t c) noexcept {
    if (c == 0x0138 || c == 0x0149 || c == 0x017F) return false;
    if ((c >= 0x0139 && c <= 0x0148) || (c >= 0x0179 && c <= 0x017E)) return (c & 1) == 1;
    if (c == 0x0178) return true;
    return (c & 1) == 0;
}

}  // namespace detail

inline bool is_upper(char32_t c) noexcept {
    if (c >= U'A' && c <= U'Z') return true;
    if (c >= 0xC0 && c <= 0xDE) return c != 0xD7;
    if (c >= 0x0100 && c <= 0x017F) return detail::ext_a_is_upper(c);
    return false;
}

inline bool is_lower(char32_t c) noexcept {
    if (c >= U'a' && c <= U'z') return true;
    if (c >= 0xDF && c <= 0xFF) return c != 0xF7;
    if (c >= 0x0100 && c <= 0x017F) return !detail::ext_a_is_upper(c);
    return false;
}

inline char32_t to_lower(char32_t c) noexcept {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if (c == 0x0178) return 0xFF;
    if (c >= 0x0100 && c <= 0x017F && detail::ext_a_is_upper(c)) return c + 1;
    return c;
}

inline char32_t to_upper(char32_t c) noexcept {
    if (c >= U'a' && c <= U'z') return c - 32;
    if (c >= 0xE0 && c <= 0xFE && c != 0xF7) return c - 32;
    if (c == 0xFF) return 0x0178;
    if (c >= 0x0101 && c <= 0x017F && is_lower(c) && c != 0x0138 && c != 0x0149 && c != 0x017F) return c - 1;
    return c;
}

// ---------------------------------------------------------------------------
// Canonical composition (Latin subset)
// ---------------------------------------------------------------------------

namespace detail {

struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

// Every Latin-1 / Latin Extended-A letter carrying a single accent that
// French, Dutch or German text is likely to contain in decomposed form.
inline constexpr std::array<Composition, 68> kCompositions{{
    {U'A', 0x300, 0xC0}, {U'A', 0x301, 0xC1}, {U'A', 0x302, 0xC2}, {U'A', 0x303, 0xC3}, {U'A', 0x308, 0xC4},
    {U'A', 0x30A, 0xC5}, {U'C', 0x327, 0xC7}, {U'E', 0x300, 0xC8}, {U'E', 0x301, 0xC9}, {U'E', 0x302, 0xCA},
    {U'E', 0x308, 0xCB}, {U'I', 0x300, 0xCC}, {U'I', 0x301, 0xCD}, {U'I', 0x302, 0xCE}, {U'I', 0x308, 0xCF},
    {U'N', 0x303, 0xD1}, {U'O', 0x300, 0xD2}, {U'O', 0x301, 0xD3}, {U'O', 0x302, 0xD4}, {U'O', 0x303, 0xD5},
    {U'O', 0x308, 0xD6}, {U'U', 0x300, 0xD9}, {U'U', 0x301, 0xDA}, {U'U', 0x302, 0xDB}, {U'U', 0x308, 0xDC},
    {U'Y', 0x301, 0xDD}, {U'a', 0x300, 0xE0}, {U'a', 0x301, 0xE1}, {U'a', 0x302, 0xE2}, {U'a', 0x303, 0xE3},
    {U'a', 0x308, 0xE4}, {U'a', 0x30A, 0xE5}, {U'c', 0x327, 0xE7}, {U'e', 0x300, 0xE8}, {U'e', 0x301, 0xE9},
    {U'e', 0x302, 0xEA}, {U'e', 0x308, 0xEB}, {U'i', 0x300, 0xEC}, {U'i', 0x301, 0xED}, {U'i', 0x302, 0xEE},
    {U'i', 0x308, 0xEF}, {U'n', 0x303, 0xF1}, {U'o', 0x300, 0xF2}, {U'o', 0x301, 0xF3}, {U'o', 0x302, 0xF4},
    {U'o', 0x303, 0xF5}, {U'o', 0x308, 0xF6}, {U'u', 0x300, 0xF9}, {U'u', 0x301, 0xFA}, {U'u', 0x302, 0xFB},
    {U'u', 0x308, 0xFC}, {U'y', 0x301, 0xFD}, {U'y', 0x308, 0xFF}, {U'Y', 0x308, 0x178}, {U'C', 0x301, 0x106},
    {U'c', 0x301, 0x107}, {U'E', 0x328, 0x118}, {U'e', 0x328, 0x119}, {U'N', 0x301, 0x143}, {U'n', 0x301, 0x144},
    {U'S', 0x301, 0x15A}, {U's', 0x301, 0x15B}, {U'S', 0x30C, 0x160}, {U's', 0x30C, 0x161}, {U'Z', 0x30C, 0x17D},
    {U'z', 0x30C, 0x17E}, {U'C', 0x30C, 0x10C}, {U'c', 0x30C, 0x10D},
}};

}  // namespace detail

/// Composes base letter + combining accent pairs into precomposed code points.
inline std::u32string compose_latin(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    for (char32_t c : in) {
        if (is_combining_mark(c) && !out.empty()) {
            const auto it = std::find_if(detail::kCompositions.begin(), detail::kCompositions.end(),
                                         [&](const detail::Composition& k) { return k.base == out.back() && k.mark == c; });
            if (it != detail::kCompositions.end()) {
                out.back() = it->composed;
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

/// Composition + lowercase + whitespace runs collapsed to one space, trimmed.
inline std::u32string normalize_key(std::u32string_view in) {
    std::u32string composed = compose_latin(in);
    std::u32string out;
    out.reserve(composed.size());
    bool pending_space = false;
    for (char32_t c : composed) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(to_lower(c));
    }
    return out;
}

inline std::string normalize_key(std::string_view utf8) {
    return encode_utf8(normalize_key(std::u32string_view(decode_utf8(utf8))));
}

inline std::u32string lowercase(std::u32string_view in) {
    std::u32string out(in);
    for (char32_t& c : out) c = to_lower(c);
    return out;
}

inline std::u32string uppercase(std::u32string_view in) {
    std::u32string out(in);
    for (char32_t& c : out) c = to_upper(c);
    return out;
}

/// Uppercases the first letter of every word (a word starts after a non-letter).
inline std::u32string titlecase(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    bool at_word_start = true;
    for (char32_t c : in) {
        if (is_letter(c)) {
            out.push_back(at_word_start ? to_upper(c) : to_lower(c));
            at_word_start = false;
        } else {
            out.push_back(c);
            at_word_start = true;
        }
    }
    return out;
}

inline bool is_capitalized(std::u32string_view word) noexcept { return !word.empty() && is_upper(word.front()); }

inline bool is_all_upper(std::u32string_view word) noexcept {
    bool any = false;
    for (char32_t c : word) {
        if (is_lower(c)) return false;
        if (is_upper(c)) any = true;
    }
    return any;
}

}  // namespace radvlp::text
