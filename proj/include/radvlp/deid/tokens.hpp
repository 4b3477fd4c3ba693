/**
 * @file tokens.hpp
 * @brief Code-point tokenizer and the case-normalized view the name rules read.
 */

#pragma once

#include "radvlp/core/text.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace radvlp::deid {

enum class TokenKind { Word, Number, Punct };

struct Token {
    std::size_t start = 0;
    std::size_t end = 0;
    TokenKind kind = TokenKind::Punct;
};

/**
 * @brief Text prepared for rule matching.
 *
 * `text` is the document as code points; `cased` is the same text where
 * every line written entirely in capitals is rewritten word-wise as
 * "Capitalized" (same length, same offsets). Capitalization-driven rules read
 * `cased`, everything else reads `text`.
 */
struct DocumentView {
    std::u32string text;
    std::u32string cased;
    std::vector<Token> tokens;

    std::u32string_view slice(std::size_t start, std::size_t end) const {
        return std::u32string_view(text).substr(start, end - start);
    }
    std::u32string_view cased_slice(std::size_t start, std::size_t end) const {
        return std::u32string_view(cased).substr(start, end - start);
    }
    std::u32string_view word(std::size_t i) const { return slice(tokens[i].start, tokens[i].end); }
    std::u32string_view cased_word(std::size_t i) const { return cased_slice(tokens[i].start, tokens[i].end); }

    char32_t at(std::size_t pos) const { return pos < text.size() ? text[pos] : U'\0'; }
    char32_t before(std::size_t pos) const { return pos > 0 && pos <= text.size() ? text[pos - 1] : U'\0'; }
};

/// Words are letter runs with internal hyphens ("Jean-Pierre"); numbers are digit runs.
inline std::vector<Token> tokenize(std::u32string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char32_t c = s[i];
        if (text::is_space(c)) {
            ++i;
        } else if (text::is_letter(c)) {
            std::size_t j = i + 1;
            while (j < s.size()) {
                if (text::is_letter(s[j])) {
                    ++j;
                } else if (s[j] == U'-' && j + 1 < s.size() && text::is_letter(s[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back({i, j, TokenKind::Word});
            i = j;
        } else if (text::is_digit(c)) {
            std::size_t j = i + 1;
            while (j < s.size() && text::is_digit(s[j])) ++j;
            out.push_back({i, j, TokenKind::Number});
            i = j;
        } else {
            out.push_back({i, i + 1, TokenKind::Punct});
            ++i;
        }
    }
    return out;
}

/// Lowercases all but the first letter of each word on all-uppercase lines.
inline std::u32string normalize_uppercase_lines(std::u32string_view s) {
    std::u32string out(s);
    std::size_t line_start = 0;
    while (line_start <= s.size()) {
        std::size_t line_end = s.find(U'\n', line_start);
        if (line_end == std::u32string_view::npos) line_end = s.size();
        std::size_t letters = 0;
        bool has_lower = false;
        for (std::size_t k = line_start; k < line_end; ++k) {
            if (text::is_letter(s[k]) && !text::is_combining_mark(s[k])) ++letters;
            if (text::is_lower(s[k])) has_lower = true;
        }
        if (letters >= 2 && !has_lower) {
            const std::u32string titled = text::titlecase(s.substr(line_start, line_end - line_start));
            out.replace(line_start, line_end - line_start, titled);
        }
        line_start = line_end + 1;
    }
    return out;
}

inline DocumentView make_view(std::u32string text) {
    DocumentView v;
    v.cased = normalize_uppercase_lines(text);
    v.tokens = tokenize(text);
    v.text = std::move(text);
    return v;
}

/// True when [a, b) is non-empty and holds only same-line whitespace.
inline bool is_inline_gap(std::u32string_view s, std::size_t a, std::size_t b) {
    if (a >= b) return false;
    for (std::size_t k = a; k < b; ++k) {
        if (!text::is_space(s[k]) || s[k] == U'\n' || s[k] == U'\r') return false;
    }
    return true;
}

}  // namespace radvlp::deid
