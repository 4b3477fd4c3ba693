/**
 * @file lexicon.hpp
 * @brief Word lists used both to detect PHI and to sample surrogates.
 *
 * File format: UTF-8, one entry per line, optionally followed by a TAB and
 * a positive integer frequency. Blank lines and lines starting with '#' are
 * ignored.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace radvlp::deid {

class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::string name) : name_(std::move(name)) {}

    /// Adds an entry; duplicates (after normalization) are ignored.
    void add(std::string_view display, std::optional<double> weight = std::nullopt) {
        std::u32string key = text::normalize_key(std::u32string_view(text::decode_utf8(display)));
        if (key.empty()) return;
        if (weight && !(*weight > 0.0)) throw InputError("lexicon " + name_ + ": weights must be positive");
        if (!entries_.insert(key).second) return;
        const std::size_t words = 1 + static_cast<std::size_t>(std::count(key.begin(), key.end(), U' '));
        max_words_ = std::max(max_words_, words);
        display_.emplace_back(display);
        weights_.push_back(weight.value_or(0.0));
        if (weight) has_weights_ = true;
    }

    bool contains(std::u32string_view normalized) const {
        return entries_.count(std::u32string(normalized)) != 0;
    }

    bool contains_text(std::string_view raw) const {
        return contains(text::normalize_key(std::u32string_view(text::decode_utf8(raw))));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return display_.size(); }
    bool empty() const noexcept { return display_.empty(); }
    std::size_t max_words() const noexcept { return max_words_; }
    bool weighted() const noexcept { return has_weights_; }

    /// Entries in file order, as written (original casing).
    const std::vector<std::string>& display() const noexcept { return display_; }
    /// Per-entry weight; entries without an explicit weight count as 1 when the lexicon is weighted.
    double weight(std::size_t i) const noexcept { return weights_[i] > 0.0 ? weights_[i] : 1.0; }

private:
    std::string name_;
    std::unordered_set<std::u32string> entries_;
    std::vector<std::string> display_;
    std::vector<double> weights_;
    std::size_t max_words_ = 0;
    bool has_weights_ = false;
};

inline Lexicon parse_lexicon(std::string name, std::string_view content) {
    Lexicon lex(std::move(name));
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        std::optional<double> weight;
        if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
            std::string_view w = line.substr(tab + 1);
            long long value = 0;
            const auto res = std::from_chars(w.data(), w.data() + w.size(), value);
            if (res.ec != std::errc() || res.ptr != w.data() + w.size() || value <= 0) {
                throw InputError("lexicon " + lex.name() + ":" + std::to_string(line_no) + ": invalid weight");
            }
            weight = static_cast<double>(value);
            line = line.substr(0, tab);
        }
        try {
            lex.add(line, weight);
        } catch (const InputError& e) {
            throw InputError("lexicon " + lex.name() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return lex;
}

inline Lexicon load_lexicon(const std::string& path, std::string name = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open lexicon '" + path + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_lexicon(name.empty() ? path : std::move(name), content);
}

/// Union of several lexicons, keeping the first occurrence of each entry.
inline Lexicon merge_lexicons(std::string name, const std::vector<const Lexicon*>& parts) {
    Lexicon out(std::move(name));
    for (const Lexicon* part : parts) {
        for (std::size_t i = 0; i < part->size(); ++i) {
            out.add(part->display()[i], part->weighted() ? std::optional<double>(part->weight(i)) : std::nullopt);
        }
    }
    return out;
}

}  // namespace radvlp::deid
