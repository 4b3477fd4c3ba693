/**
 * @file zeroshot.hpp
 * @brief Zero-shot abnormality scores from prompt embeddings, and study pooling.
 *
 * Scores follow "distance to normal minus distance to abnormal", so a
 * higher score means more abnormal and a positive score predicts abnormal.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/embed/embedding.hpp"
#include "radvlp/embed/metrics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radvlp::embed {

enum class Strategy { TextBinary, TextEnumeration, LatentMinimum, LatentMean };

inline constexpr std::array<Strategy, 4> kAllStrategies{Strategy::TextBinary, Strategy::TextEnumeration,
                                                       Strategy::LatentMinimum, Strategy::LatentMean};

inline std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::TextBinary: return "text-binary";
        case Strategy::TextEnumeration: return "text-enum";
        case Strategy::LatentMinimum: return "latent-min";
        case Strategy::LatentMean: return "latent-mean";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    for (const Strategy s : kAllStrategies) {
        if (strategy_name(s) == name) return s;
    }
    throw InputError("unknown strategy '" + std::string(name) +
                     "' (expected text-binary, text-enum, latent-min or latent-mean)");
}

struct PromptEntry {
    std::string prompt;
    Vector embedding;
};

struct PromptSet {
    Strategy strategy = Strategy::TextBinary;
    std::vector<PromptEntry> normal;
    std::vector<PromptEntry> abnormal;

    void validate() const {
        const bool single = strategy == Strategy::TextBinary || strategy == Strategy::TextEnumeration;
        for (const auto* side : {&normal, &abnormal}) {
            if (side->empty()) throw InputError(std::string(strategy_name(strategy)) + ": every class needs a prompt");
            if (single && side->size() != 1) {
                throw InputError(std::string(strategy_name(strategy)) + ": exactly one prompt per class is required");
            }
        }
        const Eigen::Index d = normal.front().embedding.size();
        for (const auto* side : {&normal, &abnormal}) {
            for (const PromptEntry& e : *side) {
                if (e.embedding.size() != d) throw InputError("prompt embeddings differ in dimension");
                if (!e.embedding.allFinite()) throw InputError("prompt '" + e.prompt + "' has non-finite embedding");
            }
        }
    }

    std::size_t dim() const { return normal.empty() ? 0 : static_cast<std::size_t>(normal.front().embedding.size()); }
};

namespace detail {

inline Vector mean_embedding(const std::vector<PromptEntry>& entries) {
    Vector m = Vector::Zero(entries.front().embedding.size());
    for (const PromptEntry& e : entries) m += e.embedding;
    return m / static_cast<double>(entries.size());
}

/// Distance from @p x to one class, aggregated by the strategy.
inline double class_distance(std::span<const double> x, const std::vector<PromptEntry>& entries, Strategy s) {
    auto dist = [&](const Vector& v) {
        return cosine_distance(x, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    };
    if (s == Strategy::LatentMinimum) {
        double best = std::numeric_limits<double>::infinity();
        for (const PromptEntry& e : entries) best = std::min(best, dist(e.embedding));
        return best;
    }
    if (s == Strategy::LatentMean && entries.size() > 1) return dist(mean_embedding(entries));
    return dist(entries.front().embedding);
}

}  // namespace detail

/// Per-image abnormality score; > 0 predicts abnormal.
inline std::vector<double> zero_shot_scores(const EmbeddingMatrix& images, const PromptSet& prompts) {
    prompts.validate();
    if (prompts.dim() != images.dim()) {
        throw InputError("prompt dimension " + std::to_string(prompts.dim()) + " does not match image dimension " +
                         std::to_string(images.dim()));
    }
    std::vector<double> out(images.rows());
    for (std::size_t i = 0; i < images.rows(); ++i) {
        const std::span<const double> x(images.data.data() + i * images.dim(), images.dim());
        out[i] = detail::class_distance(x, prompts.normal, prompts.strategy) -
                 detail::class_distance(x, prompts.abnormal, prompts.strategy);
    }
    return out;
}

struct StudyScore {
    std::string study_id;
    double score = 0.0;
    std::size_t images = 0;
};

/// Mean score per study, in ascending study-id order.
inline std::vector<StudyScore> pool_study_scores(const std::vector<std::string>& image_ids, std::span<const double> scores,
                                                 const std::map<std::string, std::string>& image_to_study) {
    if (image_ids.size() != scores.size()) throw InputError("pooling: ids and scores differ in length");
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t i = 0; i < image_ids.size(); ++i) {
        const auto it = image_to_study.find(image_ids[i]);
        if (it == image_to_study.end()) throw InputError("image '" + image_ids[i] + "' has no study in the grouping");
        groups[it->second].push_back(scores[i]);
    }
    std::vector<StudyScore> out;
    for (auto& [study, vals] : groups) {
        // Sorted before summing so the result ignores image order within a study.
        std::sort(vals.begin(), vals.end());
        out.push_back({study, mean(vals), vals.size()});
    }
    return out;
}

/// Pooling over explicit study membership; an empty study is an error.
inline std::vector<StudyScore> pool_study_scores(const std::map<std::string, std::vector<double>>& per_study) {
    std::vector<StudyScore> out;
    for (const auto& [study, vals] : per_study) {
        if (vals.empty()) throw InputError("study '" + study + "' has no images");
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        out.push_back({study, mean(sorted), sorted.size()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prompt files
// ---------------------------------------------------------------------------

/// Prompt text plus the row that holds its embedding (by id, or by index).
struct PromptRef {
    std::string prompt;
    std::string row_id;
    std::optional<std::size_t> row_index;
};

struct PromptSpec {
    std::vector<PromptRef> normal;
    std::vector<PromptRef> abnormal;
};

/// A dataset's prompts for each strategy.
struct PromptFile {
    std::string dataset;
    std::map<Strategy, PromptSpec> strategies;
};

namespace detail {

inline PromptRef prompt_ref_from_json(const io::json& j) {
    if (j.is_string()) return {j.get<std::string>(), j.get<std::string>(), std::nullopt};
    if (!j.is_object() || !j.contains("prompt") || !j["prompt"].is_string()) {
        throw InputError("prompt entry must be a string or an object with a 'prompt' string");
    }
    PromptRef r{j["prompt"].get<std::string>(), j["prompt"].get<std::string>(), std::nullopt};
    if (j.contains("row")) {
        if (j["row"].is_string()) {
            r.row_id = j["row"].get<std::string>();
        } else if (j["row"].is_number_unsigned()) {
            r.row_index = j["row"].get<std::size_t>();
        } else {
            throw InputError("prompt 'row' must be an id string or a non-negative index");
        }
    }
    return r;
}

inline std::vector<PromptRef> prompt_list(const io::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("prompt spec needs a '") + key + "' array");
    std::vector<PromptRef> out;
    for (const auto& e : j[key]) out.push_back(prompt_ref_from_json(e));
    return out;
}

}  // namespace detail

inline PromptFile prompt_file_from_json(const io::json& j) {
    if (!j.is_object() || !j.contains("strategies") || !j["strategies"].is_object()) {
        throw InputError("prompt file needs a 'strategies' object");
    }
    PromptFile f;
    if (j.contains("dataset") && j["dataset"].is_string()) f.dataset = j["dataset"].get<std::string>();
    for (const auto& [name, spec] : j["strategies"].items()) {
        f.strategies[parse_strategy(name)] = {detail::prompt_list(spec, "normal"), detail::prompt_list(spec, "abnormal")};
    }
    return f;
}

inline PromptFile load_prompt_file(const std::string& path) {
    try {
        return prompt_file_from_json(io::read_json_file(path));
    } catch (const LineError&) {
        throw;
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

/// Binds prompt references to rows of the prompt embedding matrix.
inline PromptSet resolve_prompts(const PromptSpec& spec, Strategy strategy, const EmbeddingMatrix& prompt_rows) {
    const auto index = prompt_rows.index();
    auto bind = [&](const std::vector<PromptRef>& refs) {
        std::vector<PromptEntry> out;
        for (const PromptRef& r : refs) {
            std::size_t row = 0;
            if (r.row_index) {
                if (*r.row_index >= prompt_rows.rows()) throw InputError("prompt row index out of range for '" + r.prompt + "'");
                row = *r.row_index;
            } else {
                const auto it = index.find(r.row_id);
                if (it == index.end()) throw InputError("no prompt embedding with id '" + r.row_id + "'");
                row = it->second;
            }
            out.push_back({r.prompt, prompt_rows.row(row)});
        }
        return out;
    };
    PromptSet s{strategy, bind(spec.normal), bind(spec.abnormal)};
    s.validate();
    return s;
}

}  // namespace radvlp::embed
