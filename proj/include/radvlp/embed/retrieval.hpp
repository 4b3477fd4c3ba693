/**
 * @file retrieval.hpp
 * @brief Text-to-image retrieval precision@k over k folds.
 *
 * Each fold is scored on its own images: every class query retrieves its
 * k nearest images, the fold value is the mean precision over the class
 * queries, and the report gives mean and sample std across folds.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/embed/embedding.hpp"
#include "radvlp/embed/metrics.hpp"

#include <cstdio>
#include <string>
#include <unordered_map>
#include <vector>

namespace radvlp::embed {

struct RetrievalQuery {
    std::string class_name;
    int label = 0;
    Vector embedding;
};

struct PrecisionSummary {
    std::size_t k = 0;
    std::vector<double> per_fold;
    double mean = 0.0;
    double std = 0.0;
};

struct RetrievalReport {
    std::vector<PrecisionSummary> by_k;
    std::size_t folds = 0;
};

/// Precision@k of one image subset, averaged over the class queries.
inline double query_averaged_precision(const EmbeddingMatrix& images, std::span<const int> labels,
                                       const std::vector<RetrievalQuery>& queries, std::size_t k) {
    if (queries.empty()) throw InputError("retrieval needs at least one class query");
    double sum = 0.0;
    for (const RetrievalQuery& q : queries) {
        sum += precision_at_k(q.embedding, images, labels, q.label, k);
    }
    return sum / static_cast<double>(queries.size());
}

inline RetrievalReport retrieval_report(const EmbeddingMatrix& images, std::span<const int> labels,
                                        const std::vector<RetrievalQuery>& queries, const std::vector<std::size_t>& ks,
                                        const std::vector<std::vector<std::string>>& folds) {
    if (labels.size() != images.rows()) throw InputError("retrieval: labels do not match images");
    const auto index = images.index();
    RetrievalReport report;
    report.folds = folds.size();
    std::vector<EmbeddingMatrix> subsets;
    std::vector<std::vector<int>> subset_labels;
    for (const auto& fold : folds) {
        std::vector<std::size_t> rows;
        std::vector<int> lab;
        for (const std::string& id : fold) {
            const auto it = index.find(id);
            if (it == index.end()) throw InputError("fold id '" + id + "' is not an embedding row");
            rows.push_back(it->second);
            lab.push_back(labels[it->second]);
        }
        subsets.push_back(images.select(rows));
        subset_labels.push_back(std::move(lab));
    }
    for (const std::size_t k : ks) {
        PrecisionSummary s;
        s.k = k;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            s.per_fold.push_back(query_averaged_precision(subsets[f], subset_labels[f], queries, k));
        }
        s.mean = mean(s.per_fold);
        s.std = sample_std(s.per_fold);
        report.by_k.push_back(std::move(s));
    }
    return report;
}

/// "mean (std)" in percent with one decimal, e.g. "64.0 (12.9)".
inline std::string format_mean_std_percent(double mean_value, double std_value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f (%.1f)", 100.0 * mean_value, 100.0 * std_value);
    return buf;
}

inline std::string render_retrieval_table(const RetrievalReport& r) {
    std::string header, values;
    for (const PrecisionSummary& s : r.by_k) {
        const std::string cell = format_mean_std_percent(s.mean, s.std);
        const std::string name = "Prec@" + std::to_string(s.k);
        const std::size_t w = std::max(cell.size(), name.size());
        header += (header.empty() ? "" : " | ") + name + std::string(w - name.size(), ' ');
        values += (values.empty() ? "" : " | ") + cell + std::string(w - cell.size(), ' ');
    }
    return header + "\n" + values + "\n";
}

inline std::string render_retrieval_csv(const RetrievalReport& r) {
    std::string out = "k";
    for (std::size_t f = 0; f < r.folds; ++f) out += ",fold_" + std::to_string(f);
    out += ",mean,std\n";
    char buf[32];
    for (const PrecisionSummary& s : r.by_k) {
        out += std::to_string(s.k);
        for (const double v : s.per_fold) {
            std::snprintf(buf, sizeof buf, ",%.6f", v);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.6f", s.mean);
        out += buf;
        std::snprintf(buf, sizeof buf, ",%.6f\n", s.std);
        out += buf;
    }
    return out;
}

inline io::ordered_json to_json(const RetrievalReport& r) {
    io::ordered_json j;
    j["folds"] = r.folds;
    j["std"] = "sample";
    j["results"] = io::ordered_json::array();
    for (const PrecisionSummary& s : r.by_k) {
        io::ordered_json e;
        e["k"] = s.k;
        e["per_fold"] = s.per_fold;
        e["mean"] = s.mean;
        e["std"] = s.std;
        e["cell"] = format_mean_std_percent(s.mean, s.std);
        j["results"].push_back(std::move(e));
    }
    return j;
}

}  // namespace radvlp::embed
