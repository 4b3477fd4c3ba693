/**
 * @file metrics.hpp
 * @brief Distances, ranking metrics and fold splitting over embeddings.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/rng.hpp"
#include "radvlp/embed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace radvlp::embed {

/// Sequential dot product so results never depend on vectorization width.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw InputError("cosine: vectors differ in length");
    const double nu = std::sqrt(dot(u.data(), u.data(), u.size()));
    const double nv = std::sqrt(dot(v.data(), v.data(), v.size()));
    if (nu == 0.0 || nv == 0.0) throw InputError("cosine: zero vector");
    const double c = dot(u.data(), v.data(), u.size()) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_similarity(u, v);
}

inline double cosine_distance(const Vector& u, const Vector& v) {
    return cosine_distance(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                           std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

/// Cosine distance from every row of @p m to @p q.
inline std::vector<double> distances_to(const EmbeddingMatrix& m, const Vector& q) {
    if (static_cast<std::size_t>(q.size()) != m.dim()) throw InputError("query dimension does not match embeddings");
    std::vector<double> out(m.rows());
    const std::span<const double> qs(q.data(), static_cast<std::size_t>(q.size()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out[i] = cosine_distance(std::span<const double>(m.data.data() + i * m.dim(), m.dim()), qs);
    }
    return out;
}

/**
 * Area under the ROC curve as Mann-Whitney U / (n+ n-), with tied scores
 * receiving their average rank.
 */
inline double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InputError("auroc: scores and labels differ in length");
    std::size_t npos = 0;
    for (const int l : labels) {
        if (l != 0 && l != 1) throw InputError("auroc: labels must be 0 or 1");
        npos += static_cast<std::size_t>(l);
    }
    const std::size_t nneg = labels.size() - npos;
    if (npos == 0 || nneg == 0) throw InputError("auroc: both classes must be present");
    for (const double s : scores) {
        if (!std::isfinite(s)) throw InputError("auroc: non-finite score");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Ranks are 1-based; a tie block [i, j) shares rank (i + j + 1) / 2.
    double pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j + 1);
        for (std::size_t t = i; t < j; ++t) pos_rank_sum += labels[order[t]] == 1 ? rank : 0.0;
        i = j;
    }
    const double np = static_cast<double>(npos), nn = static_cast<double>(nneg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

/// Row indices of @p m sorted by ascending distance to @p q, ties by ascending id.
inline std::vector<std::size_t> rank_by_distance(const EmbeddingMatrix& m, const Vector& q) {
    const std::vector<double> d = distances_to(m, q);
    std::vector<std::size_t> order(m.rows());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (d[a] != d[b]) return d[a] < d[b];
        return m.ids[a] < m.ids[b];
    });
    return order;
}

/// Fraction of the @p k images nearest to @p query whose label is @p query_label.
inline double precision_at_k(const Vector& query, const EmbeddingMatrix& images, std::span<const int> labels,
                             int query_label, std::size_t k) {
    if (labels.size() != images.rows()) throw InputError("precision@k: labels do not match images");
    if (k == 0 || k > images.rows()) {
        throw InputError("precision@k: k=" + std::to_string(k) + " outside [1, " + std::to_string(images.rows()) + "]");
    }
    const std::vector<std::size_t> order = rank_by_distance(images, query);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]] == query_label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

/**
 * @brief Seeded partition of @p ids into @p k folds.
 *
 * Ids are sorted, shuffled with the seeded stream, then dealt into
 * contiguous folds; the first n % k folds get one extra item.
 */
inline std::vector<std::vector<std::string>> kfold_split(std::vector<std::string> ids, std::size_t k, std::uint64_t seed) {
    if (k == 0 || k > ids.size()) {
        throw InputError("kfold: k=" + std::to_string(k) + " needs 1 <= k <= n=" + std::to_string(ids.size()));
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("kfold: duplicate ids");
    RandomStream stream(splitmix64(seed));
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[stream.below(i)]);
    std::vector<std::vector<std::string>> folds(k);
    const std::size_t base = ids.size() / k, extra = ids.size() % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos), ids.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return folds;
}

inline io::ordered_json folds_to_json(const std::vector<std::vector<std::string>>& folds) {
    io::ordered_json j = io::ordered_json::object();
    for (std::size_t f = 0; f < folds.size(); ++f) j[std::to_string(f)] = folds[f];
    return j;
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw InputError("mean of an empty sample");
    double s = 0.0;
    for (const double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_std(std::span<const double> x) {
    const double m = mean(x);
    if (x.size() < 2) return 0.0;
    double s = 0.0;
    for (const double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Mean absolute deviation between predictions and targets.
inline double mad(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw InputError("mad: length mismatch");
    if (pred.empty()) throw InputError("mad: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return s / static_cast<double>(pred.size());
}

}  // namespace radvlp::embed
