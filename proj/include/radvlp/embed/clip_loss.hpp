/**
 * @file clip_loss.hpp
 * @brief Symmetric contrastive (CLIP) loss over matched image/text rows.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/embed/embedding.hpp"
#include "radvlp/embed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace radvlp::embed {

struct ClipLossConfig {
    double temperature = 0.07;

    void validate() const {
        if (!(temperature > 0.0) || !std::isfinite(temperature)) throw InputError("temperature must be positive and finite");
    }
};

/// Cosine similarity matrix S[i][j] = cos(a_i, b_j).
inline Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InputError("similarity: dimension mismatch");
    Matrix s(a.rows(), b.rows());
    const auto d = static_cast<std::size_t>(a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            s(i, j) = cosine_similarity(std::span<const double>(a.data() + i * a.cols(), d),
                                        std::span<const double>(b.data() + j * b.cols(), d));
        }
    }
    return s;
}

namespace detail {

/// Cross-entropy of one logit vector against target index @p t.
inline double cross_entropy(const std::vector<double>& logits, std::size_t t) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double s = 0.0;
    for (const double z : logits) s += std::exp(z - m);
    return m + std::log(s) - logits[t];
}

}  // namespace detail

/// Loss from a precomputed similarity matrix (diagonal = matched pairs).
inline double clip_loss_from_similarity(const Matrix& sim, const ClipLossConfig& cfg = {}) {
    cfg.validate();
    if (sim.rows() != sim.cols() || sim.rows() == 0) throw InputError("clip loss needs a non-empty square similarity matrix");
    const auto n = static_cast<std::size_t>(sim.rows());
    std::vector<double> buf(n);
    double rows = 0.0, cols = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) buf[j] = sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / cfg.temperature;
        rows += detail::cross_entropy(buf, i);
        for (std::size_t j = 0; j < n; ++j) buf[j] = sim(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) / cfg.temperature;
        cols += detail::cross_entropy(buf, i);
    }
    const double loss = 0.5 * (rows + cols) / static_cast<double>(n);
    if (!std::isfinite(loss)) throw ComputeError("clip loss is not finite");
    return std::max(loss, 0.0);
}

inline double clip_loss(const EmbeddingMatrix& images, const EmbeddingMatrix& texts, const ClipLossConfig& cfg = {}) {
    if (images.rows() != texts.rows()) throw InputError("clip loss: image and text row counts differ");
    if (images.dim() != texts.dim()) throw InputError("clip loss: image and text dimensions differ");
    return clip_loss_from_similarity(cosine_similarity_matrix(images.data, texts.data), cfg);
}

}  // namespace radvlp::embed
