/**
 * @file lda.hpp
 * @brief Two-class Fisher discriminant direction and 1-D projections.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/embed/embedding.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace radvlp::embed {

struct LdaResult {
    Vector direction;                // unit length, class 1 projects higher
    std::vector<double> projections; // one per row of X
    double ridge = 0.0;
    double separation = 0.0;         // (m1 - m0)^2 / (v0 + v1) of the projections
};

inline LdaResult lda_direction(const Matrix& x, std::span<const int> labels) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (static_cast<std::size_t>(n) != labels.size()) throw InputError("lda: labels do not match rows");
    if (d == 0) throw InputError("lda: zero-dimensional data");
    Vector mu[2] = {Vector::Zero(d), Vector::Zero(d)};
    double count[2] = {0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        if (l != 0 && l != 1) throw InputError("lda: labels must be 0 or 1");
        mu[l] += x.row(i).transpose();
        count[l] += 1;
    }
    if (count[0] == 0 || count[1] == 0) throw InputError("lda: both classes must be present");
    mu[0] /= count[0];
    mu[1] /= count[1];

    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector c = x.row(i).transpose() - mu[labels[static_cast<std::size_t>(i)]];
        sw.noalias() += c * c.transpose();
    }
    const Vector diff = mu[1] - mu[0];
    if (diff.norm() == 0.0) throw ComputeError("lda: class means are identical");
    const double ridge = 1e-6 * sw.trace() / static_cast<double>(d);
    if (!(ridge > 0.0)) throw ComputeError("lda: within-class scatter is zero");
    sw.diagonal().array() += ridge;

    const Eigen::LDLT<Eigen::MatrixXd> solver(sw);
    if (solver.info() != Eigen::Success) throw ComputeError("lda: scatter factorization failed");
    Vector w = solver.solve(diff);
    if (!w.allFinite() || w.norm() == 0.0) throw ComputeError("lda: degenerate direction");
    w.normalize();
    if (w.dot(diff) < 0) w = -w;

    LdaResult r;
    r.direction = w;
    r.ridge = ridge;
    r.projections.resize(static_cast<std::size_t>(n));
    double m[2] = {0, 0}, v[2] = {0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = x.row(i).dot(w.transpose());
        r.projections[static_cast<std::size_t>(i)] = p;
        m[labels[static_cast<std::size_t>(i)]] += p;
    }
    m[0] /= count[0];
    m[1] /= count[1];
    for (Eigen::Index i = 0; i < n; ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        const double c = r.projections[static_cast<std::size_t>(i)] - m[l];
        v[l] += c * c;
    }
    const double spread = v[0] / count[0] + v[1] / count[1];
    r.separation = spread > 0 ? (m[1] - m[0]) * (m[1] - m[0]) / spread : INFINITY;
    return r;
}

}  // namespace radvlp::embed
