/**
 * @file resize.hpp
 * @brief Resolution adaptation of ViT weights: bilinear position-embedding
 * interpolation and pseudoinverse patch-kernel resizing.
 *
 * Bilinear interpolation is corner aligned throughout: sample i of n maps
 * to source position i * (m - 1) / (n - 1), so the first and last samples
 * of the new grid sit on the first and last samples of the old one.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radvlp::vit {

using MatrixXd = Eigen::MatrixXd;

inline constexpr double kPinvCutoff = 1e-10;

struct PositionEmbedding {
    std::vector<double> cls;   // prefix token(s), flattened; may be empty
    std::size_t h = 0, w = 0, d = 0;
    std::vector<double> grid;  // h x w x d, row-major

    void validate() const {
        if (h == 0 || w == 0 || d == 0) throw InputError("position embedding grid must be non-empty");
        if (grid.size() != h * w * d) throw InputError("position embedding grid size does not match h*w*d");
        if (cls.size() % d != 0) throw InputError("prefix tokens do not match the embedding width");
        for (const double v : grid) {
            if (!std::isfinite(v)) throw InputError("position embedding has non-finite values");
        }
    }
};

/// Patch kernel in canonical out x p x p x in (OHWI) order.
struct PatchKernel {
    std::size_t out_channels = 0, p = 0, in_channels = 0;
    std::vector<double> data;

    void validate() const {
        if (p == 0) throw InputError("patch size must be >= 1");
        if (data.size() != out_channels * p * p * in_channels) throw InputError("patch kernel size mismatch");
        for (const double v : data) {
            if (!std::isfinite(v)) throw InputError("patch kernel has non-finite values");
        }
    }

    double at(std::size_t o, std::size_t y, std::size_t x, std::size_t c) const {
        return data[((o * p + y) * p + x) * in_channels + c];
    }
};

/// 1-D corner-aligned bilinear operator of shape (n_new, n_old); each row sums to 1.
inline MatrixXd interpolation_matrix(std::size_t n_old, std::size_t n_new) {
    if (n_old == 0 || n_new == 0) throw InputError("interpolation sizes must be >= 1");
    MatrixXd r = MatrixXd::Zero(static_cast<Eigen::Index>(n_new), static_cast<Eigen::Index>(n_old));
    for (std::size_t i = 0; i < n_new; ++i) {
        double pos;
        if (n_new == 1) {
            pos = 0.5 * static_cast<double>(n_old - 1);
        } else {
            pos = static_cast<double>(i) * static_cast<double>(n_old - 1) / static_cast<double>(n_new - 1);
        }
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        const auto ii = static_cast<Eigen::Index>(i);
        if (frac == 0.0 || lo + 1 >= n_old) {
            r(ii, static_cast<Eigen::Index>(std::min(lo, n_old - 1))) = 1.0;
        } else {
            r(ii, static_cast<Eigen::Index>(lo)) = 1.0 - frac;
            r(ii, static_cast<Eigen::Index>(lo + 1)) = frac;
        }
    }
    return r;
}

/// Resizes every channel of the grid; prefix tokens are copied unchanged.
inline PositionEmbedding interpolate_pos_embed(const PositionEmbedding& pe, std::size_t new_h, std::size_t new_w) {
    pe.validate();
    if (new_h == 0 || new_w == 0) throw InputError("new grid size must be >= 1");
    const MatrixXd rh = interpolation_matrix(pe.h, new_h), rw = interpolation_matrix(pe.w, new_w);
    PositionEmbedding out{pe.cls, new_h, new_w, pe.d, std::vector<double>(new_h * new_w * pe.d, 0.0)};
    for (std::size_t i = 0; i < new_h; ++i) {
        for (std::size_t j = 0; j < new_w; ++j) {
            double* dst = out.grid.data() + (i * new_w + j) * pe.d;
            for (std::size_t a = 0; a < pe.h; ++a) {
                const double wa = rh(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
                if (wa == 0.0) continue;
                for (std::size_t b = 0; b < pe.w; ++b) {
                    const double wb = rw(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b));
                    if (wb == 0.0) continue;
                    const double wt = wa * wb;
                    const double* src = pe.grid.data() + (a * pe.w + b) * pe.d;
                    for (std::size_t c = 0; c < pe.d; ++c) dst[c] += wt * src[c];
                }
            }
        }
    }
    return out;
}

/**
 * @brief Operator B (p_new^2 x p_old^2) with B x = bilinear resize of the
 * row-major flattened p_old x p_old patch x.
 */
inline MatrixXd build_resize_matrix(std::size_t p_old, std::size_t p_new) {
    const MatrixXd r = interpolation_matrix(p_old, p_new);
    const auto po = static_cast<Eigen::Index>(p_old), pn = static_cast<Eigen::Index>(p_new);
    MatrixXd b(pn * pn, po * po);
    for (Eigen::Index i = 0; i < pn; ++i) {
        for (Eigen::Index j = 0; j < pn; ++j) {
            for (Eigen::Index a = 0; a < po; ++a) {
                for (Eigen::Index c = 0; c < po; ++c) b(i * pn + j, a * po + c) = r(i, a) * r(j, c);
            }
        }
    }
    return b;
}

/// Moore-Penrose pseudoinverse by SVD, dropping singular values below cutoff * sigma_max.
inline MatrixXd pseudoinverse(const MatrixXd& m, double cutoff = kPinvCutoff) {
    const Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw ComputeError("SVD failed");
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.size() ? s.maxCoeff() : 0.0;
    Eigen::VectorXd inv(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) inv[i] = (smax > 0 && s[i] > cutoff * smax) ? 1.0 / s[i] : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Resize operator applied to each flattened kernel slice: (B^+)^T, shape (p_new^2, p_old^2).
inline MatrixXd kernel_resize_operator(std::size_t p_old, std::size_t p_new) {
    if (p_old == p_new) {
        const auto n = static_cast<Eigen::Index>(p_old * p_old);
        return MatrixXd::Identity(n, n);
    }
    return pseudoinverse(build_resize_matrix(p_old, p_new)).transpose();
}

/**
 * @brief Resizes every (out, in) kernel slice w to (B^+)^T w.
 *
 * For p_new > p_old the result satisfies <w_new, B x> = <w, x> for any
 * patch x; shrinking kernels has no such guarantee.
 */
inline PatchKernel pseudoinverse_patch_resize(const PatchKernel& k, std::size_t p_new, unsigned threads = 1) {
    k.validate();
    if (p_new == 0) throw InputError("new patch size must be >= 1");
    if (p_new == k.p) return k;
    const MatrixXd op = kernel_resize_operator(k.p, p_new);
    if (!op.allFinite()) throw ComputeError("resize operator is not finite");
    PatchKernel out{k.out_channels, p_new, k.in_channels, std::vector<double>(k.out_channels * p_new * p_new * k.in_channels)};
    const std::size_t po2 = k.p * k.p, pn2 = p_new * p_new;
    parallel_for(k.out_channels, threads, [&](std::size_t o) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(po2));
        for (std::size_t c = 0; c < k.in_channels; ++c) {
            for (std::size_t s = 0; s < po2; ++s) w[static_cast<Eigen::Index>(s)] = k.data[(o * po2 + s) * k.in_channels + c];
            const Eigen::VectorXd r = op * w;
            for (std::size_t s = 0; s < pn2; ++s) out.data[(o * pn2 + s) * k.in_channels + c] = r[static_cast<Eigen::Index>(s)];
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Kernel layouts
// ---------------------------------------------------------------------------

enum class KernelLayout { OHWI, OIHW, HWIO };

inline std::string_view layout_name(KernelLayout l) {
    switch (l) {
        case KernelLayout::OHWI: return "OHWI";
        case KernelLayout::OIHW: return "OIHW";
        case KernelLayout::HWIO: return "HWIO";
    }
    return "?";
}

inline KernelLayout parse_layout(std::string_view s) {
    for (const KernelLayout l : {KernelLayout::OHWI, KernelLayout::OIHW, KernelLayout::HWIO}) {
        if (layout_name(l) == s) return l;
    }
    throw InputError("unknown kernel layout '" + std::string(s) + "' (expected OHWI, OIHW or HWIO)");
}

/// Converts a 4-D tensor in @p layout to a canonical kernel; the two spatial extents must agree.
inline PatchKernel kernel_from_tensor(std::span<const std::size_t> shape, std::span<const double> values, KernelLayout layout) {
    if (shape.size() != 4) throw InputError("patch kernel tensor must be 4-D");
    std::size_t o = 0, h = 0, w = 0, i = 0;
    switch (layout) {
        case KernelLayout::OHWI: o = shape[0], h = shape[1], w = shape[2], i = shape[3]; break;
        case KernelLayout::OIHW: o = shape[0], i = shape[1], h = shape[2], w = shape[3]; break;
        case KernelLayout::HWIO: h = shape[0], w = shape[1], i = shape[2], o = shape[3]; break;
    }
    if (h != w) throw InputError("patch kernel must be square");
    PatchKernel k{o, h, i, std::vector<double>(values.size())};
    if (values.size() != o * h * w * i) throw InputError("patch kernel tensor size mismatch");
    for (std::size_t a = 0; a < o; ++a) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                for (std::size_t c = 0; c < i; ++c) {
                    std::size_t src = 0;
                    switch (layout) {
                        case KernelLayout::OHWI: src = ((a * h + y) * w + x) * i + c; break;
                        case KernelLayout::OIHW: src = ((a * i + c) * h + y) * w + x; break;
                        case KernelLayout::HWIO: src = ((y * w + x) * i + c) * o + a; break;
                    }
                    k.data[((a * h + y) * w + x) * i + c] = values[src];
                }
            }
        }
    }
    return k;
}

/// Inverse of kernel_from_tensor: returns (shape, values) in @p layout.
inline std::pair<std::vector<std::size_t>, std::vector<double>> kernel_to_tensor(const PatchKernel& k, KernelLayout layout) {
    const std::size_t o = k.out_channels, h = k.p, w = k.p, i = k.in_channels;
    std::vector<double> v(k.data.size());
    std::vector<std::size_t> shape;
    switch (layout) {
        case KernelLayout::OHWI: shape = {o, h, w, i}; break;
        case KernelLayout::OIHW: shape = {o, i, h, w}; break;
        case KernelLayout::HWIO: shape = {h, w, i, o}; break;
    }
    for (std::size_t a = 0; a < o; ++a) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                for (std::size_t c = 0; c < i; ++c) {
                    std::size_t dst = 0;
                    switch (layout) {
                        case KernelLayout::OHWI: dst = ((a * h + y) * w + x) * i + c; break;
                        case KernelLayout::OIHW: dst = ((a * i + c) * h + y) * w + x; break;
                        case KernelLayout::HWIO: dst = ((y * w + x) * i + c) * o + a; break;
                    }
                    v[dst] = k.data[((a * h + y) * w + x) * i + c];
                }
            }
        }
    }
    return {shape, v};
}

/**
 * @brief Splits a (1, T, d) or (T, d) position tensor into prefix tokens and a grid.
 *
 * The grid is square unless @p grid_h and @p grid_w are given.
 */
inline PositionEmbedding pos_embed_from_tensor(std::span<const std::size_t> shape, std::span<const double> values,
                                               std::size_t prefix_tokens, std::size_t grid_h = 0, std::size_t grid_w = 0) {
    std::size_t t = 0, d = 0;
    if (shape.size() == 3 && shape[0] == 1) {
        t = shape[1], d = shape[2];
    } else if (shape.size() == 2) {
        t = shape[0], d = shape[1];
    } else {
        throw InputError("position embedding tensor must have shape (1, T, d) or (T, d)");
    }
    if (t <= prefix_tokens) throw InputError("position embedding has no grid tokens");
    const std::size_t n = t - prefix_tokens;
    if (grid_h == 0 || grid_w == 0) {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
        if (side * side != n) throw InputError("position grid of " + std::to_string(n) + " tokens is not square; give its shape");
        grid_h = grid_w = side;
    }
    if (grid_h * grid_w != n) throw InputError("position grid shape does not match token count");
    PositionEmbedding pe;
    pe.h = grid_h, pe.w = grid_w, pe.d = d;
    pe.cls.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(prefix_tokens * d));
    pe.grid.assign(values.begin() + static_cast<std::ptrdiff_t>(prefix_tokens * d), values.end());
    pe.validate();
    return pe;
}

/// Concatenates prefix tokens and grid back into a tensor with the original rank.
inline std::pair<std::vector<std::size_t>, std::vector<double>> pos_embed_to_tensor(const PositionEmbedding& pe,
                                                                                    std::size_t rank) {
    std::vector<double> v = pe.cls;
    v.insert(v.end(), pe.grid.begin(), pe.grid.end());
    const std::size_t t = v.size() / pe.d;
    std::vector<std::size_t> shape = rank == 3 ? std::vector<std::size_t>{1, t, pe.d} : std::vector<std::size_t>{t, pe.d};
    return {shape, v};
}

}  // namespace radvlp::vit
