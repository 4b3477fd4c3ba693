/**
 * @file probe.hpp
 * @brief Linear probes on frozen embeddings: a class-weighted logistic
 * classifier and a Huber-loss linear regressor, trained by full-batch
 * gradient descent with a plateau learning-rate schedule.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/embed/embedding.hpp"
#include "radvlp/embed/metrics.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace radvlp::embed {

enum class ProbeKind { LogisticClassifier, LinearRegressor };

inline std::string_view probe_kind_name(ProbeKind k) {
    return k == ProbeKind::LogisticClassifier ? "classifier" : "regressor";
}

inline ProbeKind parse_probe_kind(std::string_view s) {
    if (s == "classifier") return ProbeKind::LogisticClassifier;
    if (s == "regressor") return ProbeKind::LinearRegressor;
    throw InputError("unknown probe kind '" + std::string(s) + "' (expected classifier or regressor)");
}

struct ProbeModel {
    ProbeKind kind = ProbeKind::LogisticClassifier;
    Vector weights;
    double bias = 0.0;
    // Regressor output = scale * (w.x + b) + shift.
    double scale = 1.0;
    double shift = 0.0;

    /// Raw linear output (logit for the classifier, standardized value for the regressor).
    Vector linear(const Matrix& x) const {
        if (x.cols() != weights.size()) throw InputError("probe: embedding dimension does not match weights");
        return (x * weights).array() + bias;
    }

    /// Classifier: logits (usable as scores). Regressor: predictions in target units.
    std::vector<double> predict(const Matrix& x) const {
        const Vector z = linear(x);
        std::vector<double> out(static_cast<std::size_t>(z.size()));
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            out[static_cast<std::size_t>(i)] = kind == ProbeKind::LinearRegressor ? scale * z[i] + shift : z[i];
        }
        return out;
    }
};

struct ProbeGradient {
    double loss = 0.0;
    Vector grad_weights;
    double grad_bias = 0.0;
};

namespace detail {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace detail

/**
 * @brief Mean loss and its gradient w.r.t. weights and bias.
 *
 * Classifier: binary cross-entropy with positives weighted by
 * @p pos_weight. Regressor: Huber (delta 1) between the linear output and
 * the standardized target (y - shift) / scale.
 */
inline ProbeGradient probe_loss(const ProbeModel& m, const Matrix& x, std::span<const double> y, double pos_weight = 1.0) {
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) throw InputError("probe: rows and targets differ");
    const Vector z = m.linear(x);
    Vector dz(z.size());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double t = y[static_cast<std::size_t>(i)];
        if (m.kind == ProbeKind::LogisticClassifier) {
            loss += t * pos_weight * detail::softplus(-z[i]) + (1.0 - t) * detail::softplus(z[i]);
            const double s = detail::sigmoid(z[i]);
            dz[i] = t * pos_weight * (s - 1.0) + (1.0 - t) * s;
        } else {
            const double r = z[i] - (t - m.shift) / m.scale;
            const double a = std::abs(r);
            loss += a <= 1.0 ? 0.5 * r * r : a - 0.5;
            dz[i] = a <= 1.0 ? r : (r > 0 ? 1.0 : -1.0);
        }
    }
    const double n = static_cast<double>(z.size());
    ProbeGradient g;
    g.loss = loss / n;
    g.grad_weights = x.transpose() * dz / n;
    g.grad_bias = dz.sum() / n;
    return g;
}

/**
 * @brief Plateau schedule on the validation loss.
 *
 * An epoch that does not strictly lower the best validation loss is a bad
 * epoch. Every 3 consecutive bad epochs halve the learning rate; 10
 * consecutive bad epochs stop training.
 */
class PlateauSchedule {
public:
    enum class Step { Improved, Plateau, Halved, Stop };

    explicit PlateauSchedule(double lr, std::size_t halve_after = 3, std::size_t stop_after = 10)
        : lr_(lr), halve_after_(halve_after), stop_after_(stop_after) {}

    Step observe(double validation_loss) {
        if (validation_loss < best_) {
            best_ = validation_loss;
            bad_ = 0;
            return Step::Improved;
        }
        ++bad_;
        if (bad_ >= stop_after_) return Step::Stop;
        if (bad_ % halve_after_ == 0) {
            lr_ *= 0.5;
            return Step::Halved;
        }
        return Step::Plateau;
    }

    double lr() const { return lr_; }
    double best() const { return best_; }
    std::size_t bad_epochs() const { return bad_; }

private:
    double lr_;
    std::size_t halve_after_;
    std::size_t stop_after_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t bad_ = 0;
};

struct ProbeConfig {
    double learning_rate = 1e-4;
    std::size_t max_epochs = 2000;
    std::size_t halve_after = 3;
    std::size_t stop_after = 10;

    void validate() const {
        if (!(learning_rate > 0.0)) throw InputError("probe learning rate must be positive");
        if (halve_after == 0 || stop_after == 0) throw InputError("probe patience values must be positive");
    }
};

struct ProbeResult {
    ProbeModel model;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;  // 0 = initialization
    double best_validation_loss = 0.0;
    double pos_weight = 1.0;
    std::vector<double> validation_losses;
    std::vector<double> learning_rates;
};

/// Initial model: zero weights and bias; a regressor also gets scale/shift from the training targets.
inline ProbeModel initial_probe(ProbeKind kind, std::size_t dim, std::span<const double> y_train) {
    ProbeModel m;
    m.kind = kind;
    m.weights = Vector::Zero(static_cast<Eigen::Index>(dim));
    if (kind == ProbeKind::LinearRegressor) {
        m.shift = mean(y_train);
        const double s = sample_std(y_train);
        m.scale = s > 0 ? s : 1.0;
    }
    return m;
}

/// Positive weight n- / n+ over binary training labels.
inline double positive_weight(std::span<const double> y) {
    double pos = 0, neg = 0;
    for (const double v : y) {
        if (v == 1.0) {
            ++pos;
        } else if (v == 0.0) {
            ++neg;
        } else {
            throw InputError("classifier labels must be 0 or 1");
        }
    }
    if (pos == 0 || neg == 0) throw InputError("classifier training set must contain both classes");
    return neg / pos;
}

inline ProbeResult train_probe(const Matrix& x_train, std::span<const double> y_train, const Matrix& x_valid,
                               std::span<const double> y_valid, ProbeKind kind, const ProbeConfig& cfg = {}) {
    cfg.validate();
    if (x_train.cols() != x_valid.cols()) throw InputError("probe: train and validation dimensions differ");
    if (static_cast<std::size_t>(x_train.rows()) != y_train.size() || y_train.empty()) {
        throw InputError("probe: training rows and targets differ");
    }
    if (static_cast<std::size_t>(x_valid.rows()) != y_valid.size() || y_valid.empty()) {
        throw InputError("probe: validation rows and targets differ");
    }
    if (!x_train.allFinite() || !x_valid.allFinite()) throw InputError("probe: non-finite embeddings");

    ProbeResult r;
    r.pos_weight = kind == ProbeKind::LogisticClassifier ? positive_weight(y_train) : 1.0;
    if (kind == ProbeKind::LogisticClassifier) {
        for (const double v : y_valid) {
            if (v != 0.0 && v != 1.0) throw InputError("classifier labels must be 0 or 1");
        }
    }
    ProbeModel model = initial_probe(kind, static_cast<std::size_t>(x_train.cols()), y_train);
    r.model = model;
    r.best_validation_loss = probe_loss(model, x_valid, y_valid, r.pos_weight).loss;

    PlateauSchedule schedule(cfg.learning_rate, cfg.halve_after, cfg.stop_after);
    schedule.observe(r.best_validation_loss);
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const ProbeGradient g = probe_loss(model, x_train, y_train, r.pos_weight);
        model.weights -= schedule.lr() * g.grad_weights;
        model.bias -= schedule.lr() * g.grad_bias;
        if (!model.weights.allFinite() || !std::isfinite(model.bias)) throw ComputeError("probe training diverged");
        const double val = probe_loss(model, x_valid, y_valid, r.pos_weight).loss;
        r.validation_losses.push_back(val);
        r.learning_rates.push_back(schedule.lr());
        r.epochs_run = epoch;
        const auto step = schedule.observe(val);
        if (step == PlateauSchedule::Step::Improved) {
            r.model = model;
            r.best_epoch = epoch;
            r.best_validation_loss = val;
        }
        if (step == PlateauSchedule::Step::Stop) break;
    }
    return r;
}

}  // namespace radvlp::embed
