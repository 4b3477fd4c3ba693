#include "radvlp/embed/metrics.hpp"
#include "radvlp/embed/probe.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace radvlp;
using namespace radvlp::embed;

namespace {

struct Split {
    Matrix xtr, xva;
    std::vector<double> ytr, yva;
};

/// Two clusters at +/- c on a random unit axis with unit noise elsewhere; margin well above 1.
Split separable(std::mt19937& rng, std::size_t n, Eigen::Index d) {
    std::normal_distribution<double> g;
    Vector axis(d);
    for (Eigen::Index i = 0; i < d; ++i) axis[i] = g(rng);
    axis.normalize();
    auto make = [&](std::size_t m, Matrix& x, std::vector<double>& y) {
        x.resize(static_cast<Eigen::Index>(m), d);
        for (std::size_t i = 0; i < m; ++i) {
            const double label = i % 3 == 0 ? 1.0 : 0.0;  // imbalanced on purpose
            Vector v(d);
            for (Eigen::Index j = 0; j < d; ++j) v[j] = 0.3 * g(rng);
            v -= v.dot(axis) * axis;
            v += (label == 1.0 ? 1.0 : -1.0) * (1.0 + std::abs(g(rng)) * 0.2) * axis;
            x.row(static_cast<Eigen::Index>(i)) = v.transpose();
            y.push_back(label);
        }
    };
    Split s;
    make(n, s.xtr, s.ytr);
    make(n / 2, s.xva, s.yva);
    return s;
}

Split linear_targets(std::mt19937& rng, std::size_t n, Eigen::Index d) {
    std::normal_distribution<double> g;
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i) a[i] = g(rng);
    const double b = 3.0;
    auto make = [&](std::size_t m, Matrix& x, std::vector<double>& y) {
        x.resize(static_cast<Eigen::Index>(m), d);
        for (std::size_t i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), j) = g(rng);
            y.push_back(x.row(static_cast<Eigen::Index>(i)).dot(a.transpose()) + b);
        }
    };
    Split s;
    make(n, s.xtr, s.ytr);
    make(n / 2, s.xva, s.yva);
    return s;
}

std::vector<int> as_int(const std::vector<double>& y) { return {y.begin(), y.end()}; }

/// Norm-wise relative difference between the analytic and central-difference gradients.
double gradient_error(const ProbeModel& m, const Matrix& x, const std::vector<double>& y, double pw) {
    const double h = 1e-4;
    const ProbeGradient g = probe_loss(m, x, y, pw);
    Vector analytic(g.grad_weights.size() + 1), numeric(g.grad_weights.size() + 1);
    analytic << g.grad_weights, g.grad_bias;
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        ProbeModel plus = m, minus = m;
        if (i < g.grad_weights.size()) {
            plus.weights[i] += h;
            minus.weights[i] -= h;
        } else {
            plus.bias += h;
            minus.bias -= h;
        }
        numeric[i] = (probe_loss(plus, x, y, pw).loss - probe_loss(minus, x, y, pw).loss) / (2 * h);
    }
    return (analytic - numeric).norm() / numeric.norm();
}

}  // namespace

TEST(Probe, SeparableClassifierReachesHighAuroc) {
    std::mt19937 rng(51);
    const Split s = separable(rng, 200, 8);
    const ProbeResult r = train_probe(s.xtr, s.ytr, s.xva, s.yva, ProbeKind::LogisticClassifier);
    EXPECT_DOUBLE_EQ(r.pos_weight, 133.0 / 67.0);
    EXPECT_GE(auroc(r.model.predict(s.xva), as_int(s.yva)), 0.99);
    EXPECT_GT(r.best_epoch, 0u);
}

TEST(Probe, NoiselessRegressionRecoversTargets) {
    std::mt19937 rng(52);
    const Split s = linear_targets(rng, 200, 8);
    ProbeConfig cfg;
    cfg.max_epochs = 120000;
    const ProbeResult r = train_probe(s.xtr, s.ytr, s.xva, s.yva, ProbeKind::LinearRegressor, cfg);
    EXPECT_LE(mad(r.model.predict(s.xva), s.yva), 1e-2 * sample_std(s.yva));
}

TEST(Probe, ZeroEpochsReturnsInitialization) {
    std::mt19937 rng(53);
    const Split s = linear_targets(rng, 40, 3);
    ProbeConfig cfg;
    cfg.max_epochs = 0;
    const ProbeResult r = train_probe(s.xtr, s.ytr, s.xva, s.yva, ProbeKind::LinearRegressor, cfg);
    EXPECT_TRUE(r.model.weights.isZero(0));
    EXPECT_EQ(r.model.bias, 0.0);
    EXPECT_DOUBLE_EQ(r.model.predict(s.xva)[0], mean(s.ytr));
    const Split c = separable(rng, 30, 3);
    const ProbeResult rc = train_probe(c.xtr, c.ytr, c.xva, c.yva, ProbeKind::LogisticClassifier, cfg);
    EXPECT_TRUE(rc.model.weights.isZero(0));
    EXPECT_EQ(rc.epochs_run, 0u);
}

TEST(ProbeProperties, AnalyticGradientsMatchFiniteDifferences) {
    std::mt19937 rng(54);
    std::normal_distribution<double> g;
    for (int t = 0; t < 30; ++t) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 5);
        const std::size_t n = 5 + rng() % 20;
        Matrix x(static_cast<Eigen::Index>(n), d);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
        std::vector<double> yc(n), yr(n);
        for (std::size_t i = 0; i < n; ++i) {
            yc[i] = static_cast<double>(rng() % 2);
            yr[i] = 4.0 * g(rng);
        }
        ProbeModel m;
        m.weights = Vector(d);
        for (Eigen::Index i = 0; i < d; ++i) m.weights[i] = g(rng);
        m.bias = g(rng);
        m.kind = ProbeKind::LogisticClassifier;
        EXPECT_LE(gradient_error(m, x, yc, 0.5 + t % 4), 1e-4);
        m.kind = ProbeKind::LinearRegressor;
        m.scale = 2.0;
        m.shift = 0.5;
        EXPECT_LE(gradient_error(m, x, yr, 1.0), 1e-4);
    }
}

TEST(PlateauSchedule, ScriptedTrace) {
    PlateauSchedule s(1e-4);
    using Step = PlateauSchedule::Step;
    EXPECT_EQ(s.observe(1.0), Step::Improved);
    EXPECT_EQ(s.observe(0.9), Step::Improved);
    EXPECT_EQ(s.observe(0.9), Step::Plateau);   // equal is not a decrease
    EXPECT_EQ(s.observe(0.95), Step::Plateau);
    EXPECT_DOUBLE_EQ(s.lr(), 1e-4);
    EXPECT_EQ(s.observe(0.91), Step::Halved);   // third bad epoch
    EXPECT_DOUBLE_EQ(s.lr(), 5e-5);
    EXPECT_EQ(s.observe(0.8), Step::Improved);  // counter resets
    for (int i = 0; i < 2; ++i) EXPECT_EQ(s.observe(1.0), Step::Plateau);
    EXPECT_EQ(s.observe(1.0), Step::Halved);
    EXPECT_DOUBLE_EQ(s.lr(), 2.5e-5);
    for (int i = 0; i < 2; ++i) EXPECT_EQ(s.observe(1.0), Step::Plateau);
    EXPECT_EQ(s.observe(1.0), Step::Halved);
    for (int i = 0; i < 2; ++i) EXPECT_EQ(s.observe(1.0), Step::Plateau);
    EXPECT_EQ(s.observe(1.0), Step::Halved);
    EXPECT_DOUBLE_EQ(s.lr(), 1e-4 / 16);
    EXPECT_EQ(s.bad_epochs(), 9u);
    EXPECT_EQ(s.observe(1.0), Step::Stop);      // tenth bad epoch
    EXPECT_DOUBLE_EQ(s.best(), 0.8);
}

TEST(Probe, TrainingStopsOnPlateauAndKeepsBestModel) {
    // Validation inputs are the negated training inputs, so every step that fits training hurts validation.
    std::mt19937 rng(55);
    Split s = linear_targets(rng, 50, 3);
    s.xva = -s.xtr;
    s.yva = s.ytr;
    ProbeConfig cfg;
    cfg.learning_rate = 0.05;
    const ProbeResult r = train_probe(s.xtr, s.ytr, s.xva, s.yva, ProbeKind::LinearRegressor, cfg);
    EXPECT_EQ(r.epochs_run, 10u);
    EXPECT_EQ(r.best_epoch, 0u);
    EXPECT_TRUE(r.model.weights.isZero(0));
    ASSERT_EQ(r.learning_rates.size(), 10u);
    EXPECT_DOUBLE_EQ(r.learning_rates[2], 0.05);
    EXPECT_DOUBLE_EQ(r.learning_rates[3], 0.025);
    EXPECT_DOUBLE_EQ(r.learning_rates[6], 0.0125);
    EXPECT_DOUBLE_EQ(r.learning_rates[9], 0.00625);
}

TEST(Probe, Errors) {
    std::mt19937 rng(56);
    const Split s = separable(rng, 30, 3);
    std::vector<double> ones(s.ytr.size(), 1.0);
    EXPECT_THROW(train_probe(s.xtr, ones, s.xva, s.yva, ProbeKind::LogisticClassifier), InputError);
    std::vector<double> bad = s.ytr;
    bad[0] = 2.0;
    EXPECT_THROW(train_probe(s.xtr, bad, s.xva, s.yva, ProbeKind::LogisticClassifier), InputError);
    EXPECT_THROW(train_probe(s.xtr, s.ytr, Matrix::Zero(2, 4), std::vector<double>{0, 1}, ProbeKind::LogisticClassifier),
                 InputError);
    EXPECT_THROW(parse_probe_kind("svm"), InputError);
}
