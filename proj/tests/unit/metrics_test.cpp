#include "radvlp/embed/metrics.hpp"
#include "radvlp/embed/retrieval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace radvlp;
using namespace radvlp::embed;

namespace {

/// Pairwise Mann-Whitney count with half credit for ties.
double pairwise_auroc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    std::size_t i = 0;
    for (const double e : v) x[static_cast<Eigen::Index>(i++)] = e;
    return x;
}

}  // namespace

TEST(CosineDistance, IdentityOrthogonalAntipodal) {
    EXPECT_NEAR(cosine_distance(vec({1, 2, 3}), vec({1, 2, 3})), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(cosine_distance(vec({1, 0}), vec({0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(cosine_distance(vec({1, 0}), vec({-1, 0})), 2.0);
    EXPECT_THROW(cosine_distance(vec({0, 0}), vec({1, 0})), InputError);
    EXPECT_THROW(cosine_distance(vec({1}), vec({1, 0})), InputError);
}

TEST(Auroc, Examples) {
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> y{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(auroc(s, y), 0.75);
    EXPECT_DOUBLE_EQ(auroc(std::vector<double>{1, 2, 3}, std::vector<int>{0, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(auroc(std::vector<double>{5, 5, 5, 5}, std::vector<int>{0, 1, 0, 1}), 0.5);
    EXPECT_THROW(auroc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), InputError);
    EXPECT_THROW(auroc(std::vector<double>{1, 2}, std::vector<int>{1, 2}), InputError);
}

TEST(AurocProperties, MatchesPairwiseCount) {
    std::mt19937 rng(21);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng() % 999;
        std::vector<double> s(n);
        std::vector<int> y(n);
        // Coarse scores force plenty of ties.
        for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(rng() % 50) / 7.0;
        for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(rng() % 2);
        y[0] = 0;
        y[1] = 1;
        EXPECT_NEAR(auroc(s, y), pairwise_auroc(s, y), 1e-12);
    }
}

TEST(PrecisionAtK, Examples) {
    const auto m = from_rows({{1, 0}, {0.9, 0.1}, {0, 1}, {-1, 0}, {0.5, 0.5}}, {"a", "b", "c", "d", "e"});
    const std::vector<int> all1(5, 1);
    EXPECT_DOUBLE_EQ(precision_at_k(vec({1, 0}), m, all1, 1, 3), 1.0);
    const std::vector<int> lab{1, 1, 0, 0, 0};
    EXPECT_DOUBLE_EQ(precision_at_k(vec({1, 0}), m, lab, 1, 5), 0.4);
    // Order from the query (1,0): a, b, e, c, d.
    EXPECT_DOUBLE_EQ(precision_at_k(vec({1, 0}), m, lab, 1, 2), 1.0);
    EXPECT_DOUBLE_EQ(precision_at_k(vec({1, 0}), m, lab, 1, 3), 2.0 / 3.0);
    EXPECT_THROW(precision_at_k(vec({1, 0}), m, lab, 1, 6), InputError);
}

TEST(PrecisionAtK, TiesBreakById) {
    const auto m = from_rows({{1, 0}, {1, 0}}, {"z", "a"});
    const std::vector<int> lab{1, 0};
    EXPECT_DOUBLE_EQ(precision_at_k(vec({1, 0}), m, lab, 0, 1), 1.0);
}

TEST(PrecisionAtKProperties, MatchesFullSort) {
    std::mt19937 rng(22);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 50 + rng() % 451, d = 2 + rng() % 6;
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        std::vector<std::string> ids;
        std::vector<int> lab(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : rows[i]) v = std::round(g(rng) * 2) / 2;  // ties likely
            if (std::all_of(rows[i].begin(), rows[i].end(), [](double v) { return v == 0; })) rows[i][0] = 1;
            ids.push_back("id" + std::to_string(rng() % 100000) + "_" + std::to_string(i));
            lab[i] = static_cast<int>(rng() % 2);
        }
        const auto m = from_rows(rows, ids);
        Vector q(static_cast<Eigen::Index>(d));
        for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = g(rng) + 0.01;
        // Oracle: sort (distance, id, label) triples with the standard library.
        std::vector<std::tuple<double, std::string, int>> all;
        for (std::size_t i = 0; i < n; ++i) {
            const Vector r = m.row(i);
            const double dist = 1.0 - r.dot(q) / (r.norm() * q.norm());
            all.emplace_back(dist, ids[i], lab[i]);
        }
        std::sort(all.begin(), all.end());
        for (const std::size_t k : {10u, 50u}) {
            double hits = 0;
            for (std::size_t i = 0; i < k; ++i) hits += std::get<2>(all[i]) == 1;
            EXPECT_DOUBLE_EQ(precision_at_k(q, m, lab, 1, k), hits / static_cast<double>(k));
        }
    }
}

TEST(Metrics, ScaleInvariance) {
    std::mt19937 rng(23);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> rows(40, std::vector<double>(4));
    for (auto& r : rows) {
        for (auto& v : r) v = g(rng);
    }
    std::vector<std::vector<double>> scaled = rows;
    for (auto& r : scaled) {
        for (auto& v : r) v *= 3.7;
    }
    const auto a = from_rows(rows), b = from_rows(scaled);
    const Vector q = vec({0.3, -1, 2, 0.5});
    std::vector<int> lab(40);
    for (auto& l : lab) l = static_cast<int>(rng() % 2);
    EXPECT_EQ(rank_by_distance(a, q), rank_by_distance(b, q * 2.5));
    EXPECT_EQ(precision_at_k(q, a, lab, 1, 10), precision_at_k(q * 2.5, b, lab, 1, 10));
}

TEST(KFold, SizesAndDeterminism) {
    std::vector<std::string> ten, eleven;
    for (int i = 0; i < 10; ++i) ten.push_back("i" + std::to_string(i));
    eleven = ten;
    eleven.push_back("extra");
    for (const auto& f : kfold_split(ten, 5, 3)) EXPECT_EQ(f.size(), 2u);
    std::vector<std::size_t> sizes;
    for (const auto& f : kfold_split(eleven, 5, 3)) sizes.push_back(f.size());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));
    EXPECT_EQ(kfold_split(eleven, 5, 9), kfold_split(eleven, 5, 9));
    EXPECT_NE(kfold_split(eleven, 5, 9), kfold_split(eleven, 5, 10));
    std::vector<std::string> reversed(eleven.rbegin(), eleven.rend());
    EXPECT_EQ(kfold_split(reversed, 5, 9), kfold_split(eleven, 5, 9));
    EXPECT_THROW(kfold_split(ten, 11, 0), InputError);
    EXPECT_THROW(kfold_split({"a", "a"}, 2, 0), InputError);
}

TEST(KFoldProperties, FoldsPartitionIds) {
    std::mt19937 rng(24);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 5 + rng() % 200, k = 1 + rng() % 5;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
        const auto folds = kfold_split(ids, k, rng());
        std::multiset<std::string> seen;
        std::size_t lo = n, hi = 0;
        for (const auto& f : folds) {
            seen.insert(f.begin(), f.end());
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
        }
        EXPECT_EQ(seen, std::multiset<std::string>(ids.begin(), ids.end()));
        EXPECT_LE(hi - lo, 1u);
    }
}

TEST(Mad, Examples) {
    EXPECT_DOUBLE_EQ(mad(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
    EXPECT_DOUBLE_EQ(mad(std::vector<double>{1, 3}, std::vector<double>{2, 2}), 1.0);
    std::mt19937 rng(25);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<double> p(333), t(333);
    long double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = u(rng);
        t[i] = u(rng);
        sum += std::fabs(static_cast<long double>(p[i]) - t[i]);
    }
    EXPECT_NEAR(mad(p, t), static_cast<double>(sum / 333), 1e-12);
    EXPECT_THROW(mad(std::vector<double>{1}, std::vector<double>{}), InputError);
}

TEST(Retrieval, PublishedFoldSetFormatsAsReported) {
    // Per-fold precisions (percent) that reproduce a reported "64 (12.9)" cell.
    const std::vector<double> folds{0.45, 0.60, 0.65, 0.70, 0.80};
    EXPECT_EQ(format_mean_std_percent(mean(folds), sample_std(folds)), "64.0 (12.9)");
    const std::vector<double> b{0.90, 0.95, 0.95, 0.95, 1.00}, c{0.45, 0.50, 0.55, 0.55, 0.55};
    EXPECT_EQ(format_mean_std_percent(mean(b), sample_std(b)), "95.0 (3.5)");
    EXPECT_EQ(format_mean_std_percent(mean(c), sample_std(c)), "52.0 (4.5)");
}

TEST(Retrieval, FoldReportAveragesClassQueries) {
    // Two clusters along the axes; class 1 near (1,0), class 0 near (0,1).
    std::vector<std::vector<double>> rows;
    std::vector<std::string> ids;
    std::vector<int> lab;
    for (int i = 0; i < 40; ++i) {
        const bool one = i % 2 == 0;
        rows.push_back(one ? std::vector<double>{1.0, 0.01 * i} : std::vector<double>{0.01 * i, 1.0});
        ids.push_back("im" + std::to_string(100 + i));
        lab.push_back(one ? 1 : 0);
    }
    const auto m = from_rows(rows, ids);
    const std::vector<RetrievalQuery> q{{"abnormal", 1, vec({1, 0})}, {"normal", 0, vec({0, 1})}};
    const auto folds = kfold_split(ids, 5, 1);
    const RetrievalReport r = retrieval_report(m, lab, q, {2, 8}, folds);
    ASSERT_EQ(r.by_k.size(), 2u);
    EXPECT_EQ(r.by_k[0].per_fold.size(), 5u);
    for (const auto& s : r.by_k) {
        for (const double v : s.per_fold) EXPECT_GE(v, 0.5);
    }
    EXPECT_DOUBLE_EQ(r.by_k[0].mean, 1.0);
    EXPECT_DOUBLE_EQ(r.by_k[0].std, 0.0);
    const std::string table = render_retrieval_table(r);
    EXPECT_NE(table.find("Prec@2"), std::string::npos);
    EXPECT_NE(table.find("100.0 (0.0)"), std::string::npos);
    EXPECT_EQ(render_retrieval_csv(r).substr(0, 40).find("k,fold_0,fold_1"), 0u);
    EXPECT_THROW(retrieval_report(m, lab, q, {9}, folds), InputError);
}
