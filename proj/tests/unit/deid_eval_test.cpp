#include "radvlp/deid/eval.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace radvlp;
using namespace radvlp::deid;

namespace {

PhiSpan sp(std::size_t a, std::size_t b, PhiCategory c = PhiCategory::Date) { return {a, b, c, {}}; }

std::vector<PhiSpan> random_spans(std::mt19937& rng, std::size_t max_n) {
    std::vector<PhiSpan> out;
    std::size_t pos = rng() % 3;
    const std::size_t n = rng() % (max_n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t len = 1 + rng() % 6;
        out.push_back(sp(pos, pos + len, kAllPhiCategories[rng() % 3]));
        pos += len + rng() % 4;
    }
    return out;
}

std::vector<SpanDocument> random_corpus(std::mt19937& rng, std::size_t docs) {
    std::vector<SpanDocument> out;
    for (std::size_t i = 0; i < docs; ++i) out.push_back({"d" + std::to_string(i), random_spans(rng, 8)});
    return out;
}

}  // namespace

TEST(MatchSpans, PerfectMatch) {
    const std::vector<PhiSpan> g{sp(0, 4), sp(10, 14, PhiCategory::Age)};
    const auto r = report_from_counts(match_spans(g, g, MatchPolicy::Exact), MatchPolicy::Exact);
    EXPECT_DOUBLE_EQ(r[PhiCategory::Date].precision, 1.0);
    EXPECT_DOUBLE_EQ(r[PhiCategory::Date].recall, 1.0);
    EXPECT_DOUBLE_EQ(r[PhiCategory::Age].f1, 1.0);
}

TEST(MatchSpans, OneHitOneSpurious) {
    const std::vector<PhiSpan> gold{sp(0, 4), sp(10, 14)};
    const std::vector<PhiSpan> pred{sp(0, 4), sp(20, 22)};
    const auto c = match_spans(pred, gold, MatchPolicy::Exact);
    EXPECT_EQ(c[index_of(PhiCategory::Date)], (MatchCounts{1, 1, 1}));
    const Metrics m = metrics_from_counts(c[index_of(PhiCategory::Date)]);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.f1, 0.5);
}

TEST(MatchSpans, OverlapVersusExact) {
    const std::vector<PhiSpan> gold{sp(0, 12, PhiCategory::Institution)};
    const std::vector<PhiSpan> pred{sp(3, 9, PhiCategory::Institution)};
    EXPECT_EQ(match_spans(pred, gold, MatchPolicy::Overlap)[index_of(PhiCategory::Institution)], (MatchCounts{1, 0, 0}));
    EXPECT_EQ(match_spans(pred, gold, MatchPolicy::Exact)[index_of(PhiCategory::Institution)], (MatchCounts{0, 1, 1}));
}

TEST(MatchSpans, CategoryMustAgree) {
    const auto c = match_spans(std::vector{sp(0, 5, PhiCategory::Location)}, std::vector{sp(0, 5, PhiCategory::Institution)},
                               MatchPolicy::Overlap);
    EXPECT_EQ(c[index_of(PhiCategory::Location)], (MatchCounts{0, 1, 0}));
    EXPECT_EQ(c[index_of(PhiCategory::Institution)], (MatchCounts{0, 0, 1}));
}

TEST(MatchSpans, GreedyTakesLargestOverlapFirst) {
    // pred [4,10) overlaps gold [0,6) by 2 and gold [6,12) by 4.
    const std::vector<PhiSpan> gold{sp(0, 6), sp(6, 12)};
    const std::vector<PhiSpan> pred{sp(4, 10)};
    const auto c = match_spans(pred, gold, MatchPolicy::Overlap)[index_of(PhiCategory::Date)];
    EXPECT_EQ(c, (MatchCounts{1, 0, 1}));
}

TEST(Evaluate, EmptyCorpusIsVacuouslyPerfect) {
    const std::vector<SpanDocument> none{{"a", {}}};
    const EvalReport r = evaluate(none, none, MatchPolicy::Exact);
    for (const PhiCategory c : kAllPhiCategories) {
        EXPECT_EQ(r[c].count, 0u);
        EXPECT_TRUE(r[c].zero_support);
        EXPECT_DOUBLE_EQ(r[c].precision, 1.0);
        EXPECT_DOUBLE_EQ(r[c].recall, 1.0);
        EXPECT_DOUBLE_EQ(r[c].f1, 1.0);
    }
    EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
}

TEST(Evaluate, SingleDocumentReducesToMatchSpans) {
    std::mt19937 rng(1);
    for (int t = 0; t < 50; ++t) {
        const std::vector<SpanDocument> g{{"x", random_spans(rng, 8)}}, p{{"x", random_spans(rng, 8)}};
        const auto direct = match_spans(p[0].spans, g[0].spans, MatchPolicy::Overlap);
        const EvalReport r = evaluate(p, g, MatchPolicy::Overlap);
        for (std::size_t c = 0; c < kPhiCategoryCount; ++c) EXPECT_EQ(r.per_category[c].counts, direct[c]);
    }
}

TEST(Evaluate, MicroEqualsPooledCounts) {
    std::mt19937 rng(2);
    const auto gold = random_corpus(rng, 25), pred = random_corpus(rng, 25);
    const EvalReport r = evaluate(pred, gold, MatchPolicy::Exact, 4);
    // Brute force: a prediction is a hit iff the identical triple is in gold of the same document.
    std::size_t tp = 0, np = 0, ng = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        np += pred[i].spans.size();
        ng += gold[i].spans.size();
        for (const auto& p : pred[i].spans) {
            tp += static_cast<std::size_t>(std::count(gold[i].spans.begin(), gold[i].spans.end(), p));
        }
    }
    EXPECT_EQ(r.micro.counts.tp, tp);
    EXPECT_NEAR(r.micro.precision, np ? double(tp) / double(np) : 1.0, 1e-15);
    EXPECT_NEAR(r.micro.recall, ng ? double(tp) / double(ng) : 1.0, 1e-15);
}

TEST(Evaluate, MacroAveragesSupportedCategoriesOnly) {
    const std::vector<SpanDocument> gold{{"a", {sp(0, 2, PhiCategory::Date), sp(5, 7, PhiCategory::Age)}}};
    const std::vector<SpanDocument> pred{{"a", {sp(0, 2, PhiCategory::Date)}}};
    const EvalReport r = evaluate(pred, gold, MatchPolicy::Exact);
    EXPECT_DOUBLE_EQ(r.macro_recall, 0.5);
    EXPECT_DOUBLE_EQ(r.macro_f1, 0.5);
}

TEST(EvaluateProperties, SwappingSidesSwapsPrecisionAndRecall) {
    std::mt19937 rng(3);
    for (const MatchPolicy pol : {MatchPolicy::Exact, MatchPolicy::Overlap}) {
        for (int t = 0; t < 40; ++t) {
            const auto a = random_corpus(rng, 6), b = random_corpus(rng, 6);
            const EvalReport ab = evaluate(a, b, pol), ba = evaluate(b, a, pol);
            for (std::size_t c = 0; c < kPhiCategoryCount; ++c) {
                EXPECT_DOUBLE_EQ(ab.per_category[c].precision, ba.per_category[c].recall);
                EXPECT_DOUBLE_EQ(ab.per_category[c].recall, ba.per_category[c].precision);
            }
        }
    }
}

TEST(EvaluateProperties, OverlapDominatesExact) {
    std::mt19937 rng(4);
    for (int t = 0; t < 100; ++t) {
        const auto g = random_corpus(rng, 5), p = random_corpus(rng, 5);
        const EvalReport ex = evaluate(p, g, MatchPolicy::Exact), ov = evaluate(p, g, MatchPolicy::Overlap);
        for (std::size_t c = 0; c < kPhiCategoryCount; ++c) {
            EXPECT_GE(ov.per_category[c].recall, ex.per_category[c].recall);
            EXPECT_GE(ov.per_category[c].precision, ex.per_category[c].precision);
        }
    }
}

TEST(EvaluateProperties, DocumentOrderDoesNotMatter) {
    std::mt19937 rng(5);
    auto g = random_corpus(rng, 20), p = random_corpus(rng, 20);
    const EvalReport before = evaluate(p, g, MatchPolicy::Overlap);
    std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(p.begin(), p.end(), rng);
    const EvalReport after = evaluate(p, g, MatchPolicy::Overlap);
    EXPECT_EQ(before.micro.f1, after.micro.f1);
    EXPECT_EQ(render_csv(before), render_csv(after));
}

TEST(EvaluateProperties, MetricsStayInUnitInterval) {
    std::mt19937 rng(6);
    for (int t = 0; t < 50; ++t) {
        const auto g = random_corpus(rng, 3), p = random_corpus(rng, 3);
        const EvalReport r = evaluate(p, g, MatchPolicy::Overlap);
        for (const auto& m : r.per_category) {
            for (const double x : {m.precision, m.recall, m.f1}) {
                EXPECT_GE(x, 0.0);
                EXPECT_LE(x, 1.0);
            }
            const double s = m.precision + m.recall;
            EXPECT_NEAR(m.f1, s == 0 ? 0.0 : 2 * m.precision * m.recall / s, 1e-15);
        }
    }
}

TEST(EvaluateErrors, MissingAndDuplicateDocuments) {
    const std::vector<SpanDocument> a{{"a", {}}}, b{{"b", {}}}, dup{{"a", {}}, {"a", {}}};
    EXPECT_THROW(evaluate(a, b, MatchPolicy::Exact), InputError);
    EXPECT_THROW(evaluate(dup, a, MatchPolicy::Exact), InputError);
    const std::vector<SpanDocument> overlapping{{"a", {sp(0, 5), sp(3, 8)}}};
    EXPECT_THROW(evaluate(a, overlapping, MatchPolicy::Exact), InputError);
}

TEST(Render, TableRowOrderAndCsvSchema) {
    const std::vector<SpanDocument> g{{"a", {sp(0, 2, PhiCategory::Date)}}};
    const EvalReport r = evaluate(g, g, MatchPolicy::Exact);
    const std::string table = render_table(r);
    std::size_t last = 0;
    for (const PhiCategory c : kAllPhiCategories) {
        const std::size_t at = table.find(std::string(category_label(c)));
        ASSERT_NE(at, std::string::npos);
        EXPECT_GT(at, last);
        last = at;
    }
    const std::string csv = render_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "category,count,tp,fp,fn,precision,recall,f1,support");
    EXPECT_NE(csv.find("Date,1,1,0,0,1.000000,1.000000,1.000000,1"), std::string::npos);
    EXPECT_NE(csv.find("Age,0,0,0,0,1.000000,1.000000,1.000000,0"), std::string::npos);
    EXPECT_EQ(parse_match_policy("overlap"), MatchPolicy::Overlap);
    EXPECT_THROW(parse_match_policy("fuzzy"), InputError);
}

TEST(GoldIo, ParsesStandoffLine) {
    const auto d = span_document_from_json(io::json::parse(R"({"doc_id":"r1","spans":[{"start":3,"end":9,"category":"Date"}]})"));
    EXPECT_EQ(d.doc_id, "r1");
    ASSERT_EQ(d.spans.size(), 1u);
    EXPECT_EQ(d.spans[0].category, PhiCategory::Date);
    EXPECT_THROW(span_document_from_json(io::json::parse(R"({"doc_id":"r1","spans":[{"start":3,"end":2,"category":"Date"}]})")),
                 InputError);
}
