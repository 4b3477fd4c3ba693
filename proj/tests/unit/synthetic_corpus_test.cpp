#include "support/fixtures.hpp"
#include "support/synthetic_corpus.hpp"

#include "radvlp/core/json_io.hpp"
#include "radvlp/deid/detect.hpp"

#include <gtest/gtest.h>

using namespace radvlp;

TEST(SyntheticCorpus, BundledFixtureMatchesGenerator) {
    const auto c = fixtures::make_synthetic_corpus();
    EXPECT_EQ(io::to_json_lines(c.docs), io::read_file(fixtures::test_data_path("deid/corpus.jsonl")));
    EXPECT_EQ(io::to_json_lines(c.gold), io::read_file(fixtures::test_data_path("deid/gold.jsonl")));
}

TEST(SyntheticCorpus, EveryCategoryPlantedAtLeastTwentyTimes) {
    const auto c = fixtures::make_synthetic_corpus();
    EXPECT_GE(c.docs.size(), 200u);
    for (const auto cat : kAllPhiCategories) EXPECT_GE(c.planted[index_of(cat)], 20u) << category_name(cat);
    EXPECT_GE(c.decoys, 200u);
}

TEST(SyntheticCorpus, GoldSpansAreConsistentAndDisjoint) {
    const auto c = fixtures::make_synthetic_corpus(99, 50, 10);
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        const auto cp = text::decode_utf8(c.docs[i].text);
        const auto& spans = c.gold[i].spans;
        for (std::size_t k = 0; k < spans.size(); ++k) {
            EXPECT_TRUE(span_is_consistent(spans[k], cp));
            if (k > 0) EXPECT_LE(spans[k - 1].end, spans[k].start);
        }
    }
}

TEST(SyntheticCorpus, DetectorFindsExactlyThePlants) {
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        const auto c = fixtures::make_synthetic_corpus(seed, 120, 30);
        std::vector<deid::SpanDocument> pred;
        for (const auto& a : deid::detect_corpus(c.docs, fixtures::default_detector_config(), 2)) {
            pred.push_back({a.doc.doc_id, a.spans});
        }
        const auto r = deid::evaluate(pred, c.gold, deid::MatchPolicy::Exact);
        for (const auto cat : kAllPhiCategories) {
            EXPECT_EQ(r[cat].recall, 1.0) << seed << " " << category_name(cat);
            EXPECT_GE(r[cat].precision, 0.95) << seed << " " << category_name(cat);
        }
    }
}
