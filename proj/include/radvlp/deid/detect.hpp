/**
 * @file detect.hpp
 * @brief Rule-based PHI detection over a single document or a corpus.
 */

#pragma once

#include "radvlp/core/parallel.hpp"
#include "radvlp/core/types.hpp"
#include "radvlp/deid/detector_config.hpp"
#include "radvlp/deid/rules.hpp"
#include "radvlp/deid/tokens.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <vector>

namespace radvlp::deid {

struct AnnotatedDocument {
    RawDocument doc;
    std::vector<PhiSpan> spans;  // non-overlapping, ascending start
};

/**
 * @brief Settles overlapping candidates.
 *
 * Longest span first; equal lengths are decided by @p precedence (earlier
 * entry wins), then by start offset. The result is non-overlapping and
 * sorted by start.
 */
inline std::vector<PhiSpan> resolve_overlaps(std::vector<PhiSpan> spans,
                                             const std::array<PhiCategory, kPhiCategoryCount>& precedence =
                                                 default_category_precedence()) {
    std::array<std::size_t, kPhiCategoryCount> rank{};
    for (std::size_t i = 0; i < precedence.size(); ++i) rank[index_of(precedence[i])] = i;

    std::sort(spans.begin(), spans.end(), [&](const PhiSpan& a, const PhiSpan& b) {
        if (a.length() != b.length()) return a.length() > b.length();
        if (rank[index_of(a.category)] != rank[index_of(b.category)]) {
            return rank[index_of(a.category)] < rank[index_of(b.category)];
        }
        return a.start < b.start;
    });
    std::vector<PhiSpan> kept;
    for (PhiSpan& s : spans) {
        if (s.start >= s.end) continue;
        const bool clashes = std::any_of(kept.begin(), kept.end(), [&](const PhiSpan& k) { return k.overlaps(s); });
        if (!clashes) kept.push_back(std::move(s));
    }
    std::sort(kept.begin(), kept.end(), [](const PhiSpan& a, const PhiSpan& b) { return a.start < b.start; });
    return kept;
}

/// Runs rules R1-R9 on one document. Pure: same inputs, same spans.
inline AnnotatedDocument detect(const RawDocument& doc, const DetectorConfig& cfg) {
    const DocumentView view = make_view(text::decode_utf8(doc.text));

    rules::Candidates candidates;
    rules::patient_names(view, doc.known_patient_names, candidates);
    rules::person_names(view, cfg, candidates);
    rules::locations(view, cfg, candidates);
    rules::institutions(view, cfg, candidates);
    rules::dates(view, cfg, candidates);
    rules::ages(view, candidates);
    rules::id_numbers(view, cfg, candidates);
    rules::phone_numbers(view, candidates);
    rules::urls_emails(view, candidates);

    AnnotatedDocument out{doc, resolve_overlaps(std::move(candidates), cfg.category_precedence)};
    for (PhiSpan& s : out.spans) s.surface = text::encode_utf8(view.slice(s.start, s.end));
    return out;
}

/// Detects every document; results keep corpus order whatever the thread count.
inline std::vector<AnnotatedDocument> detect_corpus(std::span<const RawDocument> docs, const DetectorConfig& cfg,
                                                    unsigned threads = 1) {
    std::vector<AnnotatedDocument> out(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) { out[i] = detect(docs[i], cfg); });
    return out;
}

}  // namespace radvlp::deid
