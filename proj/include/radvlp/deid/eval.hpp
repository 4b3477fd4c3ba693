/**
 * @file eval.hpp
 * @brief Precision / recall / F1 of detected spans against gold annotations.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/parallel.hpp"
#include "radvlp/core/types.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace radvlp::deid {

enum class MatchPolicy { Exact, Overlap };

inline MatchPolicy parse_match_policy(std::string_view s) {
    if (s == "exact") return MatchPolicy::Exact;
    if (s == "overlap") return MatchPolicy::Overlap;
    throw InputError("unknown matching policy '" + std::string(s) + "' (expected exact|overlap)");
}

inline const char* policy_name(MatchPolicy p) { return p == MatchPolicy::Exact ? "exact" : "overlap"; }

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

using CategoryCounts = std::array<MatchCounts, kPhiCategoryCount>;

/// Spans of one document, predicted or gold.
struct SpanDocument {
    std::string doc_id;
    std::vector<PhiSpan> spans;
};

namespace eval_detail {

inline MatchCounts match_category(const std::vector<const PhiSpan*>& pred, const std::vector<const PhiSpan*>& gold,
                                  MatchPolicy policy) {
    MatchCounts c;
    std::vector<bool> pred_used(pred.size(), false), gold_used(gold.size(), false);
    if (policy == MatchPolicy::Exact) {
        for (std::size_t g = 0; g < gold.size(); ++g) {
            for (std::size_t p = 0; p < pred.size(); ++p) {
                if (!pred_used[p] && pred[p]->start == gold[g]->start && pred[p]->end == gold[g]->end) {
                    pred_used[p] = gold_used[g] = true;
                    ++c.tp;
                    break;
                }
            }
        }
    } else {
        struct Pair {
            std::size_t overlap, region_start, union_start, union_end, p, g;
        };
        std::vector<Pair> pairs;
        for (std::size_t p = 0; p < pred.size(); ++p) {
            for (std::size_t g = 0; g < gold.size(); ++g) {
                const std::size_t lo = std::max(pred[p]->start, gold[g]->start);
                const std::size_t hi = std::min(pred[p]->end, gold[g]->end);
                if (lo < hi) {
                    pairs.push_back({hi - lo, lo, std::min(pred[p]->start, gold[g]->start),
                                     std::max(pred[p]->end, gold[g]->end), p, g});
                }
            }
        }
        // Largest overlap first, then document order. Every key is symmetric in (pred, gold).
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.overlap != b.overlap) return a.overlap > b.overlap;
            if (a.region_start != b.region_start) return a.region_start < b.region_start;
            if (a.union_start != b.union_start) return a.union_start < b.union_start;
            return a.union_end < b.union_end;
        });
        for (const Pair& x : pairs) {
            if (pred_used[x.p] || gold_used[x.g]) continue;
            pred_used[x.p] = gold_used[x.g] = true;
            ++c.tp;
        }
    }
    c.fp = pred.size() - c.tp;
    c.fn = gold.size() - c.tp;
    return c;
}

}  // namespace eval_detail

/// Per-category tp / fp / fn for one document.
inline CategoryCounts match_spans(std::span<const PhiSpan> pred, std::span<const PhiSpan> gold, MatchPolicy policy) {
    std::array<std::vector<const PhiSpan*>, kPhiCategoryCount> p, g;
    for (const PhiSpan& s : pred) p[index_of(s.category)].push_back(&s);
    for (const PhiSpan& s : gold) g[index_of(s.category)].push_back(&s);
    CategoryCounts out;
    for (std::size_t c = 0; c < kPhiCategoryCount; ++c) out[c] = eval_detail::match_category(p[c], g[c], policy);
    return out;
}

struct Metrics {
    std::size_t count = 0;  // gold spans
    MatchCounts counts;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    bool zero_support = false;
};

/// Empty denominators give 1.0; f1 is 0 when precision + recall is 0.
inline Metrics metrics_from_counts(const MatchCounts& c) {
    Metrics m;
    m.counts = c;
    m.count = c.tp + c.fn;
    m.zero_support = m.count == 0;
    m.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double s = m.precision + m.recall;
    m.f1 = s == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / s;
    return m;
}

struct EvalReport {
    MatchPolicy policy = MatchPolicy::Exact;
    std::array<Metrics, kPhiCategoryCount> per_category;
    Metrics micro;
    /// Unweighted mean over categories with gold support; 1.0 when none has support.
    double macro_precision = 1.0;
    double macro_recall = 1.0;
    double macro_f1 = 1.0;

    const Metrics& operator[](PhiCategory c) const { return per_category[index_of(c)]; }
};

inline EvalReport report_from_counts(const CategoryCounts& counts, MatchPolicy policy) {
    EvalReport r;
    r.policy = policy;
    MatchCounts total;
    double sp = 0, sr = 0, sf = 0;
    std::size_t supported = 0;
    for (std::size_t c = 0; c < kPhiCategoryCount; ++c) {
        r.per_category[c] = metrics_from_counts(counts[c]);
        total += counts[c];
        if (!r.per_category[c].zero_support) {
            sp += r.per_category[c].precision;
            sr += r.per_category[c].recall;
            sf += r.per_category[c].f1;
            ++supported;
        }
    }
    r.micro = metrics_from_counts(total);
    if (supported > 0) {
        r.macro_precision = sp / static_cast<double>(supported);
        r.macro_recall = sr / static_cast<double>(supported);
        r.macro_f1 = sf / static_cast<double>(supported);
    }
    return r;
}

inline void validate_spans(const SpanDocument& d, const char* what) {
    std::vector<PhiSpan> sorted(d.spans);
    std::sort(sorted.begin(), sorted.end(), [](const PhiSpan& a, const PhiSpan& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].start >= sorted[i].end) throw InputError(std::string(what) + " " + d.doc_id + ": empty span");
        if (i > 0 && sorted[i - 1].end > sorted[i].start) {
            throw InputError(std::string(what) + " " + d.doc_id + ": overlapping spans");
        }
    }
}

/**
 * @brief Scores predictions against gold over a corpus.
 *
 * Both sides must contain exactly the same doc_id set.
 */
inline EvalReport evaluate(std::span<const SpanDocument> predicted, std::span<const SpanDocument> gold,
                           MatchPolicy policy, unsigned threads = 1) {
    std::map<std::string, const SpanDocument*> pred_by_id;
    for (const SpanDocument& d : predicted) {
        if (!pred_by_id.emplace(d.doc_id, &d).second) throw InputError("duplicate predicted doc_id '" + d.doc_id + "'");
        validate_spans(d, "prediction");
    }
    std::map<std::string, bool> seen;
    for (const SpanDocument& d : gold) {
        if (!seen.emplace(d.doc_id, true).second) throw InputError("duplicate gold doc_id '" + d.doc_id + "'");
        if (!pred_by_id.count(d.doc_id)) throw InputError("doc_id '" + d.doc_id + "' has gold but no prediction");
        validate_spans(d, "gold");
    }
    for (const auto& [id, _] : pred_by_id) {
        if (!seen.count(id)) throw InputError("doc_id '" + id + "' has a prediction but no gold");
    }

    std::vector<CategoryCounts> per_doc(gold.size());
    parallel_for(gold.size(), threads, [&](std::size_t i) {
        per_doc[i] = match_spans(pred_by_id.at(gold[i].doc_id)->spans, gold[i].spans, policy);
    });
    CategoryCounts total{};
    for (const CategoryCounts& c : per_doc) {
        for (std::size_t k = 0; k < kPhiCategoryCount; ++k) total[k] += c[k];
    }
    return report_from_counts(total, policy);
}

// ---------------------------------------------------------------------------
// IO and rendering
// ---------------------------------------------------------------------------

/// Gold line format: {"doc_id": ..., "spans": [{"start", "end", "category"}]}.
inline SpanDocument span_document_from_json(const io::json& j) {
    SpanDocument d;
    d.doc_id = io::detail::require_string(j, "doc_id");
    const auto& spans = io::detail::require(j, "spans");
    if (!spans.is_array()) throw InputError("'spans' must be an array");
    for (const auto& s : spans) d.spans.push_back(io::span_from_json(s));
    return d;
}

inline io::ordered_json to_json(const SpanDocument& d) {
    io::ordered_json j;
    j["doc_id"] = d.doc_id;
    j["spans"] = io::ordered_json::array();
    for (const PhiSpan& s : d.spans) j["spans"].push_back(io::to_json(s));
    return j;
}

inline std::vector<SpanDocument> read_span_documents(const std::string& path) {
    std::vector<SpanDocument> out;
    auto in = io::open_input(path);
    io::for_each_json_line(in, path, [&](const io::json& j, std::size_t) { out.push_back(span_document_from_json(j)); });
    return out;
}

inline std::string format_fixed(double x, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

/// Aligned text table in the fixed category order, then micro and macro rows.
inline std::string render_table(const EvalReport& r) {
    auto row = [](const std::string& label, const std::string& count, double p, double rc, double f, bool flag) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-16s %7s %10.3f %10.3f %10.3f%s\n", label.c_str(), count.c_str(), p, rc, f,
                      flag ? "  (support=0)" : "");
        return std::string(buf);
    };
    std::string out;
    char head[160];
    std::snprintf(head, sizeof head, "%-16s %7s %10s %10s %10s\n", "Category", "Count", "Precision", "Recall", "F1");
    out += head;
    out += std::string(57, '-') + "\n";
    for (const PhiCategory c : kAllPhiCategories) {
        const Metrics& m = r[c];
        out += row(std::string(category_label(c)), std::to_string(m.count), m.precision, m.recall, m.f1, m.zero_support);
    }
    out += std::string(57, '-') + "\n";
    out += row("Micro", std::to_string(r.micro.count), r.micro.precision, r.micro.recall, r.micro.f1, false);
    out += row("Macro", "", r.macro_precision, r.macro_recall, r.macro_f1, false);
    out += std::string("matching: ") + policy_name(r.policy) + "\n";
    return out;
}

inline std::string render_csv(const EvalReport& r) {
    std::string out = "category,count,tp,fp,fn,precision,recall,f1,support\n";
    auto line = [&](const std::string& name, const Metrics& m, bool has_counts) {
        out += name + "," + (has_counts ? std::to_string(m.count) : "") + "," +
               (has_counts ? std::to_string(m.counts.tp) + "," + std::to_string(m.counts.fp) + "," +
                                 std::to_string(m.counts.fn)
                           : ",,") +
               "," + format_fixed(m.precision, 6) + "," + format_fixed(m.recall, 6) + "," + format_fixed(m.f1, 6) +
               "," + (m.zero_support ? "0" : "1") + "\n";
    };
    for (const PhiCategory c : kAllPhiCategories) line(std::string(category_name(c)), r[c], true);
    line("micro", r.micro, true);
    Metrics macro;
    macro.precision = r.macro_precision;
    macro.recall = r.macro_recall;
    macro.f1 = r.macro_f1;
    line("macro", macro, false);
    return out;
}

inline io::ordered_json to_json(const Metrics& m) {
    io::ordered_json j;
    j["count"] = m.count;
    j["tp"] = m.counts.tp;
    j["fp"] = m.counts.fp;
    j["fn"] = m.counts.fn;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["zero_support"] = m.zero_support;
    return j;
}

inline io::ordered_json to_json(const EvalReport& r) {
    io::ordered_json j;
    j["policy"] = policy_name(r.policy);
    j["categories"] = io::ordered_json::object();
    for (const PhiCategory c : kAllPhiCategories) j["categories"][std::string(category_name(c))] = to_json(r[c]);
    j["micro"] = to_json(r.micro);
    j["macro"] = {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}};
    return j;
}

}  // namespace radvlp::deid
