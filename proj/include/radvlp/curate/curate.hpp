/**
 * @file curate.hpp
 * @brief Image-level curation: OCR text filter, metadata scrubbing and
 * study/report pairing by date.
 */

#pragma once

#include "radvlp/core/date.hpp"
#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/rng.hpp"
#include "radvlp/core/text.hpp"
#include "radvlp/core/types.hpp"
#include "radvlp/deid/surrogate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace radvlp::curate {

inline constexpr std::size_t kDefaultOcrThreshold = 35;

struct OcrRecord {
    std::string image_id;
    std::string extracted_text;
};

struct OcrFilterResult {
    std::vector<std::string> kept;
    std::vector<std::string> dropped;
};

inline std::size_t non_whitespace_count(std::string_view utf8) {
    std::size_t n = 0;
    for (const char32_t c : text::decode_utf8(utf8)) n += text::is_space(c) ? 0 : 1;
    return n;
}

/// Keeps an image iff its OCR text has fewer than @p threshold non-whitespace code points.
inline OcrFilterResult filter_by_ocr(std::span<const OcrRecord> records, std::size_t threshold = kDefaultOcrThreshold) {
    OcrFilterResult r;
    for (const OcrRecord& rec : records) {
        if (rec.image_id.empty()) throw InputError("OCR record with empty image_id");
        (non_whitespace_count(rec.extracted_text) < threshold ? r.kept : r.dropped).push_back(rec.image_id);
    }
    return r;
}

inline OcrRecord ocr_record_from_json(const io::json& j) {
    OcrRecord r{io::detail::require_string(j, "image_id"), io::detail::require_string(j, "extracted_text")};
    if (r.image_id.empty()) throw InputError("image_id must be non-empty");
    return r;
}

inline std::vector<OcrRecord> read_ocr_records(const std::string& path) {
    return io::read_json_lines<OcrRecord>(path, ocr_record_from_json);
}

/**
 * Removes images whose OCR text is too long. Images without an OCR record
 * are treated as dropped. Studies left without images are discarded.
 */
struct ImageFilterResult {
    std::vector<StudyRecord> studies;
    std::vector<std::string> dropped_images;
    std::vector<std::string> discarded_studies;
};

inline ImageFilterResult drop_text_images(std::span<const StudyRecord> studies, const OcrFilterResult& ocr) {
    const std::unordered_set<std::string> kept(ocr.kept.begin(), ocr.kept.end());
    ImageFilterResult r;
    for (const StudyRecord& s : studies) {
        StudyRecord copy = s;
        copy.image_ids.clear();
        for (const std::string& id : s.image_ids) {
            if (kept.count(id)) {
                copy.image_ids.push_back(id);
            } else {
                r.dropped_images.push_back(id);
            }
        }
        if (copy.image_ids.empty()) {
            r.discarded_studies.push_back(s.study_id);
        } else {
            r.studies.push_back(std::move(copy));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Metadata scrubbing
// ---------------------------------------------------------------------------

/// Newline-delimited keys; blank lines and '#' comments ignored.
inline std::set<std::string> parse_allowlist(std::string_view content) {
    std::set<std::string> keys;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        keys.emplace(line);
    }
    return keys;
}

inline std::set<std::string> load_allowlist(const std::string& path) { return parse_allowlist(io::read_file(path)); }

namespace detail {

inline std::string map_id(const std::map<std::string, std::string>& m, const std::string& id, const char* what) {
    if (const auto it = m.find(id); it != m.end()) return it->second;
    // Already pseudonymized ids pass through, which makes scrubbing idempotent.
    for (const auto& [k, v] : m) {
        if (v == id) return id;
    }
    throw InputError(std::string(what) + " id '" + id + "' missing from id mapping");
}

}  // namespace detail

/// Keeps allowlisted metadata keys (in their original order) and swaps ids for pseudo ids.
inline StudyRecord scrub_metadata(const StudyRecord& study, const std::set<std::string>& allowlist,
                                  const deid::PseudoIdMapping& ids) {
    StudyRecord out = study;
    out.patient_id = detail::map_id(ids.patients, study.patient_id, "patient");
    out.study_id = detail::map_id(ids.studies, study.study_id, "study");
    out.metadata.clear();
    for (const auto& kv : study.metadata) {
        if (allowlist.count(kv.first)) out.metadata.push_back(kv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

struct ReportRef {
    std::string doc_id;
    std::string patient_id;
    CalendarDate date;
    std::optional<std::int32_t> timestamp;
};

inline ReportRef report_ref(const RawDocument& d) { return {d.doc_id, d.patient_id, d.date, d.timestamp}; }

struct PairedStudy {
    StudyRecord study;
    std::string report_doc_id;
};

enum class ItemKind { Study, Report };

struct DiscardedItem {
    ItemKind kind;
    std::string id;
    std::string patient_id;
    CalendarDate date;
};

struct PairingResult {
    std::vector<PairedStudy> pairs;
    std::vector<DiscardedItem> discarded;
};

namespace detail {

/// Ascending timestamp when every item has one, otherwise input order.
template <typename T>
void chronological(std::vector<const T*>& items) {
    const bool all = std::all_of(items.begin(), items.end(), [](const T* x) { return x->timestamp.has_value(); });
    if (all) {
        std::stable_sort(items.begin(), items.end(), [](const T* a, const T* b) { return *a->timestamp < *b->timestamp; });
    }
}

}  // namespace detail

/**
 * @brief Pairs studies with reports of the same patient and date.
 *
 * A (patient, date) group with as many studies as reports is paired in
 * chronological order; any other group is discarded entirely. Output is
 * ordered by (patient_id, date).
 */
inline PairingResult pair_by_date(std::span<const StudyRecord> studies, std::span<const ReportRef> reports) {
    using Key = std::pair<std::string, CalendarDate>;
    std::map<Key, std::pair<std::vector<const StudyRecord*>, std::vector<const ReportRef*>>> groups;
    for (const StudyRecord& s : studies) groups[{s.patient_id, s.date}].first.push_back(&s);
    for (const ReportRef& r : reports) groups[{r.patient_id, r.date}].second.push_back(&r);

    PairingResult out;
    for (auto& [key, g] : groups) {
        auto& [ss, rs] = g;
        if (ss.size() == rs.size()) {
            detail::chronological(ss);
            detail::chronological(rs);
            for (std::size_t i = 0; i < ss.size(); ++i) out.pairs.push_back({*ss[i], rs[i]->doc_id});
        } else {
            for (const StudyRecord* s : ss) out.discarded.push_back({ItemKind::Study, s->study_id, key.first, key.second});
            for (const ReportRef* r : rs) out.discarded.push_back({ItemKind::Report, r->doc_id, key.first, key.second});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole step
// ---------------------------------------------------------------------------

struct CurateConfig {
    std::size_t ocr_threshold = kDefaultOcrThreshold;
    std::set<std::string> allowlist;
    std::uint64_t seed = 0;
};

struct CurateResult {
    std::vector<StudyRecord> studies;  // scrubbed, paired studies only
    /// (pseudo study id, report doc id)
    std::vector<std::pair<std::string, std::string>> pairs;
    deid::PseudoIdMapping mapping;
    std::vector<std::string> kept_images;
    std::vector<std::string> dropped_images;
    std::vector<std::string> studies_without_images;
    std::vector<DiscardedItem> discarded;
};

/**
 * OCR filter, then pairing on the original ids and dates, then pseudo ids
 * for the paired studies' patients and studies, then metadata scrubbing.
 */
inline CurateResult curate_studies(std::span<const StudyRecord> studies, std::span<const OcrRecord> ocr,
                                   std::span<const ReportRef> reports, const CurateConfig& cfg) {
    std::set<std::string> study_ids;
    for (const StudyRecord& s : studies) {
        if (!study_ids.insert(s.study_id).second) throw InputError("duplicate study_id '" + s.study_id + "'");
    }
    const OcrFilterResult filtered = filter_by_ocr(ocr, cfg.ocr_threshold);
    const ImageFilterResult images = drop_text_images(studies, filtered);
    const PairingResult paired = pair_by_date(images.studies, reports);

    std::set<std::string> patients;
    std::vector<std::string> paired_studies;
    for (const PairedStudy& p : paired.pairs) {
        patients.insert(p.study.patient_id);
        paired_studies.push_back(p.study.study_id);
    }
    RandomStream stream(splitmix64(cfg.seed));
    CurateResult r;
    r.mapping = deid::assign_pseudo_ids({patients.begin(), patients.end()}, paired_studies, stream);
    for (const PairedStudy& p : paired.pairs) {
        StudyRecord s = scrub_metadata(p.study, cfg.allowlist, r.mapping);
        r.pairs.emplace_back(s.study_id, p.report_doc_id);
        r.studies.push_back(std::move(s));
    }
    for (const StudyRecord& s : images.studies) r.kept_images.insert(r.kept_images.end(), s.image_ids.begin(), s.image_ids.end());
    r.dropped_images = images.dropped_images;
    r.studies_without_images = images.discarded_studies;
    r.discarded = paired.discarded;
    return r;
}

inline io::ordered_json to_json(const DiscardedItem& d) {
    io::ordered_json j;
    j["kind"] = d.kind == ItemKind::Study ? "study" : "report";
    j["id"] = d.id;
    j["patient_id"] = d.patient_id;
    j["date"] = to_iso(d.date);
    j["reason"] = "unequal study/report count for patient and date";
    return j;
}

inline io::ordered_json pair_to_json(const std::pair<std::string, std::string>& p) {
    io::ordered_json j;
    j["study_id"] = p.first;
    j["report_doc_id"] = p.second;
    return j;
}

}  // namespace radvlp::curate
