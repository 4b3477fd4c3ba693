/**
 * @file json_io.hpp
 * @brief Line-delimited JSON reading/writing for the domain types.
 *
 * Every line-JSON reader reports the 1-based line number of the first
 * malformed record through LineError.
 */

#pragma once

#include "radvlp/core/date.hpp"
#include "radvlp/core/error.hpp"
#include "radvlp/core/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <unordered_set>
#include <string>
#include <vector>

namespace radvlp::io {

// Insertion-ordered everywhere: study metadata must keep its key order.
using json = nlohmann::ordered_json;
using ordered_json = nlohmann::ordered_json;

inline std::string format_time_of_day(std::int32_t seconds) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds / 3600, (seconds / 60) % 60, seconds % 60);
    return buf;
}

/// Accepts integer seconds-of-day or "HH:MM[:SS]".
inline std::int32_t parse_time_of_day(const json& j) {
    if (j.is_number_integer()) {
        const auto v = j.get<std::int64_t>();
        if (v < 0 || v >= 86400) throw InputError("timestamp out of range");
        return static_cast<std::int32_t>(v);
    }
    if (!j.is_string()) throw InputError("timestamp must be an integer or HH:MM[:SS] string");
    const std::string s = j.get<std::string>();
    int h = 0, m = 0, sec = 0;
    char tail = 0;
    const int n = std::sscanf(s.c_str(), "%2d:%2d:%2d%c", &h, &m, &sec, &tail);
    if ((n != 2 && n != 3) || h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 59) {
        throw InputError("invalid timestamp '" + s + "'");
    }
    return h * 3600 + m * 60 + sec;
}

namespace detail {

inline const json& require(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
    return *it;
}

inline std::string require_string(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RawDocument
// ---------------------------------------------------------------------------

inline RawDocument raw_document_from_json(const json& j) {
    if (!j.is_object()) throw InputError("record must be a JSON object");
    RawDocument d;
    d.doc_id = detail::require_string(j, "doc_id");
    d.patient_id = detail::require_string(j, "patient_id");
    if (d.doc_id.empty()) throw InputError("doc_id must be non-empty");
    if (d.patient_id.empty()) throw InputError("patient_id must be non-empty");
    d.date = parse_iso_date(detail::require_string(j, "date"));
    d.text = detail::require_string(j, "text");
    (void)text::decode_utf8(d.text);  // validates encoding
    if (const auto it = j.find("known_patient_names"); it != j.end()) {
        if (!it->is_array()) throw InputError("known_patient_names must be an array");
        for (const json& n : *it) {
            if (n.is_array() && n.size() == 2 && n[0].is_string() && n[1].is_string()) {
                d.known_patient_names.push_back({n[0].get<std::string>(), n[1].get<std::string>()});
            } else if (n.is_object()) {
                d.known_patient_names.push_back({n.value("first", std::string()), n.value("last", std::string())});
            } else {
                throw InputError("known_patient_names entries must be [first, last] or {first, last}");
            }
        }
    }
    if (const auto it = j.find("timestamp"); it != j.end() && !it->is_null()) d.timestamp = parse_time_of_day(*it);
    return d;
}

inline ordered_json to_json(const RawDocument& d) {
    ordered_json j;
    j["doc_id"] = d.doc_id;
    j["patient_id"] = d.patient_id;
    j["date"] = to_iso(d.date);
    if (d.timestamp) j["timestamp"] = format_time_of_day(*d.timestamp);
    j["text"] = d.text;
    ordered_json names = ordered_json::array();
    for (const auto& n : d.known_patient_names) names.push_back({{"first", n.first}, {"last", n.last}});
    j["known_patient_names"] = std::move(names);
    return j;
}

// ---------------------------------------------------------------------------
// Spans and de-identified documents
// ---------------------------------------------------------------------------

inline ordered_json to_json(const PhiSpan& s) {
    ordered_json j;
    j["start"] = s.start;
    j["end"] = s.end;
    j["category"] = std::string(category_name(s.category));
    j["surface"] = s.surface;
    return j;
}

/// Standoff span; `surface` optional (filled in by the caller from the text).
inline PhiSpan span_from_json(const json& j) {
    if (!j.is_object()) throw InputError("span must be a JSON object");
    const json& start = detail::require(j, "start");
    const json& end = detail::require(j, "end");
    if (!start.is_number_unsigned() || !end.is_number_unsigned()) {
        throw InputError("span offsets must be non-negative integers");
    }
    PhiSpan s;
    s.start = start.get<std::size_t>();
    s.end = end.get<std::size_t>();
    s.category = parse_category(detail::require_string(j, "category"));
    if (const auto it = j.find("surface"); it != j.end() && it->is_string()) s.surface = it->get<std::string>();
    if (s.start >= s.end) throw InputError("span must satisfy start < end");
    return s;
}

inline ordered_json to_json(const DeidDocument& d) {
    ordered_json j;
    j["doc_id"] = d.doc_id;
    j["patient_id"] = d.pseudo_patient_id;
    j["date"] = to_iso(d.date);
    j["text"] = d.text;
    j["known_patient_names"] = ordered_json::array();
    ordered_json applied = ordered_json::array();
    for (const auto& a : d.applied) {
        // The original surface is deliberately not written: it is PHI.
        ordered_json e;
        e["start"] = a.original.start;
        e["end"] = a.original.end;
        e["category"] = category_name(a.original.category);
        e["out_start"] = a.out_start;
        e["out_end"] = a.out_end;
        e["replacement"] = a.replacement;
        applied.push_back(std::move(e));
    }
    j["applied"] = std::move(applied);
    return j;
}

// ---------------------------------------------------------------------------
// StudyRecord
// ---------------------------------------------------------------------------

inline StudyRecord study_from_json(const json& j) {
    if (!j.is_object()) throw InputError("record must be a JSON object");
    StudyRecord s;
    s.study_id = detail::require_string(j, "study_id");
    s.patient_id = detail::require_string(j, "patient_id");
    s.date = parse_iso_date(detail::require_string(j, "date"));
    if (const auto it = j.find("timestamp"); it != j.end() && !it->is_null()) s.timestamp = parse_time_of_day(*it);
    const json& images = detail::require(j, "image_ids");
    if (!images.is_array()) throw InputError("image_ids must be an array");
    for (const json& id : images) {
        if (!id.is_string()) throw InputError("image_ids entries must be strings");
        s.image_ids.push_back(id.get<std::string>());
    }
    if (s.image_ids.empty()) throw InputError("study " + s.study_id + " has no image_ids");
    if (const auto it = j.find("metadata"); it != j.end()) {
        if (!it->is_object()) throw InputError("metadata must be an object");
        for (const auto& [k, v] : it->items()) {
            s.metadata.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    return s;
}

inline ordered_json to_json(const StudyRecord& s) {
    ordered_json j;
    j["study_id"] = s.study_id;
    j["patient_id"] = s.patient_id;
    j["date"] = to_iso(s.date);
    if (s.timestamp) j["timestamp"] = format_time_of_day(*s.timestamp);
    j["image_ids"] = s.image_ids;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : s.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
    return j;
}

// ---------------------------------------------------------------------------
// Line-delimited files
// ---------------------------------------------------------------------------

/// Calls @p on_record for every non-blank line; parse or schema errors become LineError.
template <typename OnRecord>
void for_each_json_line(std::istream& in, const std::string& source, OnRecord&& on_record) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw LineError(source, line_no, std::string("malformed JSON: ") + e.what());
        }
        try {
            on_record(j, line_no);
        } catch (const LineError&) {
            throw;
        } catch (const InputError& e) {
            throw LineError(source, line_no, e.what());
        } catch (const json::exception& e) {
            throw LineError(source, line_no, e.what());
        }
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path) {
    const std::string content = read_file(path);
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
}

template <typename T, typename Parse>
std::vector<T> read_json_lines(const std::string& path, Parse&& parse) {
    std::ifstream in = open_input(path);
    std::vector<T> out;
    for_each_json_line(in, path, [&](const json& j, std::size_t) { out.push_back(parse(j)); });
    return out;
}

inline std::vector<RawDocument> read_corpus(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen;
    for_each_json_line(in, path, [&](const json& j, std::size_t) {
        RawDocument d = raw_document_from_json(j);
        if (!seen.insert(d.doc_id).second) throw InputError("duplicate doc_id '" + d.doc_id + "'");
        docs.push_back(std::move(d));
    });
    return docs;
}

inline std::vector<StudyRecord> read_studies(const std::string& path) {
    return read_json_lines<StudyRecord>(path, study_from_json);
}

/// Serializes each value on its own LF-terminated line.
template <typename Range>
std::string to_json_lines(const Range& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ComputeError("write to '" + path + "' failed");
}

}  // namespace radvlp::io
