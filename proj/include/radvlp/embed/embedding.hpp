/**
 * @file embedding.hpp
 * @brief Embedding matrices with their id manifest, plus the small CSV
 * side files (labels, targets, study grouping) that travel with them.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/embed/npy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace radvlp::embed {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDim = 512;

struct EmbeddingMatrix {
    Matrix data;
    std::vector<std::string> ids;
    std::string source;
    std::string normalizer;

    std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }

    Vector row(std::size_t i) const { return data.row(static_cast<Eigen::Index>(i)).transpose(); }

    void validate() const {
        if (ids.size() != rows()) {
            throw InputError("embedding matrix has " + std::to_string(rows()) + " rows but " +
                             std::to_string(ids.size()) + " ids");
        }
        if (!data.allFinite()) throw InputError("embedding matrix contains non-finite values");
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!seen.emplace(ids[i], i).second) throw InputError("duplicate embedding id '" + ids[i] + "'");
        }
    }

    std::unordered_map<std::string, std::size_t> index() const {
        std::unordered_map<std::string, std::size_t> m;
        for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], i);
        return m;
    }

    /// Row subset in the given order.
    EmbeddingMatrix select(const std::vector<std::size_t>& rows_wanted) const {
        EmbeddingMatrix out;
        out.data.resize(static_cast<Eigen::Index>(rows_wanted.size()), data.cols());
        for (std::size_t i = 0; i < rows_wanted.size(); ++i) {
            out.data.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(rows_wanted[i]));
            out.ids.push_back(ids[rows_wanted[i]]);
        }
        out.source = source;
        out.normalizer = normalizer;
        return out;
    }
};

inline EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows, std::vector<std::string> ids = {}) {
    EmbeddingMatrix m;
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    m.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw InputError("ragged embedding rows");
        for (std::size_t j = 0; j < d; ++j) m.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    if (ids.empty()) {
        for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("r" + std::to_string(i));
    }
    m.ids = std::move(ids);
    m.validate();
    return m;
}

/// Default manifest location: "x.npy" -> "x.json".
inline std::string manifest_path_for(const std::string& npy_path) {
    return std::filesystem::path(npy_path).replace_extension(".json").string();
}

inline EmbeddingMatrix load_embeddings(const std::string& npy_path, const std::string& manifest_path) {
    const npy::Array a = npy::read(npy_path);
    if (a.shape.size() != 2) throw InputError(npy_path + ": embedding array must be 2-D");
    const io::json man = io::read_json_file(manifest_path);
    if (!man.is_object() || !man.contains("ids") || !man["ids"].is_array()) {
        throw InputError(manifest_path + ": manifest needs an 'ids' array");
    }
    EmbeddingMatrix m;
    for (const auto& id : man["ids"]) {
        if (!id.is_string()) throw InputError(manifest_path + ": ids must be strings");
        m.ids.push_back(id.get<std::string>());
    }
    if (man.contains("dim")) {
        if (!man["dim"].is_number_unsigned() || man["dim"].get<std::size_t>() != a.shape[1]) {
            throw InputError(manifest_path + ": 'dim' does not match the NPY shape");
        }
    }
    if (man.contains("source") && man["source"].is_string()) m.source = man["source"].get<std::string>();
    if (man.contains("normalizer") && man["normalizer"].is_string()) m.normalizer = man["normalizer"].get<std::string>();
    m.data = Eigen::Map<const Matrix>(a.values.data(), static_cast<Eigen::Index>(a.shape[0]),
                                      static_cast<Eigen::Index>(a.shape[1]));
    m.validate();
    return m;
}

inline EmbeddingMatrix load_embeddings(const std::string& npy_path) {
    return load_embeddings(npy_path, manifest_path_for(npy_path));
}

inline io::ordered_json manifest_json(const EmbeddingMatrix& m) {
    io::ordered_json j;
    j["ids"] = m.ids;
    j["dim"] = m.dim();
    j["source"] = m.source;
    if (!m.normalizer.empty()) j["normalizer"] = m.normalizer;
    return j;
}

inline void save_embeddings(const EmbeddingMatrix& m, const std::string& npy_path, const std::string& manifest_path,
                            npy::DType dtype = npy::DType::F4) {
    m.validate();
    const std::vector<std::size_t> shape{m.rows(), m.dim()};
    npy::write(npy_path, shape, std::span<const double>(m.data.data(), static_cast<std::size_t>(m.data.size())), dtype);
    io::write_file(manifest_path, manifest_json(m).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV side files
// ---------------------------------------------------------------------------

namespace detail {

/// Two-column CSV rows; a first line whose second field is not numeric is a header when @p numeric.
inline std::vector<std::pair<std::string, std::string>> read_pairs_csv(const std::string& path, bool numeric,
                                                                       const char* header_first) {
    const std::string content = io::read_file(path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw LineError(path, line_no, "expected exactly two comma-separated fields");
        }
        std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        if (line_no == 1 && a == header_first) continue;
        if (a.empty()) throw LineError(path, line_no, "empty id");
        if (numeric) {
            try {
                std::size_t used = 0;
                (void)std::stod(b, &used);
                if (used != b.size()) throw std::invalid_argument(b);
            } catch (const std::logic_error&) {
                throw LineError(path, line_no, "non-numeric value '" + b + "'");
            }
        }
        rows.emplace_back(std::move(a), std::move(b));
    }
    return rows;
}

}  // namespace detail

/// `id,label` with integer labels (binary tasks use 0/1).
inline std::map<std::string, int> read_labels_csv(const std::string& path) {
    std::map<std::string, int> out;
    for (const auto& [id, v] : detail::read_pairs_csv(path, true, "id")) {
        const double x = std::stod(v);
        if (x != std::floor(x)) throw InputError(path + ": label for '" + id + "' is not an integer");
        if (!out.emplace(id, static_cast<int>(x)).second) throw InputError(path + ": duplicate id '" + id + "'");
    }
    return out;
}

/// `id,value` with real-valued regression targets.
inline std::map<std::string, double> read_targets_csv(const std::string& path) {
    std::map<std::string, double> out;
    for (const auto& [id, v] : detail::read_pairs_csv(path, true, "id")) {
        if (!out.emplace(id, std::stod(v)).second) throw InputError(path + ": duplicate id '" + id + "'");
    }
    return out;
}

/// `image_id,study_id`.
inline std::map<std::string, std::string> read_study_grouping(const std::string& path) {
    std::map<std::string, std::string> out;
    for (auto& [img, study] : detail::read_pairs_csv(path, false, "image_id")) {
        if (study.empty()) throw InputError(path + ": empty study id for '" + img + "'");
        if (!out.emplace(img, study).second) throw InputError(path + ": image '" + img + "' listed twice");
    }
    return out;
}

/// Values of @p table in the row order of @p ids.
template <typename T>
std::vector<T> align(const std::vector<std::string>& ids, const std::map<std::string, T>& table, const char* what) {
    std::vector<T> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
        const auto it = table.find(id);
        if (it == table.end()) throw InputError(std::string("no ") + what + " for id '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

}  // namespace radvlp::embed
