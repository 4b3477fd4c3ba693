/**
 * @file bundle.hpp
 * @brief Weight bundles: a directory of NPY tensors with an index.json of
 * {name: {file, shape, layout}}, and the resize step applied to one.
 */

#pragma once

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/embed/npy.hpp"
#include "radvlp/vit/resize.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace radvlp::vit {

struct TensorEntry {
    std::string file;
    std::vector<std::size_t> shape;
    std::string layout;  // empty when not a kernel
    npy::Array array;
};

struct WeightBundle {
    std::map<std::string, TensorEntry> tensors;
};

inline constexpr const char* kIndexFile = "index.json";

inline WeightBundle load_bundle(const std::string& dir) {
    const std::string index_path = (std::filesystem::path(dir) / kIndexFile).string();
    const io::json index = io::read_json_file(index_path);
    if (!index.is_object()) throw InputError(index_path + ": index must be an object");
    WeightBundle b;
    for (const auto& [name, e] : index.items()) {
        if (!e.is_object() || !e.contains("file") || !e["file"].is_string()) {
            throw InputError(index_path + ": tensor '" + name + "' needs a 'file'");
        }
        TensorEntry t;
        t.file = e["file"].get<std::string>();
        if (e.contains("layout") && e["layout"].is_string()) t.layout = e["layout"].get<std::string>();
        t.array = npy::read((std::filesystem::path(dir) / t.file).string());
        t.shape = t.array.shape;
        if (e.contains("shape")) {
            if (!e["shape"].is_array() || e["shape"].get<std::vector<std::size_t>>() != t.shape) {
                throw InputError(index_path + ": shape of '" + name + "' does not match its NPY file");
            }
        }
        b.tensors.emplace(name, std::move(t));
    }
    return b;
}

inline io::ordered_json bundle_index(const WeightBundle& b) {
    io::ordered_json j = io::ordered_json::object();
    for (const auto& [name, t] : b.tensors) {
        io::ordered_json e;
        e["file"] = t.file;
        e["shape"] = t.shape;
        if (!t.layout.empty()) e["layout"] = t.layout;
        j[name] = std::move(e);
    }
    return j;
}

/// (relative file name, contents) for every file of the bundle, index last.
inline std::vector<std::pair<std::string, std::string>> bundle_files(const WeightBundle& b) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& [name, t] : b.tensors) files.emplace_back(t.file, npy::encode(t.array));
    files.emplace_back(kIndexFile, bundle_index(b).dump(2) + "\n");
    return files;
}

inline void save_bundle(const WeightBundle& b, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [file, bytes] : bundle_files(b)) io::write_file((std::filesystem::path(dir) / file).string(), bytes);
}

struct ResizeRequest {
    std::string pos_embed_name = "pos_embed";
    std::string kernel_name = "patch_embed.weight";
    std::size_t prefix_tokens = 1;
    std::optional<std::size_t> grid;        // new grid side
    std::optional<std::size_t> patch_size;  // new kernel size
    std::string default_layout = "OIHW";
    unsigned threads = 1;
};

struct ResizeSummary {
    std::vector<std::string> actions;
};

/// Applies the requested resizes in place; other tensors are left untouched.
inline ResizeSummary resize_bundle(WeightBundle& b, const ResizeRequest& req) {
    ResizeSummary s;
    if (req.grid) {
        const auto it = b.tensors.find(req.pos_embed_name);
        if (it == b.tensors.end()) throw InputError("bundle has no tensor '" + req.pos_embed_name + "'");
        TensorEntry& t = it->second;
        const PositionEmbedding pe = pos_embed_from_tensor(t.shape, t.array.values, req.prefix_tokens);
        const PositionEmbedding out = interpolate_pos_embed(pe, *req.grid, *req.grid);
        auto [shape, values] = pos_embed_to_tensor(out, t.shape.size());
        s.actions.push_back(req.pos_embed_name + ": grid " + std::to_string(pe.h) + "x" + std::to_string(pe.w) + " -> " +
                            std::to_string(out.h) + "x" + std::to_string(out.w));
        t.shape = t.array.shape = shape;
        t.array.values = std::move(values);
    }
    if (req.patch_size) {
        const auto it = b.tensors.find(req.kernel_name);
        if (it == b.tensors.end()) throw InputError("bundle has no tensor '" + req.kernel_name + "'");
        TensorEntry& t = it->second;
        const KernelLayout layout = parse_layout(t.layout.empty() ? req.default_layout : t.layout);
        const PatchKernel k = kernel_from_tensor(t.shape, t.array.values, layout);
        const PatchKernel out = pseudoinverse_patch_resize(k, *req.patch_size, req.threads);
        auto [shape, values] = kernel_to_tensor(out, layout);
        s.actions.push_back(req.kernel_name + ": patch " + std::to_string(k.p) + " -> " + std::to_string(out.p) +
                            (out.p < k.p ? " (shrinking: inner products not preserved)" : ""));
        t.layout = std::string(layout_name(layout));
        t.shape = t.array.shape = shape;
        t.array.values = std::move(values);
    }
    return s;
}

}  // namespace radvlp::vit
