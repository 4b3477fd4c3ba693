/**
 * @file npy.hpp
 * @brief Minimal NPY (format 1.0) reader and writer for little-endian
 * float32 / float64 C-order arrays.
 */

#pragma once

#include "radvlp/core/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace radvlp::npy {

static_assert(std::endian::native == std::endian::little, "NPY IO assumes a little-endian host");

enum class DType { F4, F8 };

struct Array {
    std::vector<std::size_t> shape;
    std::vector<double> values;  // C order
    DType dtype = DType::F4;

    std::size_t size() const {
        std::size_t n = 1;
        for (const std::size_t s : shape) n *= s;
        return n;
    }
};

namespace detail {

inline constexpr char kMagic[] = "\x93NUMPY";

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Value text of @p key in the header dict, e.g. "'<f4'" or "(3, 4)".
inline std::string header_value(const std::string& header, const std::string& key, const std::string& path) {
    const std::string quoted = "'" + key + "'";
    const auto k = header.find(quoted);
    if (k == std::string::npos) throw InputError(path + ": NPY header lacks '" + key + "'");
    const auto colon = header.find(':', k + quoted.size());
    if (colon == std::string::npos) throw InputError(path + ": malformed NPY header");
    std::size_t i = colon + 1;
    while (i < header.size() && header[i] == ' ') ++i;
    std::size_t end = i;
    if (i < header.size() && header[i] == '(') {
        end = header.find(')', i);
        if (end == std::string::npos) throw InputError(path + ": malformed NPY shape");
        ++end;
    } else if (i < header.size() && header[i] == '\'') {
        end = header.find('\'', i + 1);
        if (end == std::string::npos) throw InputError(path + ": malformed NPY header");
        ++end;
    } else {
        while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    }
    return trim(header.substr(i, end - i));
}

inline std::vector<std::size_t> parse_shape(const std::string& text, const std::string& path) {
    std::vector<std::size_t> shape;
    std::string inner = text.substr(1, text.size() - 2);
    std::size_t pos = 0;
    while (pos < inner.size()) {
        std::size_t comma = inner.find(',', pos);
        if (comma == std::string::npos) comma = inner.size();
        const std::string item = trim(inner.substr(pos, comma - pos));
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                const unsigned long long v = std::stoull(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
                shape.push_back(static_cast<std::size_t>(v));
            } catch (const std::logic_error&) {
                throw InputError(path + ": invalid NPY shape entry '" + item + "'");
            }
        }
        pos = comma + 1;
    }
    return shape;
}

}  // namespace detail

inline Array read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    char magic[6];
    unsigned char version[2];
    in.read(magic, 6);
    in.read(reinterpret_cast<char*>(version), 2);
    if (!in || std::memcmp(magic, detail::kMagic, 6) != 0) throw InputError(path + ": not an NPY file");
    std::size_t header_len = 0;
    if (version[0] == 1) {
        unsigned char b[2];
        in.read(reinterpret_cast<char*>(b), 2);
        header_len = static_cast<std::size_t>(b[0]) | (static_cast<std::size_t>(b[1]) << 8);
    } else if (version[0] == 2 || version[0] == 3) {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        header_len = static_cast<std::size_t>(b[0]) | (static_cast<std::size_t>(b[1]) << 8) |
                     (static_cast<std::size_t>(b[2]) << 16) | (static_cast<std::size_t>(b[3]) << 24);
    } else {
        throw InputError(path + ": unsupported NPY version " + std::to_string(version[0]));
    }
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw InputError(path + ": truncated NPY header");

    Array a;
    const std::string descr = detail::header_value(header, "descr", path);
    std::size_t width = 0;
    if (descr == "'<f4'") {
        a.dtype = DType::F4;
        width = 4;
    } else if (descr == "'<f8'") {
        a.dtype = DType::F8;
        width = 8;
    } else {
        throw InputError(path + ": unsupported NPY dtype " + descr + " (expected <f4 or <f8)");
    }
    if (detail::header_value(header, "fortran_order", path) != "False") {
        throw InputError(path + ": Fortran-ordered NPY arrays are not supported");
    }
    a.shape = detail::parse_shape(detail::header_value(header, "shape", path), path);

    const std::size_t n = a.size();
    std::vector<char> raw(n * width);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw InputError(path + ": truncated NPY data");
    a.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (width == 4) {
            float f;
            std::memcpy(&f, raw.data() + i * 4, 4);
            a.values[i] = f;
        } else {
            std::memcpy(&a.values[i], raw.data() + i * 8, 8);
        }
    }
    return a;
}

inline std::string header_for(std::span<const std::size_t> shape, DType dtype) {
    std::string dict = std::string("{'descr': '") + (dtype == DType::F4 ? "<f4" : "<f8") +
                       "', 'fortran_order': False, 'shape': (";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        dict += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
        if (i + 1 < shape.size()) dict += " ";
    }
    dict += "), }";
    // magic(6) + version(2) + length(2) + dict + padding + '\n' is a multiple of 64
    const std::size_t unpadded = 10 + dict.size() + 1;
    dict.append((64 - unpadded % 64) % 64, ' ');
    dict += '\n';
    return dict;
}

/// Complete file contents for an array.
inline std::string encode(std::span<const std::size_t> shape, std::span<const double> values, DType dtype = DType::F4) {
    std::size_t n = 1;
    for (const std::size_t s : shape) n *= s;
    if (n != values.size()) throw ComputeError("npy: shape does not match value count");
    const std::string header = header_for(shape, dtype);
    std::string out(detail::kMagic, 6);
    out += '\x01';
    out += '\x00';
    out += static_cast<char>(header.size() & 0xFF);
    out += static_cast<char>((header.size() >> 8) & 0xFF);
    out += header;
    out.reserve(out.size() + n * (dtype == DType::F4 ? 4 : 8));
    for (const double v : values) {
        if (dtype == DType::F4) {
            const float f = static_cast<float>(v);
            out.append(reinterpret_cast<const char*>(&f), 4);
        } else {
            out.append(reinterpret_cast<const char*>(&v), 8);
        }
    }
    return out;
}

inline std::string encode(const Array& a) { return encode(a.shape, a.values, a.dtype); }

inline void write(const std::string& path, std::span<const std::size_t> shape, std::span<const double> values,
                  DType dtype = DType::F4) {
    const std::string bytes = encode(shape, values, dtype);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ComputeError("write to '" + path + "' failed");
}

inline void write(const std::string& path, const Array& a) { write(path, a.shape, a.values, a.dtype); }

}  // namespace radvlp::npy
