// Copyright 2026 The vpattack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "vpattack/core.hpp"

namespace vpattack::io {

inline std::vector<std::uint8_t> encode_png(const Image& img) {
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    pi.width = static_cast<png_uint_32>(img.width());
    pi.height = static_cast<png_uint_32>(img.height());
    pi.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&pi, nullptr, &size, 0, img.bytes().data(), 0, nullptr)) {
        throw Error(std::string("png sizing failed: ") + pi.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&pi, out.data(), &size, 0, img.bytes().data(), 0, nullptr)) {
        throw Error(std::string("png encode failed: ") + pi.message);
    }
    out.resize(size);
    return out;
}

inline Image decode_png(const std::vector<std::uint8_t>& bytes) {
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&pi, bytes.data(), bytes.size())) {
        throw Error(std::string("png decode failed: ") + pi.message);
    }
    pi.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(pi));
    if (!png_image_finish_read(&pi, nullptr, data.data(), 0, nullptr)) {
        png_image_free(&pi);
        throw Error(std::string("png decode failed: ") + pi.message);
    }
    return Image(static_cast<int>(pi.width), static_cast<int>(pi.height), std::move(data));
}

inline std::vector<std::uint8_t> encode_ppm(const Image& img) {
    const auto header = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.bytes().begin(), img.bytes().end());
    return out;
}

inline Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) {
            t.push_back(static_cast<char>(bytes[pos++]));
        }
        return t;
    };
    if (token() != "P6") {
        throw Error("ppm decode failed: not a binary P6 file");
    }
    int w = 0;
    int h = 0;
    int maxval = 0;
    try {
        w = std::stoi(token());
        h = std::stoi(token());
        maxval = std::stoi(token());
    } catch (const std::exception&) {
        throw Error("ppm decode failed: malformed header");
    }
    if (maxval != 255) {
        throw Error("ppm decode failed: only 8-bit files are supported");
    }
    ++pos;  // single whitespace after maxval
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    if (w <= 0 || h <= 0 || bytes.size() < pos + n) {
        throw Error("ppm decode failed: truncated pixel data");
    }
    return Image(w, h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline std::string read_text(const std::filesystem::path& path) {
    const auto b = read_file(path);
    return {b.begin(), b.end()};
}

/// Format chosen by extension: .png or .ppm.
inline Image load_image(const std::filesystem::path& path) {
    const auto ext = canonicalize(path.extension().string());
    const auto bytes = read_file(path);
    if (ext == ".png") {
        return decode_png(bytes);
    }
    if (ext == ".ppm") {
        return decode_ppm(bytes);
    }
    throw ConfigError("unsupported image format: " + path.string());
}

inline void save_image(const std::filesystem::path& path, const Image& img) {
    const auto ext = canonicalize(path.extension().string());
    if (ext == ".png") {
        write_file(path, encode_png(img));
    } else if (ext == ".ppm") {
        write_file(path, encode_ppm(img));
    } else {
        throw ConfigError("unsupported image format: " + path.string());
    }
}

}  // namespace vpattack::io
