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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace vpattack {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad campaign configuration or inconsistent inputs (e.g. mixed label spaces).
class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// The composed sign footprint misses the image or the placement region.
class PlacementError : public Error {
public:
    using Error::Error;
};

class UnsupportedGlyph : public Error {
public:
    UnsupportedGlyph(std::string offending)
        : Error("unsupported glyph(s) in sign text: \"" + offending + "\""), offending_(std::move(offending)) {}
    const std::string& offending() const noexcept { return offending_; }

private:
    std::string offending_;
};

/// Oracle round-trip failed. `retryable` is set for transport failures.
class QueryError : public Error {
public:
    QueryError(const std::string& what, bool retryable = false, std::string scenario_id = {})
        : Error(scenario_id.empty() ? what : "scenario " + scenario_id + ": " + what),
          retryable_(retryable),
          scenario_id_(std::move(scenario_id)) {}
    bool retryable() const noexcept { return retryable_; }
    const std::string& scenario_id() const noexcept { return scenario_id_; }

private:
    bool retryable_;
    std::string scenario_id_;
};

/// Provider refused or returned an empty reply. Scored as a non-match.
class RefusalError : public QueryError {
public:
    explicit RefusalError(const std::string& what) : QueryError(what, false) {}
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class LabelingError : public Error {
public:
    using Error::Error;
};

class ContaminationError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Pixels
// ---------------------------------------------------------------------------

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kWhite{255, 255, 255};

/// 8-bit RGB raster, row-major, interleaved channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = kBlack) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw InvalidParameter("image dimensions must be positive");
        }
        data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
        for (std::size_t i = 0; i < data_.size(); i += 3) {
            data_[i] = fill.r;
            data_[i + 1] = fill.g;
            data_[i + 2] = fill.b;
        }
    }
    Image(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0) {
            throw InvalidParameter("image dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
            throw InvalidParameter("image buffer size does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    Rgb at(int x, int y) const {
        const auto i = index(x, y);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const auto i = index(x, y);
        data_[i] = c.r;
        data_[i + 1] = c.g;
        data_[i + 2] = c.b;
    }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    const std::vector<std::uint8_t>& bytes() const noexcept { return data_; }
    std::vector<std::uint8_t>& bytes() noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const {
        if (!contains(x, y)) {
            throw InvalidParameter("pixel coordinate out of bounds");
        }
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Axis-aligned pixel rectangle [x, x+w) x [y, y+h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool inside(int width, int height) const noexcept {
        return w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
    }
    bool contains(int px, int py) const noexcept { return px >= x && py >= y && px < x + w && py < y + h; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

/// Lowercase, trim, and collapse internal whitespace runs to one space.
inline std::string canonicalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace detail

/// A member of a LabelSpace. The space id ties it to the space it came from.
struct Label {
    std::string value;
    std::uint64_t space_id = 0;

    friend bool operator==(const Label&, const Label&) = default;
};

class LabelSpace {
public:
    LabelSpace() = default;

    /// `synonyms` maps a label to extra surface strings accepted in oracle replies.
    /// Every label is implicitly its own synonym.
    explicit LabelSpace(std::vector<std::string> labels,
                        const std::map<std::string, std::vector<std::string>>& synonyms = {}) {
        if (labels.empty()) {
            throw ConfigError("label space must not be empty");
        }
        for (auto& l : labels) {
            l = canonicalize(l);
            if (l.empty()) {
                throw ConfigError("empty label in label space");
            }
            if (std::find(labels_.begin(), labels_.end(), l) != labels_.end()) {
                throw ConfigError("duplicate label '" + l + "' in label space");
            }
            labels_.push_back(l);
        }
        id_ = 0x9e3779b97f4a7c15ULL;
        for (const auto& l : labels_) {
            id_ = detail::fnv1a(l, id_) ^ 0x1f;
        }
        for (const auto& l : labels_) {
            add_synonym(l, l);
        }
        for (const auto& [label, words] : synonyms) {
            const auto canon = canonicalize(label);
            if (std::find(labels_.begin(), labels_.end(), canon) == labels_.end()) {
                throw ConfigError("synonyms given for unknown label '" + label + "'");
            }
            for (const auto& w : words) {
                add_synonym(w, canon);
            }
        }
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::uint64_t id() const noexcept { return id_; }

    /// Canonical surface string -> label value.
    const std::map<std::string, std::string>& synonyms() const noexcept { return synonyms_; }

    bool contains(const Label& l) const {
        return l.space_id == id_ && std::find(labels_.begin(), labels_.end(), l.value) != labels_.end();
    }

    /// Resolves a surface string (any synonym, any casing/spacing) to a label.
    std::optional<Label> resolve(std::string_view surface) const {
        const auto it = synonyms_.find(canonicalize(surface));
        if (it == synonyms_.end()) {
            return std::nullopt;
        }
        return Label{it->second, id_};
    }

    /// Like resolve() but throws for strings outside the space.
    Label label(std::string_view surface) const {
        auto l = resolve(surface);
        if (!l) {
            throw ConfigError("'" + std::string(surface) + "' is not in the label space");
        }
        return *l;
    }

private:
    void add_synonym(std::string_view surface, const std::string& label) {
        auto canon = canonicalize(surface);
        if (canon.empty()) {
            throw ConfigError("empty synonym for label '" + label + "'");
        }
        const auto [it, inserted] = synonyms_.emplace(canon, label);
        if (!inserted && it->second != label) {
            throw ConfigError("synonym '" + canon + "' maps to both '" + it->second + "' and '" + label + "'");
        }
    }

    std::vector<std::string> labels_;
    std::map<std::string, std::string> synonyms_;
    std::uint64_t id_ = 0;
};

/// 1 iff the observed label equals the attacker target.
inline int indicator_match(const Label& observed, const Label& target) {
    if (observed.space_id != target.space_id) {
        throw ConfigError("indicator_match: labels '" + observed.value + "' and '" + target.value +
                          "' come from different label spaces");
    }
    return observed.value == target.value ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class Split { known, transferability };

inline std::string_view to_string(Split s) { return s == Split::known ? "known" : "transferability"; }

inline Split parse_split(std::string_view s) {
    const auto c = canonicalize(s);
    if (c == "known") {
        return Split::known;
    }
    if (c == "transferability" || c == "transfer" || c == "heldout") {
        return Split::transferability;
    }
    throw ConfigError("unknown split tag '" + std::string(s) + "'");
}

struct Scenario {
    std::string id;
    Image image;
    Rect placement_region;
    Label benign_label;
    Label target_label;
    Split split = Split::known;

    /// Throws ConfigError when the scenario invariants do not hold.
    void validate() const {
        if (image.empty()) {
            throw ConfigError("scenario " + id + ": empty image");
        }
        if (!placement_region.inside(image.width(), image.height())) {
            throw ConfigError("scenario " + id + ": placement region outside image bounds");
        }
        if (benign_label.space_id != target_label.space_id) {
            throw ConfigError("scenario " + id + ": benign and target labels from different label spaces");
        }
        if (benign_label.value == target_label.value) {
            throw ConfigError("scenario " + id + ": benign label equals target label");
        }
    }
};

struct TargetPrompt {
    std::string text;

    explicit TargetPrompt(std::string t) : text(std::move(t)) {
        if (text.empty()) {
            throw ConfigError("target prompt must not be empty");
        }
    }
};

// ---------------------------------------------------------------------------
// Concurrency
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// (lowest index) is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (n == 0) {
        return;
    }
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline std::size_t default_workers() {
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : std::min<std::size_t>(hw, 16);
}

}  // namespace vpattack
