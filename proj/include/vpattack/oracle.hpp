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

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vpattack/core.hpp"
#include "vpattack/render.hpp"

namespace vpattack {

/// Side information that only the simulated oracle reads. Remote oracles see
/// pixels and prompt text alone.
struct SceneMetadata {
    Label benign_label;
    std::optional<SignObservation> sign;  ///< absent for unmodified images
};

struct OracleRequest {
    TargetPrompt prompt;
    std::vector<Image> images;
    std::optional<double> temperature_hint;
    std::optional<SceneMetadata> scene;

    void validate() const {
        if (images.empty()) {
            throw ConfigError("oracle request needs at least one image");
        }
    }
};

struct OracleResponse {
    std::string raw_text;
    std::optional<Label> extracted_label;
    double latency_ms = 0.0;
    std::string provider_id;
};

/// The black-box target f(p, I_1..I_N).
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual std::string provider_id() const = 0;
    /// Returns the raw reply; extracted_label is left empty (see classify()).
    virtual OracleResponse query(const OracleRequest& request) = 0;
};

/// Text-only model used as the attacker LLM.
class LanguageModel {
public:
    virtual ~LanguageModel() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// ---------------------------------------------------------------------------
// Label extraction
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Earliest word-bounded occurrence of `needle` in `hay`, or npos.
inline std::size_t find_word(std::string_view hay, std::string_view needle) {
    if (needle.empty()) {
        return std::string_view::npos;
    }
    for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]) || !is_word_char(needle.front());
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
        if (left_ok && right_ok) {
            return pos;
        }
    }
    return std::string_view::npos;
}

}  // namespace detail

/// Label whose synonym starts earliest in the canonicalized text; a tie at the
/// same position goes to the longer synonym.
inline std::optional<Label> extract_label(std::string_view raw_text, const LabelSpace& space) {
    const auto text = canonicalize(raw_text);
    std::optional<Label> best;
    std::size_t best_pos = std::string::npos;
    std::size_t best_len = 0;
    for (const auto& [surface, label] : space.synonyms()) {
        const auto pos = detail::find_word(text, surface);
        if (pos == std::string_view::npos) {
            continue;
        }
        if (pos < best_pos || (pos == best_pos && surface.size() > best_len)) {
            best_pos = pos;
            best_len = surface.size();
            best = Label{label, space.id()};
        }
    }
    return best;
}

/// query() plus label extraction against `space`.
inline OracleResponse classify(Oracle& oracle, const OracleRequest& request, const LabelSpace& space) {
    auto r = oracle.query(request);
    r.extracted_label = extract_label(r.raw_text, space);
    return r;
}

// ---------------------------------------------------------------------------
// Contrast
// ---------------------------------------------------------------------------

namespace detail {

inline double linearize(std::uint8_t c) {
    const double v = c / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

}  // namespace detail

/// sRGB relative luminance.
inline double relative_luminance(Rgb c) {
    return 0.2126 * detail::linearize(c.r) + 0.7152 * detail::linearize(c.g) + 0.0722 * detail::linearize(c.b);
}

/// (L_hi + 0.05) / (L_lo + 0.05); symmetric, in [1, 21].
inline double contrast_ratio(Rgb fg, Rgb bg) {
    const double a = relative_luminance(fg);
    const double b = relative_luminance(bg);
    return (std::max(a, b) + 0.05) / (std::min(a, b) + 0.05);
}

// ---------------------------------------------------------------------------
// Simulated legibility oracle
// ---------------------------------------------------------------------------

struct SimulatedOracleConfig {
    double min_contrast = 4.5;
    double min_area_fraction = 0.005;
    /// label -> keywords that, when legible on a sign, make the oracle obey it.
    std::map<std::string, std::vector<std::string>> keywords;
    std::string sentence_prefix = "Decision: ";
};

/// Deterministic offline stand-in for an LVLM: obeys a sign only if it is
/// high-contrast, large enough, and carries a known keyword.
class SimulatedOracle final : public Oracle {
public:
    SimulatedOracle(LabelSpace space, SimulatedOracleConfig config)
        : space_(std::move(space)), config_(std::move(config)) {
        for (const auto& [label, words] : config_.keywords) {
            const auto l = space_.label(label);
            for (const auto& w : words) {
                const auto c = canonicalize(w);
                if (c.empty()) {
                    throw ConfigError("empty keyword for label '" + label + "'");
                }
                keyword_table_.emplace_back(c, l.value);
            }
        }
    }

    std::string provider_id() const override {
        return "simulated(c_min=" + std::to_string(config_.min_contrast) +
               ",a_min=" + std::to_string(config_.min_area_fraction) + ")";
    }

    const LabelSpace& space() const noexcept { return space_; }
    const SimulatedOracleConfig& config() const noexcept { return config_; }

    /// The label sentence the oracle replies with.
    std::string sentence(const std::string& label) const { return config_.sentence_prefix + label + "."; }

    /// Label the sign text would trigger, ignoring legibility.
    std::optional<std::string> keyword_label(std::string_view sign_text) const {
        const auto text = canonicalize(sign_text);
        std::optional<std::string> best;
        std::size_t best_pos = std::string::npos;
        for (const auto& [kw, label] : keyword_table_) {
            const auto pos = detail::find_word(text, kw);
            if (pos != std::string_view::npos && pos < best_pos) {
                best_pos = pos;
                best = label;
            }
        }
        return best;
    }

    bool legible(const SignObservation& s) const {
        return contrast_ratio(s.letter_color, s.background_color) >= config_.min_contrast &&
               s.area_fraction >= config_.min_area_fraction;
    }

    std::string reply(const SceneMetadata& scene) const {
        if (scene.sign && legible(*scene.sign)) {
            if (auto l = keyword_label(scene.sign->text)) {
                return sentence(*l);
            }
        }
        return sentence(scene.benign_label.value);
    }

    OracleResponse query(const OracleRequest& request) override {
        request.validate();
        if (!request.scene) {
            throw ConfigError("simulated oracle requires scene metadata");
        }
        if (!space_.contains(request.scene->benign_label)) {
            throw ConfigError("scene benign label not in the simulated oracle's label space");
        }
        return {reply(*request.scene), std::nullopt, 0.0, provider_id()};
    }

private:
    LabelSpace space_;
    SimulatedOracleConfig config_;
    std::vector<std::pair<std::string, std::string>> keyword_table_;
};

// ---------------------------------------------------------------------------
// Scripted models (tests, dry runs)
// ---------------------------------------------------------------------------

/// Replies with script[i mod n] on the i-th call.
class ScriptedOracle final : public Oracle {
public:
    explicit ScriptedOracle(std::vector<std::string> script, std::string id = "scripted")
        : script_(std::move(script)), id_(std::move(id)) {
        if (script_.empty()) {
            throw ConfigError("scripted oracle needs at least one reply");
        }
    }
    std::string provider_id() const override { return id_; }
    OracleResponse query(const OracleRequest& request) override {
        request.validate();
        std::lock_guard lock(mu_);
        return {script_[calls_++ % script_.size()], std::nullopt, 0.0, id_};
    }
    std::size_t calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }

private:
    std::vector<std::string> script_;
    std::string id_;
    mutable std::mutex mu_;
    std::size_t calls_ = 0;
};

/// Attacker LLM mock. Replays its script and then repeats the last reply.
class ScriptedLanguageModel final : public LanguageModel {
public:
    explicit ScriptedLanguageModel(std::vector<std::string> script) : script_(std::move(script)) {
        if (script_.empty()) {
            throw ConfigError("scripted language model needs at least one reply");
        }
    }
    std::string complete(const std::string& prompt) override {
        prompts_.push_back(prompt);
        const auto i = std::min(calls_++, script_.size() - 1);
        return script_[i];
    }
    std::size_t calls() const noexcept { return calls_; }
    const std::vector<std::string>& prompts() const noexcept { return prompts_; }

private:
    std::vector<std::string> script_;
    std::vector<std::string> prompts_;
    std::size_t calls_ = 0;
};

}  // namespace vpattack
