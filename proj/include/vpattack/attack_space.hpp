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

#include <string>
#include <vector>

#include "vpattack/ceopt.hpp"
#include "vpattack/dictionary.hpp"
#include "vpattack/objective.hpp"
#include "vpattack/render.hpp"

namespace vpattack {

struct AttackSpaceConfig {
    std::size_t color_bins = 8;  ///< cells per RGB channel
    int font_scale = 1;
    int padding = 3;
    PlacementSpec placement;     ///< used as-is unless an axis below is enabled
    std::vector<double> scales;     ///< optional categorical scale axis
    std::vector<double> rotations;  ///< optional categorical rotation axis (radians)
    double blend_weight = 1.0;
};

/// Maps CE search points to attack parameters. Coordinate order: phrase,
/// letter r/g/b, background r/g/b, then the optional scale and rotation axes.
class AttackSpace {
public:
    AttackSpace(const Dictionary& dictionary, AttackSpaceConfig config)
        : dictionary_(&dictionary), config_(std::move(config)) {
        if (dictionary.empty()) {
            throw ConfigError("attack space needs a non-empty dictionary");
        }
        if (config_.color_bins < 1) {
            throw ConfigError("color_bins must be >= 1");
        }
        for (const double s : config_.scales) {
            if (!(s > 0.0)) {
                throw ConfigError("scale choices must be positive");
            }
        }
    }

    ce::SearchSpace search_space() const {
        ce::SearchSpace s;
        s.coordinates.push_back(ce::Categorical{dictionary_->size()});
        for (int c = 0; c < 6; ++c) {
            s.coordinates.push_back(ce::BoundedInteger{0, 255, config_.color_bins});
        }
        if (!config_.scales.empty()) {
            s.coordinates.push_back(ce::Categorical{config_.scales.size()});
        }
        if (!config_.rotations.empty()) {
            s.coordinates.push_back(ce::Categorical{config_.rotations.size()});
        }
        return s;
    }

    std::vector<std::string> coordinate_names() const {
        std::vector<std::string> n{"phrase", "letter_r", "letter_g", "letter_b", "background_r", "background_g",
                                   "background_b"};
        if (!config_.scales.empty()) {
            n.emplace_back("scale");
        }
        if (!config_.rotations.empty()) {
            n.emplace_back("rotation");
        }
        return n;
    }

    AttackParams decode(const ce::Point& x) const {
        if (x.size() != coordinate_names().size()) {
            throw InvalidParameter("point has wrong dimension for the attack space");
        }
        const auto channel = [&](std::size_t i) {
            if (x[i] < 0 || x[i] > 255) {
                throw InvalidParameter("color channel out of range");
            }
            return static_cast<std::uint8_t>(x[i]);
        };
        AttackParams pi;
        pi.vp_index = static_cast<std::size_t>(x[0]);
        pi.sign.text = dictionary_->at(pi.vp_index).phrase;
        pi.sign.letter_color = {channel(1), channel(2), channel(3)};
        pi.sign.background_color = {channel(4), channel(5), channel(6)};
        pi.sign.font_scale = config_.font_scale;
        pi.sign.padding = config_.padding;
        pi.placement = config_.placement;
        std::size_t k = 7;
        if (!config_.scales.empty()) {
            pi.placement.scale = config_.scales.at(static_cast<std::size_t>(x[k++]));
        }
        if (!config_.rotations.empty()) {
            pi.placement.rotation = config_.rotations.at(static_cast<std::size_t>(x[k++]));
        }
        pi.blend_weight = config_.blend_weight;
        return pi;
    }

    /// Naive parameters for dictionary scoring: maximum contrast, base placement.
    AttackParams naive(std::size_t vp_index) const {
        ce::Point x{static_cast<ce::Value>(vp_index), 0, 0, 0, 255, 255, 255};
        if (!config_.scales.empty()) {
            x.push_back(0);
        }
        if (!config_.rotations.empty()) {
            x.push_back(0);
        }
        auto pi = decode(x);
        if (!config_.scales.empty()) {
            pi.placement.scale = config_.placement.scale;
        }
        if (!config_.rotations.empty()) {
            pi.placement.rotation = config_.placement.rotation;
        }
        return pi;
    }

    const AttackSpaceConfig& config() const noexcept { return config_; }
    const Dictionary& dictionary() const noexcept { return *dictionary_; }

private:
    const Dictionary* dictionary_;
    AttackSpaceConfig config_;
};

struct AttackOptimizeResult {
    AttackParams best_pi;
    int best_score = 0;
    ce::OptimizeResult raw;
};

/// Maximizes the number of flipped scenarios over the attack space. Stops early
/// once every scenario is flipped.
inline AttackOptimizeResult optimize_attack(const AttackSpace& space, const std::vector<Scenario>& scenarios,
                                            const AttackContext& ctx, ce::Budget budget) {
    if (scenarios.empty()) {
        throw ConfigError("optimize needs at least one scenario");
    }
    check_same_space(scenarios, ctx.space);
    budget.target_score = static_cast<double>(scenarios.size());
    AttackContext inner = ctx;
    inner.workers = 1;  // candidates already run in parallel
    auto raw = ce::optimize(
        space.search_space(),
        [&](const ce::Point& x) { return static_cast<double>(objective_score(space.decode(x), scenarios, inner)); },
        budget);
    AttackOptimizeResult out{space.decode(raw.best_point), static_cast<int>(raw.best_score), std::move(raw)};
    return out;
}

}  // namespace vpattack
