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

#include <optional>
#include <string>
#include <vector>

#include "vpattack/core.hpp"
#include "vpattack/dictionary.hpp"
#include "vpattack/oracle.hpp"
#include "vpattack/render.hpp"

namespace vpattack {

/// Everything needed to turn attack parameters into oracle verdicts.
struct AttackContext {
    const Dictionary& dictionary;
    const LabelSpace& space;
    Oracle& oracle;
    TargetPrompt prompt;
    std::size_t workers = default_workers();
    std::optional<double> temperature_hint;
};

struct ScenarioOutcome {
    std::string scenario_id;
    std::optional<Label> observed;
    bool success = false;
    std::string raw_text;
    std::string failure;  ///< non-empty when the query was refused or failed
};

inline void check_same_space(const std::vector<Scenario>& scenarios, const LabelSpace& space) {
    for (const auto& s : scenarios) {
        if (!space.contains(s.benign_label) || !space.contains(s.target_label)) {
            throw ConfigError("scenario " + s.id + " uses labels outside the campaign label space");
        }
    }
}

inline OracleRequest make_request(const Scenario& scenario, const TargetPrompt& prompt, Image image,
                                  std::optional<SignObservation> sign, std::optional<double> temperature = {}) {
    OracleRequest r{prompt, {}, temperature, SceneMetadata{scenario.benign_label, std::move(sign)}};
    r.images.push_back(std::move(image));
    return r;
}

/// Renders (optionally) and queries one scenario. Refusals become a recorded
/// non-success; any other query error is rethrown tagged with the scenario id
/// unless `tolerate_failures` is set.
inline ScenarioOutcome evaluate_scenario(const AttackContext& ctx, const Scenario& scenario,
                                         const std::optional<AttackParams>& pi, bool tolerate_failures = false) {
    ScenarioOutcome out{scenario.id, std::nullopt, false, {}, {}};
    std::optional<OracleRequest> request;
    if (!pi) {
        request = make_request(scenario, ctx.prompt, scenario.image, std::nullopt, ctx.temperature_hint);
    } else {
        // A sign that cannot land in this view is a failed attack, not a query.
        try {
            auto rendered = render_attack_detailed(scenario, *pi, ctx.dictionary);
            request = make_request(scenario, ctx.prompt, std::move(rendered.image), std::move(rendered.observation),
                                   ctx.temperature_hint);
        } catch (const PlacementError& e) {
            out.failure = std::string("placement: ") + e.what();
            return out;
        }
    }
    try {
        const auto resp = classify(ctx.oracle, *request, ctx.space);
        out.raw_text = resp.raw_text;
        out.observed = resp.extracted_label;
        out.success = resp.extracted_label && indicator_match(*resp.extracted_label, scenario.target_label) == 1;
        if (!resp.extracted_label) {
            out.failure = "no label in reply";
        }
    } catch (const RefusalError& e) {
        out.failure = std::string("refusal: ") + e.what();
    } catch (const QueryError& e) {
        if (!tolerate_failures) {
            throw QueryError(e.what(), e.retryable(), scenario.id);
        }
        out.failure = std::string("query error: ") + e.what();
    }
    return out;
}

inline std::vector<ScenarioOutcome> evaluate_all(const AttackContext& ctx, const std::vector<Scenario>& scenarios,
                                                 const std::optional<AttackParams>& pi, bool tolerate_failures = false) {
    check_same_space(scenarios, ctx.space);
    std::vector<ScenarioOutcome> out(scenarios.size());
    parallel_for(scenarios.size(), ctx.workers,
                 [&](std::size_t i) { out[i] = evaluate_scenario(ctx, scenarios[i], pi, tolerate_failures); });
    return out;
}

/// Number of scenarios whose attacked oracle output equals the attacker target.
inline int objective_score(const AttackParams& pi, const std::vector<Scenario>& scenarios, const AttackContext& ctx) {
    int score = 0;
    for (const auto& o : evaluate_all(ctx, scenarios, pi)) {
        score += o.success ? 1 : 0;
    }
    return score;
}

}  // namespace vpattack
