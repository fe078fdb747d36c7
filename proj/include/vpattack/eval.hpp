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

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpattack/objective.hpp"

namespace vpattack {

struct ScenarioRecord {
    std::string scenario_id;
    std::optional<std::string> observed;
    bool success = false;
    std::string failure;
};

struct EvalResult {
    std::string application;
    std::string split;
    std::string attack;  ///< "none" for the no-attack baseline
    std::vector<ScenarioRecord> records;
    std::size_t successes = 0;
    std::size_t n_t = 0;
    double asr = 0.0;
    double stderr_ = 0.0;  ///< binomial standard error sqrt(p(1-p)/n)
};

inline std::string describe(const AttackParams& pi) {
    const auto rgb = [](Rgb c) {
        return "(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b) + ")";
    };
    return "vp=\"" + pi.sign.text + "\" letter=" + rgb(pi.sign.letter_color) + " background=" +
           rgb(pi.sign.background_color);
}

inline EvalResult summarize(std::vector<ScenarioRecord> records, std::string application, std::string split,
                            std::string attack) {
    EvalResult r{std::move(application), std::move(split), std::move(attack), std::move(records), 0, 0, 0.0, 0.0};
    r.n_t = r.records.size();
    for (const auto& rec : r.records) {
        r.successes += rec.success ? 1 : 0;
    }
    if (r.n_t > 0) {
        r.asr = static_cast<double>(r.successes) / static_cast<double>(r.n_t);
        r.stderr_ = std::sqrt(r.asr * (1.0 - r.asr) / static_cast<double>(r.n_t));
    }
    return r;
}

/// Attack success rate of `pi` (or of the untouched images when pi is empty).
/// Oracle failures count as non-success and are recorded with their reason.
inline EvalResult compute_asr(const std::optional<AttackParams>& pi, const std::vector<Scenario>& scenarios,
                              const AttackContext& ctx, std::string application = "campaign") {
    if (scenarios.empty()) {
        throw ConfigError("compute_asr needs at least one scenario");
    }
    if (pi) {
        pi->validate(ctx.dictionary);
    }
    std::string split(to_string(scenarios.front().split));
    for (const auto& s : scenarios) {
        if (to_string(s.split) != split) {
            split = "mixed";
        }
    }
    std::vector<ScenarioRecord> records;
    for (auto& o : evaluate_all(ctx, scenarios, pi, /*tolerate_failures=*/true)) {
        records.push_back({o.scenario_id, o.observed ? std::optional(o.observed->value) : std::nullopt, o.success,
                           o.failure});
    }
    return summarize(std::move(records), std::move(application), std::move(split), pi ? describe(*pi) : "none");
}

// ---------------------------------------------------------------------------
// Benign labeling by repeated runs
// ---------------------------------------------------------------------------

struct BenignLabelReport {
    std::string scenario_id;
    std::vector<std::pair<std::string, int>> histogram;  ///< first-observed order
    std::string mode;
    int runs = 0;
    int failures = 0;  ///< refused, failed or unlabeled runs
};

/// Queries the unmodified image `runs` times; the mode breaks ties by the
/// earliest-observed label.
inline BenignLabelReport benign_label(const Scenario& scenario, Oracle& oracle, const TargetPrompt& prompt,
                                      const LabelSpace& space, int runs = 11) {
    if (runs < 1) {
        throw ConfigError("benign labeling needs runs >= 1");
    }
    BenignLabelReport rep{scenario.id, {}, {}, runs, 0};
    const auto request = make_request(scenario, prompt, scenario.image, std::nullopt);
    for (int i = 0; i < runs; ++i) {
        std::optional<Label> l;
        try {
            l = classify(oracle, request, space).extracted_label;
        } catch (const QueryError&) {
        }
        if (!l) {
            ++rep.failures;
            continue;
        }
        auto it = std::find_if(rep.histogram.begin(), rep.histogram.end(),
                               [&](const auto& h) { return h.first == l->value; });
        if (it == rep.histogram.end()) {
            rep.histogram.emplace_back(l->value, 1);
        } else {
            ++it->second;
        }
    }
    if (rep.histogram.empty()) {
        throw LabelingError("scenario " + scenario.id + ": all " + std::to_string(runs) + " labeling runs failed");
    }
    int best = 0;
    for (const auto& [label, count] : rep.histogram) {
        if (count > best) {
            best = count;
            rep.mode = label;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Transferability
// ---------------------------------------------------------------------------

struct TransferResult {
    EvalResult known;
    EvalResult transfer;
};

/// Applies pi, unchanged, to held-out scenarios. Refuses held-out sets that
/// contain known-split scenarios.
inline TransferResult transfer_eval(const AttackParams& pi, EvalResult known_result,
                                    const std::vector<Scenario>& heldout, const AttackContext& ctx) {
    if (heldout.empty()) {
        throw ConfigError("transfer_eval needs held-out scenarios");
    }
    for (const auto& s : heldout) {
        if (s.split == Split::known) {
            throw ContaminationError("held-out set contains known-split scenario " + s.id);
        }
    }
    if (!ctx.dictionary.contains(pi.sign.text)) {
        throw ConfigError("attack phrase '" + pi.sign.text + "' is not in the dictionary");
    }
    auto transfer = compute_asr(pi, heldout, ctx, known_result.application);
    return {std::move(known_result), std::move(transfer)};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", std::floor(fraction * 10000.0 + 0.5) / 100.0);
    return buf;
}

struct Report {
    std::string text;
    std::vector<nlohmann::json> records;

    std::string jsonl() const {
        std::string out;
        for (const auto& r : records) {
            out += r.dump() + "\n";
        }
        return out;
    }
};

inline Report render_report(const std::vector<EvalResult>& results) {
    Report rep;
    std::ostringstream os;
    os << "application\tsplit\tattack\tASR (%)\n";
    for (const auto& r : results) {
        os << r.application << "\t" << r.split << "\t" << r.attack << "\t" << format_percent(r.asr) << " \xC2\xB1 "
           << format_percent(r.stderr_) << "\n";
        rep.records.push_back({{"application", r.application},
                               {"split", r.split},
                               {"attack", r.attack},
                               {"asr", r.asr},
                               {"stderr", r.stderr_},
                               {"successes", r.successes},
                               {"n_t", r.n_t}});
    }
    rep.text = os.str();
    return rep;
}

inline nlohmann::json to_json(const ScenarioRecord& r) {
    return {{"scenario", r.scenario_id},
            {"observed", r.observed ? nlohmann::json(*r.observed) : nlohmann::json(nullptr)},
            {"success", r.success},
            {"failure", r.failure}};
}

}  // namespace vpattack
