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

// Campaign orchestration behind the command-line tool: configuration
// loading, the five pipeline commands, output locking and the run ledger.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpattack/attack_space.hpp"
#include "vpattack/cache.hpp"
#include "vpattack/dictgen.hpp"
#include "vpattack/eval.hpp"
#include "vpattack/image_io.hpp"
#include "vpattack/persist.hpp"
#include "vpattack/remote.hpp"
#include "vpattack/scenegen.hpp"

namespace vpattack::campaign {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kOracle = 3,
    kBudget = 4,
};

/// Thrown for commands that finished with a usable but partial artifact.
class PartialResult : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cache_dir;
    std::optional<std::string> oracle;  ///< "simulated" | "remote"
    std::optional<std::string> output_dir;
    std::optional<int> iterations;
};

class CampaignConfig {
public:
    /// `base_dir` resolves relative paths inside the config.
    CampaignConfig(json j, fs::path base_dir, const Overrides& o = {}) : j_(std::move(j)), base_(std::move(base_dir)) {
        if (o.seed) {
            j_["optimizer"]["seed"] = *o.seed;
            j_["generation"]["seed"] = *o.seed;
        }
        if (o.cache_dir) {
            j_["cache_dir"] = *o.cache_dir;
        }
        if (o.oracle) {
            j_["oracle"]["kind"] = *o.oracle;
        }
        if (o.output_dir) {
            j_["output_dir"] = *o.output_dir;
        }
        if (o.iterations) {
            j_["optimizer"]["iterations"] = *o.iterations;
        }
        validate();
    }

    static CampaignConfig load(const fs::path& path, const Overrides& o = {}) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config " + path.string());
        }
        json j;
        try {
            j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
        } catch (const json::exception& e) {
            throw ConfigError("config " + path.string() + ": " + e.what());
        }
        return {std::move(j), fs::absolute(path).parent_path(), o};
    }

    const json& raw() const noexcept { return j_; }

    /// SHA-256 of the canonical (key-sorted) JSON.
    std::string digest() const { return sha256_hex(j_.dump()); }

    std::string application() const { return j_.value("application", std::string("campaign")); }

    LabelSpace label_space() const {
        const auto& l = section("labels");
        std::map<std::string, std::vector<std::string>> syn;
        if (l.contains("synonyms")) {
            syn = l.at("synonyms").get<std::map<std::string, std::vector<std::string>>>();
        }
        return LabelSpace(l.at("space").get<std::vector<std::string>>(), syn);
    }

    TargetPrompt target_prompt() const { return TargetPrompt(j_.at("target_prompt").get<std::string>()); }

    fs::path path(const std::string& p) const {
        const fs::path q(p);
        return q.is_absolute() ? q : base_ / q;
    }
    fs::path output_dir() const { return path(j_.value("output_dir", std::string("out"))); }
    fs::path cache_dir() const {
        if (j_.contains("cache_dir") && j_["cache_dir"].is_string()) {
            return path(j_["cache_dir"].get<std::string>());
        }
        return output_dir() / "cache";
    }
    fs::path manifest(const std::string& split) const {
        const auto m = j_.value("manifests", json::object());
        if (m.contains(split)) {
            return path(m.at(split).get<std::string>());
        }
        return output_dir() / "scenes" / (split + ".jsonl");
    }

    const json& section(const char* name) const {
        if (!j_.contains(name) || !j_.at(name).is_object()) {
            throw ConfigError(std::string("config section '") + name + "' missing");
        }
        return j_.at(name);
    }
    json optional_section(const char* name) const { return j_.value(name, json::object()); }

    std::size_t workers() const {
        const auto w = optional_section("optimizer").value("workers", 0);
        return w <= 0 ? default_workers() : static_cast<std::size_t>(w);
    }

    AttackSpaceConfig attack_space() const {
        const auto r = optional_section("render");
        AttackSpaceConfig c;
        c.color_bins = optional_section("optimizer").value("color_bins", std::size_t{8});
        c.font_scale = r.value("font_scale", 1);
        c.padding = r.value("padding", 3);
        const auto p = r.value("placement", json::object());
        c.placement = {p.value("scale", 1.0), p.value("rotation", 0.0), p.value("tx", 0.0), p.value("ty", 0.0)};
        c.scales = r.value("scales", std::vector<double>{});
        c.rotations = r.value("rotations", std::vector<double>{});
        c.blend_weight = r.value("blend_weight", 1.0);
        return c;
    }

    ce::Budget budget() const {
        const auto o = optional_section("optimizer");
        ce::Budget b;
        b.max_iterations = static_cast<std::size_t>(std::max(0, o.value("iterations", 30)));
        b.n_samples = o.value("n_samples", std::size_t{20});
        b.n_elite = o.value("n_elite", std::size_t{5});
        b.seed = o.value("seed", std::uint64_t{0});
        b.update.smoothing = o.value("smoothing", 0.85);
        b.update.floor = o.value("floor", 1e-3);
        b.update.positive_shift = o.value("positive_shift", 1e-6);
        b.workers = workers();
        return b;
    }

    std::optional<std::size_t> max_queries() const {
        const auto o = optional_section("optimizer");
        if (o.contains("max_queries") && o["max_queries"].is_number_unsigned()) {
            return o["max_queries"].get<std::size_t>();
        }
        return std::nullopt;
    }

    std::optional<double> temperature() const {
        const auto o = optional_section("oracle");
        if (o.contains("temperature") && o["temperature"].is_number()) {
            return o["temperature"].get<double>();
        }
        return std::nullopt;
    }

private:
    void validate() const {
        label_space();
        target_prompt();
        const auto d = optional_section("dictionary");
        if (d.value("K", 10) < 1) {
            throw ConfigError("dictionary.K must be >= 1");
        }
        const auto o = optional_section("optimizer");
        if (o.value("n_elite", 5) >= o.value("n_samples", 20)) {
            throw ConfigError("optimizer.n_elite must be smaller than optimizer.n_samples");
        }
    }

    json j_;
    fs::path base_;
};

inline RemoteConfig remote_config(const json& r) {
    RemoteConfig c;
    c.endpoint = r.value("endpoint", std::string());
    c.model = r.value("model", std::string());
    c.api_key_env = r.value("api_key_env", c.api_key_env);
    c.retries = r.value("retries", c.retries);
    c.in_flight_limit = r.value("in_flight_limit", c.in_flight_limit);
    c.timeout_seconds = r.value("timeout_seconds", c.timeout_seconds);
    c.backoff_ms = r.value("backoff_ms", c.backoff_ms);
    c.response_pointer = r.value("response_pointer", c.response_pointer);
    if (r.contains("api_key")) {
        throw ConfigError("API keys are read from the environment only; remove 'api_key' from the config");
    }
    return c;
}

inline SimulatedOracleConfig simulated_config(const json& s) {
    SimulatedOracleConfig c;
    c.min_contrast = s.value("min_contrast", c.min_contrast);
    c.min_area_fraction = s.value("min_area_fraction", c.min_area_fraction);
    c.keywords = s.value("keywords", std::map<std::string, std::vector<std::string>>{});
    c.sentence_prefix = s.value("sentence_prefix", c.sentence_prefix);
    return c;
}

/// The configured target oracle, before caching.
inline std::shared_ptr<Oracle> make_target_oracle(const CampaignConfig& cfg, const LabelSpace& space) {
    const auto o = cfg.optional_section("oracle");
    const auto kind = o.value("kind", std::string("simulated"));
    if (kind == "simulated") {
        return std::make_shared<SimulatedOracle>(space, simulated_config(o.value("simulated", json::object())));
    }
    if (kind == "remote") {
        return std::make_shared<RemoteOracle>(remote_config(o.value("remote", json::object())));
    }
    if (kind == "scripted") {
        return std::make_shared<ScriptedOracle>(o.at("script").get<std::vector<std::string>>());
    }
    throw ConfigError("unknown oracle kind '" + kind + "'");
}

inline std::unique_ptr<LanguageModel> make_attacker(const CampaignConfig& cfg) {
    const auto a = cfg.optional_section("attacker");
    const auto kind = a.value("kind", std::string("scripted"));
    if (kind == "scripted") {
        if (!a.contains("script")) {
            throw ConfigError("scripted attacker needs attacker.script");
        }
        return std::make_unique<ScriptedLanguageModel>(a.at("script").get<std::vector<std::string>>());
    }
    if (kind == "remote") {
        return std::make_unique<RemoteLanguageModel>(remote_config(a.value("remote", json::object())));
    }
    throw ConfigError("unknown attacker kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Output directory lock and ledger
// ---------------------------------------------------------------------------

class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".vpattack.lock") {
        fs::create_directories(dir);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw ConfigError("output directory " + dir.string() + " is locked by another command (" +
                              path_.string() + ")");
        }
    }
    ~OutputLock() {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

struct LedgerEntry {
    std::string command;
    std::string config_digest;
    std::size_t oracle_queries = 0;
    std::size_t cache_hits = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> artifacts;
    int exit_code = 0;
};

inline void append_ledger(const fs::path& dir, const LedgerEntry& e) {
    const json j = {{"command", e.command},         {"config_digest", e.config_digest},
                    {"oracle_queries", e.oracle_queries}, {"cache_hits", e.cache_hits},
                    {"wall_seconds", e.wall_seconds}, {"artifacts", e.artifacts},
                    {"exit_code", e.exit_code}};
    std::ofstream out(dir / "ledger.jsonl", std::ios::app);
    out << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Command plumbing
// ---------------------------------------------------------------------------

struct CommandResult {
    int exit_code = kOk;
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;
    std::string stdout_text;
    std::size_t oracle_queries = 0;
    std::size_t cache_hits = 0;
};

/// Shared state for one command invocation.
class Session {
public:
    explicit Session(const CampaignConfig& cfg)
        : cfg_(cfg), space_(cfg.label_space()), prompt_(cfg.target_prompt()) {}

    const CampaignConfig& config() const noexcept { return cfg_; }
    const LabelSpace& space() const noexcept { return space_; }
    const TargetPrompt& prompt() const noexcept { return prompt_; }

    CachedOracle& oracle() {
        if (!oracle_) {
            oracle_ = std::make_shared<CachedOracle>(make_target_oracle(cfg_, space_), cfg_.cache_dir());
        }
        return *oracle_;
    }

    std::vector<Scenario> scenarios(const std::string& split) const {
        const auto path = cfg_.manifest(split);
        if (!fs::exists(path)) {
            throw ConfigError("scenario manifest " + path.string() + " not found; run gen-scenes first");
        }
        return persist::load_manifest(path, space_);
    }

    AttackContext context(const Dictionary& d) {
        return AttackContext{d, space_, oracle(), prompt_, cfg_.workers(), cfg_.temperature()};
    }

    void fill_counts(CommandResult& r) const {
        if (oracle_) {
            r.oracle_queries = oracle_->live_queries();
            r.cache_hits = oracle_->cache_hits();
        }
    }

private:
    const CampaignConfig& cfg_;
    LabelSpace space_;
    TargetPrompt prompt_;
    std::shared_ptr<CachedOracle> oracle_;
};

/// Runs `body` under the output lock and appends a ledger record.
template <typename Body>
CommandResult run_command(const std::string& name, const CampaignConfig& cfg, Body&& body) {
    const auto out_dir = cfg.output_dir();
    OutputLock lock(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    Session session(cfg);
    CommandResult r = body(session);
    session.fill_counts(r);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    append_ledger(out_dir, {name, cfg.digest(), r.oracle_queries, r.cache_hits, dt.count(), r.artifacts, r.exit_code});
    return r;
}

// ---------------------------------------------------------------------------
// gen-scenes
// ---------------------------------------------------------------------------

inline scenegen::Mat3d mat3(const json& j, const scenegen::Mat3d& fallback) {
    if (j.is_null()) {
        return fallback;
    }
    scenegen::Mat3d m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

inline scenegen::Vec3 vec3(const json& j, const scenegen::Vec3& fallback) {
    if (j.is_null()) {
        return fallback;
    }
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline scenegen::SceneSpec scene_spec(const json& g) {
    const auto s = g.value("scene", json::object());
    const auto benign = s.value("benign_label", std::string());
    const auto target = s.value("target_label", std::string());
    scenegen::SceneSpec spec = scenegen::landing_scene(benign, target);
    spec.application = s.value("application", spec.application);
    if (s.contains("primitives")) {
        spec.primitives.clear();
        for (const auto& p : s.at("primitives")) {
            spec.primitives.push_back({p.value("name", std::string()), p.at("x").get<double>(), p.at("y").get<double>(),
                                       p.at("w").get<double>(), p.at("h").get<double>(),
                                       persist::rgb_from(p.value("color", json::array({128, 128, 128}))),
                                       p.value("attack_surface", false), p.value("crowded", false)});
        }
    }
    if (s.contains("ground")) {
        spec.ground = persist::rgb_from(s.at("ground"));
    }
    const auto cam = s.value("camera", json::object());
    spec.camera.width = cam.value("width", spec.camera.width);
    spec.camera.height = cam.value("height", spec.camera.height);
    spec.camera.pixels_per_meter = cam.value("pixels_per_meter", spec.camera.pixels_per_meter);
    spec.camera.reference_altitude = cam.value("reference_altitude", spec.camera.reference_altitude);
    spec.crowd_dots = s.value("crowd_dots", spec.crowd_dots);
    if (s.contains("crowd_color")) {
        spec.crowd_color = persist::rgb_from(s.at("crowd_color"));
    }
    spec.noise_amplitude = s.value("noise_amplitude", spec.noise_amplitude);
    return spec;
}

inline CommandResult cmd_gen_scenes(const CampaignConfig& cfg) {
    return run_command("gen-scenes", cfg, [&](Session& session) {
        const auto g = cfg.section("generation");
        const int poses = g.value("poses", 20);
        if (poses < 1) {
            throw ConfigError("generation.poses must be >= 1");
        }
        const double ratio = g.value("known_ratio", 0.8);
        if (!(ratio >= 0.0 && ratio <= 1.0)) {
            throw ConfigError("generation.known_ratio must lie in [0, 1]");
        }
        const auto seed = g.value("seed", std::uint64_t{0});
        const auto spec = scene_spec(g);

        const auto t = g.value("trajectory", json::object());
        scenegen::TrajectoryModel model;
        model.A = mat3(t.value("A", json()), scenegen::Mat3d::Identity());
        model.B = mat3(t.value("B", json()), scenegen::Mat3d::Zero());
        model.x0 = vec3(t.value("x0", json()), {0.0, 0.0, spec.camera.reference_altitude});
        model.steps = poses;
        if (t.contains("inputs")) {
            if (!t["inputs"].is_array()) {
                throw ConfigError("generation.trajectory.inputs must be a list of [x, y, z]");
            }
            std::vector<scenegen::Vec3> inputs;
            for (const auto& u : t["inputs"]) {
                inputs.push_back(vec3(u, scenegen::Vec3::Zero()));
            }
            model.inputs = std::move(inputs);
        }
        const auto n = g.value("noise", json::object());
        scenegen::NoiseModel noise;
        noise.mu = vec3(n.value("mu", json()), scenegen::Vec3::Zero());
        noise.sigma = mat3(n.value("sigma", json()), scenegen::Vec3(16.0, 16.0, 9.0).asDiagonal());
        const auto tilt_std = vec3(g.value("tilt_std", json()), {0.03, 0.03, 0.05});
        const auto trajectory = scenegen::simulate_trajectory(model, noise, seed, tilt_std);

        // Seeded permutation decides which poses are held out.
        std::vector<std::size_t> order(static_cast<std::size_t>(poses));
        std::iota(order.begin(), order.end(), 0);
        auto rng = ce::detail::stream(seed, 5, 0);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[ce::detail::below(rng, i)]);
        }
        const auto n_known = static_cast<std::size_t>(std::lround(ratio * poses));
        std::vector<Split> split_of(order.size(), Split::transferability);
        for (std::size_t i = 0; i < n_known; ++i) {
            split_of[order[i]] = Split::known;
        }

        const int benign_runs = g.value("benign_runs", 0);
        const auto scene_dir = cfg.output_dir() / "scenes";
        fs::create_directories(scene_dir / "images");
        std::vector<persist::ManifestRecord> known, transfer;
        CommandResult r;
        for (std::size_t i = 0; i < trajectory.size(); ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "scene-%03zu", i);
            auto gen = scenegen::generate_synthetic_scene(spec, trajectory[i], seed + i, session.space(), id);
            if (gen.clamped) {
                r.warnings.push_back(std::string(id) + ": attack surface left the frame; pose re-centred");
            }
            auto& sc = gen.scenario;
            sc.split = split_of[i];
            if (benign_runs > 0) {
                const auto rep = benign_label(sc, session.oracle(), session.prompt(), session.space(), benign_runs);
                if (rep.mode == sc.target_label.value) {
                    r.warnings.push_back(std::string(id) + ": benign output already equals the target; skipped");
                    continue;
                }
                sc.benign_label = session.space().label(rep.mode);
            }
            const auto rel = fs::path("images") / (std::string(id) + ".png");
            io::save_image(scene_dir / rel, sc.image);
            (sc.split == Split::known ? known : transfer)
                .push_back({sc.id, rel.string(), sc.placement_region, sc.benign_label.value, sc.target_label.value,
                            sc.split});
        }
        const auto known_path = scene_dir / "known.jsonl";
        const auto transfer_path = scene_dir / "transferability.jsonl";
        persist::write_manifest(known_path, known);
        persist::write_manifest(transfer_path, transfer);
        r.artifacts = {known_path.string(), transfer_path.string()};
        r.stdout_text = "generated " + std::to_string(known.size()) + " known + " + std::to_string(transfer.size()) +
                        " transferability scenarios\n";
        return r;
    });
}

// ---------------------------------------------------------------------------
// dict
// ---------------------------------------------------------------------------

inline CommandResult cmd_dict(const CampaignConfig& cfg) {
    return run_command("dict", cfg, [&](Session& session) {
        const auto d = cfg.optional_section("dictionary");
        const auto training = session.scenarios("known");
        const auto K = d.value("K", std::size_t{10});

        auto meta = build_initial_meta_prompt(d.value("task_summary", std::string()),
                                              d.value("vehicle_characteristics", std::string()), session.prompt(),
                                              d.value("objective", std::string()),
                                              d.value("capabilities", std::string()), d.value("max_words", 3));
        if (d.contains("template_file")) {
            meta.template_text = io::read_text(cfg.path(d.at("template_file").get<std::string>()));
        }
        const Dictionary placeholder({DictionaryEntry{"x", 0.0, 0}});
        const AttackSpace naive_space(placeholder, cfg.attack_space());
        DictGenConfig gc{std::move(meta), d.value("proposal_budget", std::size_t{0}), naive_space.naive(0)};

        auto attacker = make_attacker(cfg);
        const Dictionary none;
        auto result = generate_dictionary(K, training, *attacker, session.context(none), std::move(gc));

        const auto path = cfg.output_dir() / "dictionary.tsv";
        persist::save_dictionary(path, result.dictionary);
        CommandResult r;
        r.artifacts = {path.string()};
        r.warnings = result.warnings;
        r.exit_code = result.budget_exhausted ? kBudget : kOk;
        r.stdout_text = "dictionary: " + std::to_string(result.dictionary.size()) + " of " + std::to_string(K) +
                        " phrases after " + std::to_string(result.proposals) + " proposals\n";
        return r;
    });
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

inline CommandResult cmd_optimize(const CampaignConfig& cfg) {
    return run_command("optimize", cfg, [&](Session& session) {
        auto budget = cfg.budget();
        budget.validate();
        const auto dictionary = persist::load_dictionary(cfg.output_dir() / "dictionary.tsv");
        const auto known = session.scenarios("known");
        if (known.empty()) {
            throw ConfigError("known manifest has no scenarios");
        }
        if (const auto q = cfg.max_queries()) {
            budget.max_evaluations = *q / known.size();
        }
        const AttackSpace space(dictionary, cfg.attack_space());
        const auto result = optimize_attack(space, known, session.context(dictionary), budget);

        json pi = persist::to_json(result.best_pi);
        pi["score"] = result.best_score;
        pi["n"] = known.size();
        pi["iterations"] = result.raw.trace.size();
        pi["truncated"] = result.raw.truncated;
        const auto pi_path = cfg.output_dir() / "best_pi.json";
        const auto trace_path = cfg.output_dir() / "trace.jsonl";
        io::write_text(pi_path, pi.dump(2) + "\n");
        io::write_text(trace_path, persist::trace_jsonl(result.raw.trace, space.coordinate_names()));

        CommandResult r;
        r.artifacts = {pi_path.string(), trace_path.string()};
        r.exit_code = result.raw.truncated ? kBudget : kOk;
        if (result.raw.truncated) {
            r.warnings.push_back("query budget exhausted; best-so-far parameters written");
        }
        r.stdout_text = "best score " + std::to_string(result.best_score) + "/" + std::to_string(known.size()) +
                        " after " + std::to_string(result.raw.trace.size()) + " iteration(s): " +
                        describe(result.best_pi) + "\n";
        return r;
    });
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline AttackParams load_pi(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("attack parameters " + path.string() + " not found; run optimize first");
    }
    try {
        return persist::attack_from_json(json::parse(io::read_text(path)));
    } catch (const json::exception& e) {
        throw ConfigError("attack parameters " + path.string() + ": " + e.what());
    }
}

inline CommandResult cmd_eval(const CampaignConfig& cfg, const std::optional<fs::path>& pi_path = {}) {
    return run_command("eval", cfg, [&](Session& session) {
        const auto pi = load_pi(pi_path ? *pi_path : cfg.output_dir() / "best_pi.json");
        const auto dictionary = persist::load_dictionary(cfg.output_dir() / "dictionary.tsv");
        const auto known = session.scenarios("known");
        const auto heldout = session.scenarios("transferability");
        for (const auto& s : known) {
            if (s.split != Split::known) {
                throw ContaminationError("known manifest contains held-out scenario " + s.id);
            }
            for (const auto& h : heldout) {
                if (h.id == s.id) {
                    throw ContaminationError("scenario " + s.id + " appears in both splits");
                }
            }
        }
        const auto ctx = session.context(dictionary);
        const auto app = cfg.application();

        std::vector<Scenario> all = known;
        all.insert(all.end(), heldout.begin(), heldout.end());
        auto baseline = compute_asr(std::nullopt, all, ctx, app);
        baseline.split = "all";
        auto known_result = compute_asr(pi, known, ctx, app);
        auto paired = transfer_eval(pi, std::move(known_result), heldout, ctx);

        const std::vector<EvalResult> rows{baseline, paired.known, paired.transfer};
        const auto report = render_report(rows);

        std::string records;
        for (const auto& row : rows) {
            for (const auto& rec : row.records) {
                auto j = to_json(rec);
                j["split"] = row.split;
                j["attack"] = row.attack;
                records += j.dump() + "\n";
            }
        }
        const auto out = cfg.output_dir();
        io::write_text(out / "eval_records.jsonl", records);
        io::write_text(out / "report.txt", report.text);
        io::write_text(out / "report.jsonl", report.jsonl());

        CommandResult r;
        r.artifacts = {(out / "eval_records.jsonl").string(), (out / "report.txt").string(),
                       (out / "report.jsonl").string()};
        r.stdout_text = report.text;
        return r;
    });
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

/// Physical size to pixels: round(mm * dpi / 25.4).
inline std::pair<int, int> print_pixels(double width_mm, double height_mm, double dpi) {
    if (!(dpi > 0.0) || !(width_mm > 0.0) || !(height_mm > 0.0)) {
        throw ConfigError("export size and dpi must be positive");
    }
    return {static_cast<int>(std::lround(width_mm * dpi / 25.4)), static_cast<int>(std::lround(height_mm * dpi / 25.4))};
}

/// The sign alone, text scaled to the largest integer factor that fits.
inline Image render_printable(const AttackParams& pi, int width_px, int height_px) {
    SignSpec spec = pi.sign;
    const int cols = static_cast<int>(spec.text.size()) * font::kGlyphWidth + 2 * spec.padding;
    const int rows = font::kGlyphHeight + 2 * spec.padding;
    spec.font_scale = std::min(width_px / cols, height_px / rows);
    if (spec.font_scale < 1) {
        throw ConfigError("export canvas too small for the sign text");
    }
    return rasterize_sign(spec, width_px, height_px).first;
}

inline CommandResult cmd_export(const CampaignConfig& cfg, const std::optional<fs::path>& pi_path, double dpi,
                                double width_mm, double height_mm, const std::optional<fs::path>& out_path = {}) {
    return run_command("export", cfg, [&](Session&) {
        const auto [w, h] = print_pixels(width_mm, height_mm, dpi);
        const auto pi = load_pi(pi_path ? *pi_path : cfg.output_dir() / "best_pi.json");
        const auto path = out_path ? *out_path : cfg.output_dir() / "sign.png";
        io::save_image(path, render_printable(pi, w, h));
        CommandResult r;
        r.artifacts = {path.string()};
        r.stdout_text = "wrote " + std::to_string(w) + "x" + std::to_string(h) + " sign to " + path.string() + "\n";
        return r;
    });
}

/// Maps an exception escaping a command to its exit code.
inline int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const BudgetError&) {
        return kBudget;
    } catch (const QueryError&) {
        return kOracle;
    } catch (const ConfigError&) {
        return kValidation;
    } catch (const InvalidParameter&) {
        return kValidation;
    } catch (const PlacementError&) {
        return kValidation;
    } catch (const ContaminationError&) {
        return kValidation;
    } catch (const LabelingError&) {
        return kOracle;
    } catch (const nlohmann::json::exception&) {
        return kValidation;
    } catch (...) {
        return kFailure;
    }
}

}  // namespace vpattack::campaign
