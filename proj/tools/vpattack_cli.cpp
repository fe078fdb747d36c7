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


// vpattack command-line front end.

#include <iostream>

#include <CLI11.hpp>

#include "vpattack/campaign.hpp"

namespace cp = vpattack::campaign;

namespace {

int report(const cp::CommandResult& r, bool verbose) {
    std::cout << r.stdout_text;
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (verbose) {
        for (const auto& a : r.artifacts) {
            std::cerr << "wrote " << a << "\n";
        }
        std::cerr << "oracle queries: " << r.oracle_queries << ", cache hits: " << r.cache_hits << "\n";
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-box visual prompt attack toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path = "campaign.json";
    cp::Overrides ov;
    bool verbose = false;
    app.add_option("-c,--config", config_path, "Campaign configuration (JSON)");
    app.add_option("--seed", ov.seed, "Override optimizer and generation seeds");
    app.add_option("--cache-dir", ov.cache_dir, "Oracle response cache directory");
    app.add_option("--oracle", ov.oracle, "Target oracle kind")->check(CLI::IsMember({"simulated", "remote", "scripted"}));
    app.add_option("-o,--output-dir", ov.output_dir, "Directory for artifacts");
    app.add_flag("-v,--verbose", verbose, "Print artifacts and query counts");

    auto* gen = app.add_subcommand("gen-scenes", "Render synthetic scenarios and write split manifests");
    auto* dict = app.add_subcommand("dict", "Build the candidate phrase dictionary with the attacker model");
    auto* opt = app.add_subcommand("optimize", "Search sign parameters with cross-entropy");
    opt->add_option("--iterations", ov.iterations, "Override optimizer.iterations");

    std::optional<std::string> pi_path;
    auto* ev = app.add_subcommand("eval", "Baseline, known-split and transferability attack success rates");
    ev->add_option("--pi", pi_path, "Attack parameters (default: <output>/best_pi.json)");

    double dpi = 300.0, width_mm = 210.0, height_mm = 297.0;
    std::optional<std::string> out_path;
    auto* ex = app.add_subcommand("export", "Render the optimized sign at print resolution");
    ex->add_option("--pi", pi_path, "Attack parameters (default: <output>/best_pi.json)");
    ex->add_option("--dpi", dpi, "Print resolution")->capture_default_str();
    ex->add_option("--width-mm", width_mm, "Physical width")->capture_default_str();
    ex->add_option("--height-mm", height_mm, "Physical height")->capture_default_str();
    ex->add_option("--out", out_path, "Output PNG (default: <output>/sign.png)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = cp::CampaignConfig::load(config_path, ov);
        const auto opt_path = [](const std::optional<std::string>& p) -> std::optional<std::filesystem::path> {
            if (p) {
                return std::filesystem::path(*p);
            }
            return std::nullopt;
        };
        if (gen->parsed()) {
            return report(cp::cmd_gen_scenes(cfg), verbose);
        }
        if (dict->parsed()) {
            return report(cp::cmd_dict(cfg), verbose);
        }
        if (opt->parsed()) {
            return report(cp::cmd_optimize(cfg), verbose);
        }
        if (ev->parsed()) {
            return report(cp::cmd_eval(cfg, opt_path(pi_path)), verbose);
        }
        return report(cp::cmd_export(cfg, opt_path(pi_path), dpi, width_mm, height_mm, opt_path(out_path)), verbose);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cp::exit_code_for(std::current_exception());
    }
}
