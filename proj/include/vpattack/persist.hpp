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

// On-disk artifacts: scenario manifests (JSON lines), the dictionary (tab
// separated), attack parameters (JSON) and optimizer traces (JSON lines).

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpattack/attack_space.hpp"
#include "vpattack/ceopt.hpp"
#include "vpattack/dictionary.hpp"
#include "vpattack/image_io.hpp"

namespace vpattack::persist {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario manifests
// ---------------------------------------------------------------------------

struct ManifestRecord {
    std::string id;
    std::string image;  ///< path relative to the manifest directory
    Rect region;
    std::string benign;
    std::string target;
    Split split = Split::known;
};

inline json to_json(const ManifestRecord& r) {
    return {{"id", r.id},          {"image", r.image},   {"x", r.region.x},   {"y", r.region.y},
            {"w", r.region.w},     {"h", r.region.h},    {"benign", r.benign}, {"target", r.target},
            {"split", std::string(to_string(r.split))}};
}

inline void write_manifest(const fs::path& path, const std::vector<ManifestRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump() + "\n";
    }
    io::write_text(path, out);
}

inline std::vector<ManifestRecord> read_manifest_records(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario manifest " + path.string());
    }
    std::vector<ManifestRecord> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (canonicalize(line).empty()) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            out.push_back({j.at("id").get<std::string>(), j.at("image").get<std::string>(),
                           {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()},
                           j.at("benign").get<std::string>(), j.at("target").get<std::string>(),
                           parse_split(j.at("split").get<std::string>())});
        } catch (const json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Scenario> load_manifest(const fs::path& path, const LabelSpace& space) {
    std::vector<Scenario> out;
    for (const auto& r : read_manifest_records(path)) {
        Scenario s{r.id, io::load_image(path.parent_path() / r.image), r.region, space.label(r.benign),
                   space.label(r.target), r.split};
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dictionary
// ---------------------------------------------------------------------------

inline std::string dictionary_tsv(const Dictionary& d) {
    std::ostringstream os;
    os << "# phrase\tscore\tround\n";
    for (const auto& e : d.entries()) {
        os << e.phrase << "\t" << json(e.score).dump() << "\t" << e.round << "\n";
    }
    return os.str();
}

inline Dictionary parse_dictionary(const std::string& text) {
    Dictionary d;
    std::istringstream in(text);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw ConfigError("dictionary line " + std::to_string(n) + ": expected phrase<TAB>score<TAB>round");
        }
        try {
            if (!d.insert({line.substr(0, t1), std::stod(line.substr(t1 + 1, t2 - t1 - 1)),
                           std::stoi(line.substr(t2 + 1))})) {
                throw ConfigError("dictionary line " + std::to_string(n) + ": duplicate phrase");
            }
        } catch (const std::logic_error&) {
            throw ConfigError("dictionary line " + std::to_string(n) + ": malformed number");
        }
    }
    return d;
}

inline void save_dictionary(const fs::path& path, const Dictionary& d) { io::write_text(path, dictionary_tsv(d)); }

inline Dictionary load_dictionary(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("dictionary " + path.string() + " not found; run the dict command first");
    }
    return parse_dictionary(io::read_text(path));
}

// ---------------------------------------------------------------------------
// Attack parameters
// ---------------------------------------------------------------------------

inline json rgb_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

inline Rgb rgb_from(const json& j) {
    const auto ch = [&](std::size_t i) {
        const int v = j.at(i).get<int>();
        if (v < 0 || v > 255) {
            throw ConfigError("color channel out of range");
        }
        return static_cast<std::uint8_t>(v);
    };
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("color must be [r, g, b]");
    }
    return {ch(0), ch(1), ch(2)};
}

inline json to_json(const AttackParams& pi) {
    return {{"vp_index", pi.vp_index},
            {"text", pi.sign.text},
            {"letter_color", rgb_json(pi.sign.letter_color)},
            {"background_color", rgb_json(pi.sign.background_color)},
            {"font_scale", pi.sign.font_scale},
            {"padding", pi.sign.padding},
            {"placement",
             {{"scale", pi.placement.scale},
              {"rotation", pi.placement.rotation},
              {"tx", pi.placement.tx},
              {"ty", pi.placement.ty}}},
            {"blend_weight", pi.blend_weight}};
}

inline AttackParams attack_from_json(const json& j) {
    try {
        AttackParams pi;
        pi.vp_index = j.at("vp_index").get<std::size_t>();
        pi.sign.text = j.at("text").get<std::string>();
        pi.sign.letter_color = rgb_from(j.at("letter_color"));
        pi.sign.background_color = rgb_from(j.at("background_color"));
        pi.sign.font_scale = j.value("font_scale", 1);
        pi.sign.padding = j.value("padding", 3);
        const auto& p = j.at("placement");
        pi.placement = {p.value("scale", 1.0), p.value("rotation", 0.0), p.value("tx", 0.0), p.value("ty", 0.0)};
        pi.blend_weight = j.value("blend_weight", 1.0);
        return pi;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed attack parameters: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Optimizer trace
// ---------------------------------------------------------------------------

inline json to_json(const ce::TraceRecord& t, const std::vector<std::string>& names) {
    json alpha = json::object();
    for (std::size_t k = 0; k < t.alpha.alpha.size(); ++k) {
        alpha[k < names.size() ? names[k] : std::to_string(k)] = t.alpha.alpha[k];
    }
    return {{"iteration", t.iteration},       {"alpha", alpha},
            {"best_point", t.best_point},     {"best_score", t.best_score},
            {"iteration_best", t.iteration_best}, {"evaluations", t.evaluations}};
}

inline std::string trace_jsonl(const std::vector<ce::TraceRecord>& trace, const std::vector<std::string>& names) {
    std::string out;
    for (const auto& t : trace) {
        out += to_json(t, names).dump() + "\n";
    }
    return out;
}

}  // namespace vpattack::persist
