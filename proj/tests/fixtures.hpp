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


// Small scenario fixtures shared by the test binaries.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "vpattack/objective.hpp"

namespace vpattack::fixtures {

inline LabelSpace drive_space() { return LabelSpace({"brake", "proceed"}, {{"proceed", {"go ahead"}}}); }

inline SimulatedOracleConfig drive_oracle_config() {
    SimulatedOracleConfig c;
    c.keywords = {{"proceed", {"proceed", "go"}}};
    return c;
}

/// Flat grey frame with a placement region near the top-left.
inline Scenario blank_scenario(const LabelSpace& space, std::string id = "s0", int w = 96, int h = 64,
                               Rect region = {8, 8, 48, 24}, Split split = Split::known) {
    return Scenario{std::move(id),          Image(w, h, Rgb{120, 120, 120}), region, space.label("brake"),
                    space.label("proceed"), split};
}

inline std::vector<Scenario> blank_scenarios(const LabelSpace& space, int n, Split split = Split::known,
                                             const std::string& prefix = "s") {
    std::vector<Scenario> out;
    for (int i = 0; i < n; ++i) {
        auto s = blank_scenario(space, prefix + std::to_string(i), 96, 64, {4 + i % 5, 4 + i % 3, 48, 24}, split);
        // Vary the base texture so every scenario hashes differently.
        for (int x = 0; x < s.image.width(); x += 7) {
            s.image.set(x, (x + i) % s.image.height(), Rgb{static_cast<std::uint8_t>(i * 13), 90, 60});
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "vpattack") {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace vpattack::fixtures
