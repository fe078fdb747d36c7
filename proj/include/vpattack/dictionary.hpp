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

#include "vpattack/core.hpp"

namespace vpattack {

struct DictionaryEntry {
    std::string phrase;
    double score = 0.0;  ///< fraction of training scenarios flipped under naive rendering
    int round = 0;
};

/// Ordered candidate phrases. Phrases are unique after canonicalization.
class Dictionary {
public:
    Dictionary() = default;
    explicit Dictionary(std::vector<DictionaryEntry> entries) {
        for (auto& e : entries) {
            if (!insert(std::move(e))) {
                throw ConfigError("duplicate dictionary phrase");
            }
        }
    }

    /// Returns false (and leaves the dictionary unchanged) for a duplicate phrase.
    bool insert(DictionaryEntry e) {
        if (e.phrase.empty()) {
            throw ConfigError("dictionary phrase must not be empty");
        }
        if (e.score < 0.0 || e.score > 1.0) {
            throw ConfigError("dictionary score must lie in [0, 1]");
        }
        if (contains(e.phrase)) {
            return false;
        }
        entries_.push_back(std::move(e));
        return true;
    }

    bool contains(std::string_view phrase) const { return find(phrase).has_value(); }

    std::optional<std::size_t> find(std::string_view phrase) const {
        const auto c = canonicalize(phrase);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (canonicalize(entries_[i].phrase) == c) {
                return i;
            }
        }
        return std::nullopt;
    }

    const DictionaryEntry& at(std::size_t i) const {
        if (i >= entries_.size()) {
            throw InvalidParameter("dictionary index " + std::to_string(i) + " out of range");
        }
        return entries_[i];
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<DictionaryEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<DictionaryEntry> entries_;
};

}  // namespace vpattack
