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

#include <openssl/evp.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <shared_mutex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vpattack/image_io.hpp"
#include "vpattack/oracle.hpp"

namespace vpattack {

/// Incremental SHA-256 over arbitrary byte strings.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("sha256 init failed");
        }
    }
    Sha256& update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) {
            throw Error("sha256 update failed");
        }
        return *this;
    }
    Sha256& update(std::string_view s) { return update(s.data(), s.size()); }
    /// Length-prefixed field, so concatenations cannot collide.
    Sha256& field(std::string_view s) {
        const std::uint64_t n = s.size();
        update(&n, sizeof(n));
        return update(s);
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) {
            throw Error("sha256 final failed");
        }
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(kHex[md[i] >> 4]);
            out.push_back(kHex[md[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256_hex(std::string_view s) { return Sha256().update(s).hex(); }

struct CacheKey {
    std::string digest;

    static CacheKey of(const std::string& provider_id, const OracleRequest& r) {
        Sha256 h;
        h.field(provider_id).field(r.prompt.text);
        for (const auto& img : r.images) {
            h.field(std::to_string(img.width()) + "x" + std::to_string(img.height()));
            h.field(std::string_view(reinterpret_cast<const char*>(img.bytes().data()), img.bytes().size()));
        }
        h.field(r.temperature_hint ? std::to_string(*r.temperature_hint) : std::string("-"));
        // Simulator side channel; a remote provider never sees it but it still
        // distinguishes requests whose pixels happen to coincide.
        if (r.scene) {
            h.field(r.scene->benign_label.value);
            if (const auto& s = r.scene->sign) {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%d,%d,%d|%d,%d,%d|%.17g|%.17g", s->letter_color.r, s->letter_color.g,
                              s->letter_color.b, s->background_color.r, s->background_color.g,
                              s->background_color.b, s->area_fraction, s->clipped_fraction);
                h.field(s->text).field(buf);
            }
        }
        return {h.hex()};
    }
};

/// Disk-backed memoization of an oracle: one JSON file per request digest.
class CachedOracle final : public Oracle {
public:
    CachedOracle(std::shared_ptr<Oracle> inner, std::filesystem::path dir) : inner_(std::move(inner)), dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string provider_id() const override { return inner_->provider_id(); }

    OracleResponse query(const OracleRequest& request) override {
        request.validate();
        const auto key = CacheKey::of(inner_->provider_id(), request);
        const auto path = dir_ / (key.digest + ".json");
        auto& stripe = stripes_[std::hash<std::string>{}(key.digest) % stripes_.size()];
        {
            std::shared_lock lock(stripe);
            if (auto hit = load(path, key, request)) {
                ++hits_;
                return *hit;
            }
        }
        std::unique_lock lock(stripe);
        if (auto hit = load(path, key, request)) {
            ++hits_;
            return *hit;
        }
        auto response = inner_->query(request);
        ++live_;
        store(path, key, request, response);
        return response;
    }

    std::size_t live_queries() const noexcept { return live_; }
    std::size_t cache_hits() const noexcept { return hits_; }

    void clear() {
        for (auto& stripe : stripes_) {
            stripe.lock();
        }
        std::error_code ec;
        for (const auto& e : std::filesystem::directory_iterator(dir_, ec)) {
            if (e.path().extension() == ".json") {
                std::filesystem::remove(e.path(), ec);
            }
        }
        for (auto& stripe : stripes_) {
            stripe.unlock();
        }
    }

    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    static nlohmann::json fingerprint(const CacheKey& key, const OracleRequest& r, const std::string& provider) {
        nlohmann::json imgs = nlohmann::json::array();
        for (const auto& img : r.images) {
            imgs.push_back({img.width(), img.height()});
        }
        return {{"digest", key.digest}, {"provider", provider}, {"prompt_sha256", sha256_hex(r.prompt.text)},
                {"images", imgs}};
    }

    std::optional<OracleResponse> load(const std::filesystem::path& path, const CacheKey& key,
                                       const OracleRequest& r) const {
        std::ifstream in(path);
        if (!in) {
            return std::nullopt;
        }
        try {
            const auto j = nlohmann::json::parse(in);
            if (j.at("fingerprint") != fingerprint(key, r, inner_->provider_id())) {
                return std::nullopt;
            }
            const auto& resp = j.at("response");
            return OracleResponse{resp.at("raw_text").get<std::string>(), std::nullopt,
                                  resp.at("latency_ms").get<double>(), resp.at("provider_id").get<std::string>()};
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;  // corrupt entry: caller re-queries and rewrites
        }
    }

    void store(const std::filesystem::path& path, const CacheKey& key, const OracleRequest& r,
               const OracleResponse& resp) const {
        const nlohmann::json j = {
            {"fingerprint", fingerprint(key, r, inner_->provider_id())},
            {"response", {{"raw_text", resp.raw_text}, {"latency_ms", resp.latency_ms}, {"provider_id", resp.provider_id}}}};
        auto tmp = path;
        tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        io::write_text(tmp, j.dump(2) + "\n");
        std::filesystem::rename(tmp, path);
    }

    std::shared_ptr<Oracle> inner_;
    std::filesystem::path dir_;
    mutable std::array<std::shared_mutex, 64> stripes_;
    std::atomic<std::size_t> live_{0};
    std::atomic<std::size_t> hits_{0};
};

}  // namespace vpattack
