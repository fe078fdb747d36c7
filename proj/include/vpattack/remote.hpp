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

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "vpattack/image_io.hpp"
#include "vpattack/oracle.hpp"

namespace vpattack {

/// HTTP JSON endpoint settings. The API key itself is only ever read from
/// the environment variable named here.
struct RemoteConfig {
    std::string endpoint;  ///< e.g. http://localhost:8080/v1/query
    std::string model;
    std::string api_key_env = "VPATTACK_API_KEY";
    int retries = 2;
    int in_flight_limit = 4;
    int timeout_seconds = 60;
    int backoff_ms = 200;
    std::string response_pointer = "/text";  ///< JSON pointer to the reply text
};

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

namespace detail {

class InFlightLimiter {
public:
    explicit InFlightLimiter(int limit) : free_(std::max(1, limit)) {}
    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return free_ > 0; });
        --free_;
    }
    void release() {
        {
            std::lock_guard lock(mu_);
            ++free_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int free_;
};

struct SplitUrl {
    std::string origin;  ///< scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail

/// Client for a single JSON endpoint:
///   request  {"model", "prompt", "images": [{"mime_type", "data"}], "temperature"?}
///   response object with the reply text at `response_pointer`.
class RemoteClient {
public:
    explicit RemoteClient(RemoteConfig config) : config_(std::move(config)), limiter_(config_.in_flight_limit) {
        if (config_.endpoint.empty()) {
            throw ConfigError("remote oracle endpoint not configured");
        }
        if (config_.retries < 0) {
            throw ConfigError("retries must be >= 0");
        }
        url_ = detail::split_url(config_.endpoint);
    }

    const RemoteConfig& config() const noexcept { return config_; }

    static nlohmann::json make_body(const std::string& model, const std::string& prompt,
                                    const std::vector<Image>& images, std::optional<double> temperature) {
        nlohmann::json imgs = nlohmann::json::array();
        for (const auto& img : images) {
            imgs.push_back({{"mime_type", "image/png"}, {"data", base64_encode(io::encode_png(img))}});
        }
        nlohmann::json body = {{"model", model}, {"prompt", prompt}, {"images", imgs}};
        if (temperature) {
            body["temperature"] = *temperature;
        }
        return body;
    }

    /// Posts the body and returns the reply text. Retries transport failures,
    /// 429 and 5xx; throws RefusalError on an empty reply.
    std::string post(const nlohmann::json& body) {
        limiter_.acquire();
        struct Release {
            detail::InFlightLimiter& l;
            ~Release() { l.release(); }
        } release{limiter_};

        httplib::Headers headers;
        if (!config_.api_key_env.empty()) {
            if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
                headers.emplace("Authorization", std::string("Bearer ") + key);
            }
        }
        const auto payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= config_.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * attempt));
            }
            httplib::Client client(url_.origin);
            client.set_connection_timeout(config_.timeout_seconds, 0);
            client.set_read_timeout(config_.timeout_seconds, 0);
            client.set_write_timeout(config_.timeout_seconds, 0);
            const auto res = client.Post(url_.path, headers, payload, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                throw QueryError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint, false);
            }
            std::string text;
            try {
                const auto j = nlohmann::json::parse(res->body);
                const auto ptr = nlohmann::json::json_pointer(config_.response_pointer);
                if (j.contains(ptr) && j.at(ptr).is_string()) {
                    text = j.at(ptr).get<std::string>();
                }
            } catch (const nlohmann::json::exception& e) {
                throw QueryError(std::string("malformed response: ") + e.what(), false);
            }
            if (canonicalize(text).empty()) {
                throw RefusalError("empty reply from " + config_.endpoint);
            }
            return text;
        }
        throw QueryError(last_error + " after " + std::to_string(config_.retries + 1) + " attempt(s) to " +
                             config_.endpoint,
                         true);
    }

private:
    RemoteConfig config_;
    detail::InFlightLimiter limiter_;
    detail::SplitUrl url_;
};

class RemoteOracle final : public Oracle {
public:
    explicit RemoteOracle(RemoteConfig config) : client_(std::move(config)) {}

    std::string provider_id() const override { return "remote:" + client_.config().model + "@" + client_.config().endpoint; }

    OracleResponse query(const OracleRequest& request) override {
        request.validate();
        const auto t0 = std::chrono::steady_clock::now();
        auto text = client_.post(
            RemoteClient::make_body(client_.config().model, request.prompt.text, request.images, request.temperature_hint));
        const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
        return {std::move(text), std::nullopt, dt.count(), provider_id()};
    }

private:
    RemoteClient client_;
};

class RemoteLanguageModel final : public LanguageModel {
public:
    explicit RemoteLanguageModel(RemoteConfig config) : client_(std::move(config)) {}
    std::string complete(const std::string& prompt) override {
        return client_.post(RemoteClient::make_body(client_.config().model, prompt, {}, std::nullopt));
    }

private:
    RemoteClient client_;
};

}  // namespace vpattack
