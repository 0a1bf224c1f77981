// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// OpenAI-style chat-completion backend over HTTP(S), with bounded retries and
// a cap on requests in flight.  Kept apart from gateway.hpp so only code that
// talks to a network pays for the HTTP client.

#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dream/errors.hpp"
#include "dream/gateway.hpp"

namespace dream {

// ---------------------------------------------------------------------------
// Remote chat-completion backend

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

struct RemoteConfig {
    std::string endpoint;                  // full URL, e.g. https://host/v1/chat/completions
    std::string model;
    std::string api_key_env;               // name of the env var holding the credential
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    std::string response_pointer = "/choices/0/message/content";
    RetryPolicy retry;
    int max_in_flight = 4;
    std::chrono::seconds timeout{300};
    nlohmann::json extra_body = nlohmann::json::object();
};

/// Transport hook so the retry logic is testable without a network.  Returns
/// (status, body); status < 0 means the connection itself failed.
using HttpPost = std::function<std::pair<int, std::string>(const std::string& url,
                                                          const std::map<std::string, std::string>& headers,
                                                          const std::string& body)>;


inline HttpPost default_http_post(std::chrono::seconds timeout) {
    return [timeout](const std::string& url, const std::map<std::string, std::string>& headers,
                     const std::string& body) -> std::pair<int, std::string> {
        // split "scheme://host[:port]" from the request path
        auto scheme_end = url.find("://");
        auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
        try {
            httplib::Client cli(origin);
            cli.set_connection_timeout(std::chrono::seconds(10));
            cli.set_read_timeout(timeout);
            cli.set_write_timeout(timeout);
            httplib::Headers h;
            for (const auto& [k, v] : headers)
                if (k != "Content-Type")
                    h.emplace(k, v);
            auto res = cli.Post(path, h, body, "application/json");
            if (!res)
                return {-1, httplib::to_string(res.error())};
            return {res->status, res->body};
        } catch (const std::exception& e) {
            return {-1, e.what()};
        }
    };
}

class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig cfg, HttpPost post = {})
        : cfg_(std::move(cfg)), post_(post ? std::move(post) : default_http_post(cfg_.timeout)),
          in_flight_(std::max(1, cfg_.max_in_flight)) {
        if (cfg_.endpoint.empty())
            throw ConfigError("remote backend requires an endpoint URL");
    }

    ModelResponse complete(const ModelRequest& request) override {
        nlohmann::json body = cfg_.extra_body.is_object() ? cfg_.extra_body : nlohmann::json::object();
        if (!cfg_.model.empty())
            body["model"] = cfg_.model;
        body["messages"] = nlohmann::json::array();
        if (!request.system_text.empty())
            body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
        body["messages"].push_back({{"role", "user"}, {"content", request.user_text}});
        body["temperature"] = request.decoding.temperature;
        body["max_tokens"] = request.decoding.max_tokens;
        if (request.decoding.seed)
            body["seed"] = *request.decoding.seed;

        std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
        if (!cfg_.api_key_env.empty()) {
            const char* key = std::getenv(cfg_.api_key_env.c_str());
            if (!key || !*key)
                throw BackendUnavailable("credential environment variable " + cfg_.api_key_env + " is not set");
            headers[cfg_.auth_header] = cfg_.auth_prefix + key;
        }

        const std::string payload = body.dump();
        auto backoff = cfg_.retry.initial_backoff;
        std::string last_error;
        for (int attempt = 0; attempt <= cfg_.retry.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(backoff);
                backoff = std::chrono::milliseconds(
                    static_cast<std::int64_t>(static_cast<double>(backoff.count()) * cfg_.retry.multiplier));
            }
            std::pair<int, std::string> result;
            {
                in_flight_.acquire();
                struct Release {
                    std::counting_semaphore<>& s;
                    ~Release() { s.release(); }
                } release{in_flight_};
                result = post_(cfg_.endpoint, headers, payload);
            }
            auto [status, text] = result;
            if (status < 0 || status == 408 || status == 429 || status >= 500) {
                last_error = status < 0 ? "connection failed: " + text : "HTTP " + std::to_string(status);
                continue;
            }
            if (status != 200)
                throw BackendError("remote backend returned HTTP " + std::to_string(status) + ": " + text);
            return parse_response(text);
        }
        throw BackendUnavailable("remote backend unavailable after " + std::to_string(cfg_.retry.max_retries) +
                                 " retries (" + last_error + ")");
    }

    std::string id() const override { return "remote:" + (cfg_.model.empty() ? cfg_.endpoint : cfg_.model); }

private:
    ModelResponse parse_response(const std::string& body) const {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("remote backend returned invalid JSON: ") + e.what());
        }
        nlohmann::json::json_pointer ptr(cfg_.response_pointer);
        if (!j.contains(ptr) || !j.at(ptr).is_string())
            throw BackendError("remote response has no text at " + cfg_.response_pointer);
        ModelResponse resp;
        resp.text = j.at(ptr).get<std::string>();
        resp.backend_id = id();
        if (j.contains("usage") && j["usage"].is_object()) {
            resp.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
            resp.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
        }
        if (resp.text.empty())
            throw BackendError("remote backend returned an empty completion (refusal or error)");
        return resp;
    }

    RemoteConfig cfg_;
    HttpPost post_;
    std::counting_semaphore<> in_flight_;
};

} // namespace dream
