// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Model gateway: one request/response shape for every pipeline role, with a
// scripted stub, a generic chat-completion HTTP backend, and an on-disk cache.

#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "dream/errors.hpp"
#include "dream/prompt.hpp"
#include "dream/text.hpp"

namespace dream {

struct Decoding {
    double temperature = 0.0;
    int max_tokens = 4096;
    std::optional<std::int64_t> seed;
};

struct ModelRequest {
    PromptRole role = PromptRole::GenerateProof;
    std::string system_text;
    std::string user_text;
    Decoding decoding;
    /// Owning proving session (usually the theorem id).  The stub uses it to
    /// resolve session-scoped script keys; remote backends ignore it.
    std::string session;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct ModelResponse {
    std::string text;
    TokenUsage usage;
    std::string backend_id;
};

inline nlohmann::json request_to_json(const ModelRequest& r) {
    nlohmann::json j{{"role", role_name(r.role)},
                     {"system", r.system_text},
                     {"user", r.user_text},
                     {"temperature", r.decoding.temperature},
                     {"max_tokens", r.decoding.max_tokens}};
    if (r.decoding.seed)
        j["seed"] = *r.decoding.seed;
    return j;
}

/// Default decoding: sampled for roles whose output should vary, greedy for
/// roles that must stay faithful to their input.
inline Decoding default_decoding(PromptRole role) {
    Decoding d;
    switch (role) {
    case PromptRole::ProposeAxioms:
    case PromptRole::ProposeStrategy:
    case PromptRole::GenerateProof:
        d.temperature = 0.7;
        break;
    default:
        d.temperature = 0.0;
        break;
    }
    return d;
}

class Backend {
public:
    virtual ~Backend() = default;
    virtual ModelResponse complete(const ModelRequest& request) = 0;
    virtual std::string id() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted stub

/// Deterministic backend driven by a JSON script.  Keys are looked up in order:
///   "<session>/<Role>:<n>"  n-th call for that role within the session
///   "<Role>:<n>"            n-th call for that role across all sessions
///   "<Role>:*"              fallback for any ordinal
/// Ordinals are 1-based.  A missing key raises ScriptExhausted.
class StubBackend : public Backend {
public:
    explicit StubBackend(nlohmann::json script, std::string id = "stub")
        : script_(std::move(script)), id_(std::move(id)) {
        if (!script_.is_object())
            throw ConfigError("stub script must be a JSON object of \"Role:ordinal\" -> text");
    }

    static std::unique_ptr<StubBackend> from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in)
            throw EnvironmentError("cannot read stub script " + path.string());
        return std::make_unique<StubBackend>(nlohmann::json::parse(in));
    }

    ModelResponse complete(const ModelRequest& request) override {
        const std::string role(role_name(request.role));
        int global_n = 0;
        int session_n = 0;
        {
            std::lock_guard lock(mutex_);
            global_n = ++global_counts_[role];
            session_n = ++session_counts_[{request.session, role}];
            requests_.push_back(request);
        }
        std::optional<std::string> text;
        if (!request.session.empty())
            text = lookup(request.session + "/" + role + ":" + std::to_string(session_n));
        if (!text)
            text = lookup(role + ":" + std::to_string(global_n));
        if (!text)
            text = lookup(role + ":*");
        if (!text)
            throw ScriptExhausted("stub script has no entry for " + role + ":" + std::to_string(global_n) +
                                  (request.session.empty() ? "" : " (session " + request.session + ")"));
        ModelResponse resp;
        resp.text = *text;
        resp.backend_id = id_;
        resp.usage.prompt_tokens = static_cast<int>(request.user_text.size() / 4);
        resp.usage.completion_tokens = static_cast<int>(text->size() / 4);
        return resp;
    }

    std::string id() const override { return id_; }

    int calls(PromptRole role) const {
        std::lock_guard lock(mutex_);
        auto it = global_counts_.find(std::string(role_name(role)));
        return it == global_counts_.end() ? 0 : it->second;
    }

    /// Every request received, in arrival order.
    std::vector<ModelRequest> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    std::optional<std::string> lookup(const std::string& key) const {
        auto it = script_.find(key);
        if (it == script_.end() || !it->is_string())
            return std::nullopt;
        return it->get<std::string>();
    }

    nlohmann::json script_;
    std::string id_;
    mutable std::mutex mutex_;
    std::map<std::string, int> global_counts_;
    std::map<std::pair<std::string, std::string>, int> session_counts_;
    std::vector<ModelRequest> requests_;
};

// ---------------------------------------------------------------------------
// Disk cache

/// Caches responses under `dir/<hash(request)>.json`.  The stored request is
/// compared on read, so a hash collision degrades to a miss.
class CachingBackend : public Backend {
public:
    CachingBackend(std::unique_ptr<Backend> inner, std::filesystem::path dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    ModelResponse complete(const ModelRequest& request) override {
        auto key_json = request_to_json(request);
        key_json["backend"] = inner_->id();
        const auto key = key_json.dump();
        const auto path = dir_ / (text::hex_digest(key) + ".json");
        {
            std::ifstream in(path);
            if (in) {
                try {
                    auto j = nlohmann::json::parse(in);
                    if (j.at("request") == key_json) {
                        ModelResponse r;
                        r.text = j.at("text").get<std::string>();
                        r.backend_id = j.value("backend_id", inner_->id());
                        r.usage.prompt_tokens = j.value("prompt_tokens", 0);
                        r.usage.completion_tokens = j.value("completion_tokens", 0);
                        return r;
                    }
                } catch (const nlohmann::json::exception&) {
                    // corrupt entry: fall through and overwrite
                }
            }
        }
        auto resp = inner_->complete(request);
        nlohmann::json entry{{"request", key_json},
                             {"text", resp.text},
                             {"backend_id", resp.backend_id},
                             {"prompt_tokens", resp.usage.prompt_tokens},
                             {"completion_tokens", resp.usage.completion_tokens}};
        auto tmp = path;
        tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
            std::ofstream out(tmp);
            out << entry.dump(2);
        }
        std::filesystem::rename(tmp, path);
        return resp;
    }

    std::string id() const override { return inner_->id(); }

private:
    std::unique_ptr<Backend> inner_;
    std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------

struct CodeBlock {
    std::string code;
    bool unfenced = false;
};

/// First fenced block labelled `lean`/`lean4` (or unlabelled when no labelled
/// block exists).  Without any fence the whole completion comes back flagged.
inline CodeBlock extract_code_block(std::string_view completion) {
    struct Fence {
        std::string label;
        std::string body;
    };
    std::vector<Fence> fences;
    std::size_t pos = 0;
    while (true) {
        auto open = completion.find("```", pos);
        if (open == std::string_view::npos)
            break;
        auto label_end = completion.find('\n', open + 3);
        if (label_end == std::string_view::npos)
            break;
        std::string label(text::trim(completion.substr(open + 3, label_end - open - 3)));
        auto close = completion.find("```", label_end + 1);
        if (close == std::string_view::npos)
            break;
        std::string body(completion.substr(label_end + 1, close - label_end - 1));
        if (!body.empty() && body.back() == '\n')
            body.pop_back();
        fences.push_back({label, body});
        pos = close + 3;
    }
    for (const auto& f : fences)
        if (f.label == "lean" || f.label == "lean4")
            return {f.body, false};
    for (const auto& f : fences)
        if (f.label.empty())
            return {f.body, false};
    return {std::string(completion), true};
}

/// Binds a backend to the prompt library and per-role decoding settings.
/// Shareable across threads when the backend is.
class Gateway {
public:
    explicit Gateway(Backend& backend, PromptLibrary prompts = {}) : backend_(&backend), prompts_(std::move(prompts)) {
        for (auto r : kAllRoles)
            decoding_[r] = default_decoding(r);
    }

    void set_decoding(PromptRole role, Decoding d) { decoding_[role] = d; }
    const Decoding& decoding(PromptRole role) const { return decoding_.at(role); }
    const PromptLibrary& prompts() const { return prompts_; }
    Backend& backend() const { return *backend_; }

    ModelRequest make_request(PromptRole role, const PromptContext& ctx, std::string session = {}) const {
        auto rendered = prompts_.render(role, ctx);
        ModelRequest req;
        req.role = role;
        req.system_text = std::move(rendered.system_text);
        req.user_text = std::move(rendered.user_text);
        req.decoding = decoding_.at(role);
        req.session = std::move(session);
        return req;
    }

    ModelResponse invoke(const ModelRequest& req) const {
        if (req.user_text.empty())
            throw InvalidArgument("model request has empty user text");
        if (req.decoding.max_tokens <= 0)
            throw InvalidArgument("model request max_tokens must be positive");
        return backend_->complete(req);
    }

    ModelResponse invoke(PromptRole role, const PromptContext& ctx, std::string session = {}) const {
        return invoke(make_request(role, ctx, std::move(session)));
    }

private:
    Backend* backend_;
    PromptLibrary prompts_;
    std::map<PromptRole, Decoding> decoding_;
};

} // namespace dream

