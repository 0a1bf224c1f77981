// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// JSON run configuration: named backends and verifiers plus the schedule,
// feedback, decoding and dataset settings.  Relative paths resolve against
// the configuration file's directory.
//
//   {
//     "backend": "stub", "verifier": "mock",
//     "backends":  { "stub": {"type": "stub", "script": "script.json"},
//                    "api":  {"type": "remote", "endpoint": "https://...", "model": "...",
//                             "api_key_env": "DREAM_API_KEY", "cache_dir": ".cache"} },
//     "verifiers": { "mock": {"type": "mock", "rules": "rules.json"},
//                    "lean": {"type": "lean", "project_root": "lean", "timeout_s": 120} },
//     "schedule":  { "max_revisions": 10, "diversify_at": [4, 7], "k": 2, "m_min": 3, "m_max": 5,
//                    "selection": "lexicographic", "seed": 0, "wall_budget_s": 1800 },
//     "feedback":  { "comment_prefix": "-- [DREAM]", "history_budget_chars": 49152 },
//     "decoding":  { "GenerateProof": {"temperature": 0.7, "max_tokens": 4096} },
//     "dataset":   { "imports": ["import Mathlib"], "max_attempts": 60 },
//     "prompt_dir": "prompts",
//     "strip_axioms": false
//   }

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/gateway.hpp"
#include "dream/remote.hpp"
#include "dream/orchestrator.hpp"
#include "dream/prompt.hpp"
#include "dream/verifier.hpp"

namespace dream {

class Config {
public:
    Config() : j_(nlohmann::json::object()) {}
    Config(nlohmann::json j, std::filesystem::path base_dir) : j_(std::move(j)), base_(std::move(base_dir)) {
        if (!j_.is_object())
            throw ConfigError("configuration must be a JSON object");
        schedule(); // fail early on malformed schedules
    }

    static Config load(const std::filesystem::path& p) {
        try {
            return Config(nlohmann::json::parse(read_text_file(p)), p.parent_path());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config " + p.string() + " is not valid JSON: " + e.what());
        }
    }

    const nlohmann::json& json() const { return j_; }

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() || base_.empty() ? path : base_ / path;
    }

    std::string default_backend() const { return j_.value("backend", std::string()); }
    std::string default_verifier() const { return j_.value("verifier", std::string()); }

    ScheduleConfig schedule() const {
        ScheduleConfig s;
        try {
            auto sj = j_.value("schedule", nlohmann::json::object());
            s.max_revisions = sj.value("max_revisions", s.max_revisions);
            if (sj.contains("diversify_at"))
                s.diversify_at = sj.at("diversify_at").get<std::set<int>>();
            s.k = sj.value("k", s.k);
            s.m_min = sj.value("m_min", s.m_min);
            s.m_max = sj.value("m_max", s.m_max);
            auto sel = sj.value("selection", std::string("lexicographic"));
            if (sel == "lexicographic")
                s.selection = LeafSelection::Lexicographic;
            else if (sel == "random")
                s.selection = LeafSelection::Random;
            else
                throw ConfigError("schedule.selection must be lexicographic or random");
            s.seed = sj.value("seed", s.seed);
            s.wall_budget = std::chrono::seconds(sj.value("wall_budget_s", s.wall_budget.count()));
            auto fj = j_.value("feedback", nlohmann::json::object());
            s.comment_prefix = fj.value("comment_prefix", s.comment_prefix);
            s.history_budget_chars = fj.value("history_budget_chars", s.history_budget_chars);
            s.validate();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad schedule settings: ") + e.what());
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("bad schedule settings: ") + e.what());
        }
        return s;
    }

    bool strip_axioms() const { return j_.value("strip_axioms", false); }

    std::vector<std::string> dataset_imports() const {
        auto d = j_.value("dataset", nlohmann::json::object());
        return d.value("imports", std::vector<std::string>{"import Mathlib"});
    }

    int max_attempts() const {
        auto d = j_.value("dataset", nlohmann::json::object());
        return d.value("max_attempts", kDefaultTranslationAttempts);
    }

    PromptLibrary prompts() const {
        if (auto p = j_.value("prompt_dir", std::string()); !p.empty())
            return PromptLibrary::from_directory(resolve(p));
        return {};
    }

    /// Owns the backend chain; the gateway refers into it.
    struct GatewayBundle {
        std::vector<std::unique_ptr<Backend>> backends;
        std::unique_ptr<Gateway> gateway;
    };

    GatewayBundle make_gateway(std::string name = {}) const {
        if (name.empty())
            name = default_backend();
        const auto& spec = section("backends", name);
        GatewayBundle b;
        try {
            auto type = spec.at("type").get<std::string>();
            if (type == "stub") {
                if (spec.contains("script") && spec.at("script").is_string())
                    b.backends.push_back(StubBackend::from_file(resolve(spec.at("script").get<std::string>())));
                else
                    b.backends.push_back(std::make_unique<StubBackend>(spec.value("entries", nlohmann::json::object())));
            } else if (type == "remote") {
                RemoteConfig rc;
                rc.endpoint = spec.at("endpoint").get<std::string>();
                rc.model = spec.at("model").get<std::string>();
                rc.api_key_env = spec.value("api_key_env", rc.api_key_env);
                rc.auth_header = spec.value("auth_header", rc.auth_header);
                rc.auth_prefix = spec.value("auth_prefix", rc.auth_prefix);
                rc.response_pointer = spec.value("response_pointer", rc.response_pointer);
                rc.max_in_flight = spec.value("max_in_flight", rc.max_in_flight);
                rc.timeout = std::chrono::seconds(spec.value("timeout_s", rc.timeout.count()));
                rc.retry.max_retries = spec.value("max_retries", rc.retry.max_retries);
                rc.retry.initial_backoff =
                    std::chrono::milliseconds(spec.value("initial_backoff_ms", rc.retry.initial_backoff.count()));
                rc.extra_body = spec.value("extra_body", nlohmann::json::object());
                b.backends.push_back(std::make_unique<RemoteBackend>(rc));
            } else {
                throw ConfigError("backend '" + name + "' has unknown type '" + type + "'");
            }
            if (auto dir = spec.value("cache_dir", std::string()); !dir.empty()) {
                auto inner = std::move(b.backends.back());
                b.backends.back() = std::make_unique<CachingBackend>(std::move(inner), resolve(dir));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("backend '" + name + "': " + e.what());
        }
        b.gateway = std::make_unique<Gateway>(*b.backends.back(), prompts());
        apply_decoding(*b.gateway);
        return b;
    }

    std::unique_ptr<Verifier> make_verifier(std::string name = {}) const {
        if (name.empty())
            name = default_verifier();
        const auto& spec = section("verifiers", name);
        try {
            CheckerConfig cc;
            if (spec.contains("command"))
                cc.command = spec.at("command").get<std::vector<std::string>>();
            if (auto p = spec.value("project_root", std::string()); !p.empty())
                cc.project_root = resolve(p);
            if (auto p = spec.value("scratch_root", std::string()); !p.empty())
                cc.scratch_root = resolve(p);
            cc.timeout = std::chrono::seconds(spec.value("timeout_s", cc.timeout.count()));
            cc.keep_artifacts = spec.value("keep_artifacts", cc.keep_artifacts);
            cc.raw_output_cap = spec.value("raw_output_cap", cc.raw_output_cap);
            cc.placeholders = spec.value("placeholders", cc.placeholders);
            cc.extra_imports = spec.value("extra_imports", cc.extra_imports);
            cc.max_parallel = spec.value("max_parallel", cc.max_parallel);
            auto type = spec.at("type").get<std::string>();
            if (type == "mock") {
                if (spec.contains("rules") && spec.at("rules").is_string())
                    return MockVerifier::from_file(resolve(spec.at("rules").get<std::string>()), cc);
                return std::make_unique<MockVerifier>(spec.value("rule_table", nlohmann::json::object()), cc);
            }
            if (type == "lean")
                return std::make_unique<LeanVerifier>(cc);
            throw ConfigError("verifier '" + name + "' has unknown type '" + type + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("verifier '" + name + "': " + e.what());
        }
    }

private:
    const nlohmann::json& section(const char* key, const std::string& name) const {
        if (name.empty())
            throw ConfigError(std::string("no ") + key + " entry selected (set it in the config or on the command line)");
        if (!j_.contains(key) || !j_.at(key).contains(name))
            throw ConfigError(std::string(key) + "." + name + " is not defined in the configuration");
        return j_.at(key).at(name);
    }

    void apply_decoding(Gateway& g) const {
        auto dj = j_.value("decoding", nlohmann::json::object());
        for (auto it = dj.begin(); it != dj.end(); ++it) {
            auto role = role_from_name(it.key());
            if (!role)
                throw ConfigError("decoding: unknown role '" + it.key() + "'");
            Decoding d = g.decoding(*role);
            d.temperature = it->value("temperature", d.temperature);
            d.max_tokens = it->value("max_tokens", d.max_tokens);
            if (it->contains("seed"))
                d.seed = it->at("seed").get<std::uint64_t>();
            g.set_decoding(*role, d);
        }
    }

    nlohmann::json j_;
    std::filesystem::path base_;
};

} // namespace dream
