// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Proof verification.  A Verifier assembles a self-contained Lean file from a
// theorem and a candidate proof, hands it to an adapter (the real checker or a
// rule-table mock) and turns the checker output into a Verdict whose
// diagnostics are expressed in proof-local line numbers.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <regex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dream/diagnostics.hpp"
#include "dream/errors.hpp"
#include "dream/lean_source.hpp"
#include "dream/subprocess.hpp"
#include "dream/theorem.hpp"

namespace dream {

enum class VerdictStatus { Pass, Fail };

inline std::string_view status_name(VerdictStatus s) { return s == VerdictStatus::Pass ? "Pass" : "Fail"; }

/// Strict: placeholders fail the proof.  Tolerant: placeholders are allowed
/// (dataset construction, where conjectures end in `sorry` by design).
enum class PlaceholderPolicy { Strict, Tolerant };

struct Verdict {
    VerdictStatus status = VerdictStatus::Fail;
    std::vector<Diagnostic> diagnostics; // empty iff Pass
    std::vector<Diagnostic> warnings;    // non-blocking diagnostics of a passing proof
    std::vector<std::string> residual;
    std::string raw_output;
    std::size_t raw_output_bytes = 0;
    std::size_t raw_output_cap = 0;
    bool raw_output_truncated = false;
    bool timed_out = false;
    bool placeholder = false;
    std::chrono::milliseconds duration{0};

    bool passed() const noexcept { return status == VerdictStatus::Pass; }
};

inline void to_json(nlohmann::json& j, const Verdict& v) {
    j = {{"status", status_name(v.status)},
         {"diagnostics", v.diagnostics},
         {"warnings", v.warnings},
         {"residual", v.residual},
         {"raw_output", v.raw_output},
         {"raw_output_bytes", v.raw_output_bytes},
         {"raw_output_cap", v.raw_output_cap},
         {"raw_output_truncated", v.raw_output_truncated},
         {"timed_out", v.timed_out},
         {"placeholder", v.placeholder},
         {"duration_ms", v.duration.count()}};
}

inline void from_json(const nlohmann::json& j, Verdict& v) {
    v.status = j.value("status", std::string("Fail")) == "Pass" ? VerdictStatus::Pass : VerdictStatus::Fail;
    v.diagnostics = j.value("diagnostics", std::vector<Diagnostic>{});
    v.warnings = j.value("warnings", std::vector<Diagnostic>{});
    v.residual = j.value("residual", std::vector<std::string>{});
    v.raw_output = j.value("raw_output", std::string());
    v.raw_output_bytes = j.value("raw_output_bytes", std::size_t{0});
    v.raw_output_cap = j.value("raw_output_cap", std::size_t{0});
    v.raw_output_truncated = j.value("raw_output_truncated", false);
    v.timed_out = j.value("timed_out", false);
    v.placeholder = j.value("placeholder", false);
    v.duration = std::chrono::milliseconds(j.value("duration_ms", 0));
}

struct CheckerConfig {
    /// argv template; {file}, {dir} and {project} are substituted per token.
    std::vector<std::string> command{"lake", "env", "lean", "{file}"};
    std::filesystem::path project_root;
    std::filesystem::path scratch_root;
    std::chrono::seconds timeout{120};
    bool keep_artifacts = false;
    std::size_t raw_output_cap = 64 * 1024;
    std::vector<std::string> placeholders = default_placeholders();
    std::vector<std::string> extra_imports;
    std::string file_name = "Main.lean";
    int max_parallel = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

/// A self-contained file ready for the checker, plus the mapping from file
/// lines back to proof lines.
struct Submission {
    std::string key;
    std::string source;
    std::string proof; // empty for whole-file checks
    bool has_proof = false;
    int line_offset = 0;   // file line = proof line + line_offset
    int column_offset = 0; // indentation added to proof lines
    int proof_lines = 0;
};

struct CheckerOutcome {
    int exit_code = 0;
    std::string output;
    bool timed_out = false;
    std::chrono::milliseconds duration{0};
};

namespace detail {

inline std::vector<std::string> unique_append(std::vector<std::string> a, const std::vector<std::string>& b) {
    for (const auto& x : b)
        if (std::find(a.begin(), a.end(), x) == a.end())
            a.push_back(x);
    return a;
}

inline std::string import_header(const std::vector<std::string>& imports) {
    std::string out;
    for (const auto& i : imports)
        out += i + "\n";
    if (!imports.empty())
        out += "\n";
    return out;
}

} // namespace detail

/// Build the checker input for `proof` against `theorem`.  A proof that
/// contains its own theorem declaration replaces the conjecture; otherwise it
/// is treated as a tactic block for the conjecture.  Import lines inside the
/// proof are hoisted to the file header and left blank in place so proof line
/// numbers stay stable.
inline Submission assemble_submission(std::string_view proof, const Theorem& theorem,
                                      const std::vector<std::string>& extra_imports = {}) {
    Submission sub;
    sub.key = theorem.id;
    sub.proof = std::string(proof);
    sub.has_proof = true;

    auto proof_lines = text::split_lines(proof);
    std::vector<std::string> hoisted;
    for (auto& l : proof_lines.lines) {
        auto t = text::trim(l);
        if (text::starts_with_word(t, "import")) {
            hoisted.emplace_back(t);
            l.clear();
        }
    }
    std::string body = text::join_lines(proof_lines);
    sub.proof_lines = static_cast<int>(proof_lines.lines.size());

    bool full_declaration = false;
    for (const auto& b : lean::split_blocks(body))
        if (b.kind == lean::BlockKind::Theorem)
            full_declaration = true;

    auto imports = detail::unique_append(detail::unique_append(extra_imports, theorem.imports), hoisted);
    std::string prefix = detail::import_header(imports);
    if (!text::trim(theorem.context_source).empty())
        prefix += lean::strip_trailing_newlines(theorem.context_source) + "\n\n";

    if (full_declaration) {
        sub.source = prefix + body;
    } else {
        auto parts = lean::split_theorem(theorem.conjecture_source);
        prefix += parts.header + " :=";
        auto first = text::trim(body);
        prefix += text::starts_with_word(first, "by") ? "\n" : " by\n";
        sub.column_offset = 2;
        sub.source = prefix + text::indent(body, "  ");
    }
    if (sub.source.empty() || sub.source.back() != '\n')
        sub.source += '\n';
    sub.line_offset = static_cast<int>(text::split_lines(prefix).lines.size());
    if (!prefix.empty() && prefix.back() != '\n')
        sub.line_offset -= 1; // proof starts on the prefix's last (unterminated) line
    return sub;
}

class Verifier {
public:
    explicit Verifier(CheckerConfig cfg) : cfg_(std::move(cfg)), slots_(std::max(1, cfg_.max_parallel)) {}
    virtual ~Verifier() = default;

    const CheckerConfig& config() const { return cfg_; }
    virtual std::string name() const = 0;

    /// Check a candidate proof of `theorem`.  Diagnostics use proof-local lines.
    Verdict compile(std::string_view proof, const Theorem& theorem,
                    PlaceholderPolicy policy = PlaceholderPolicy::Strict) const {
        if (policy == PlaceholderPolicy::Strict) {
            auto hits = find_placeholders(proof, cfg_.placeholders);
            if (!hits.empty())
                return placeholder_verdict(hits);
        }
        return check(assemble_submission(proof, theorem, cfg_.extra_imports), policy);
    }

    /// Check a complete Lean file as-is.
    Verdict verify_file(std::string_view source, const std::string& key,
                        PlaceholderPolicy policy = PlaceholderPolicy::Tolerant) const {
        if (policy == PlaceholderPolicy::Strict) {
            auto hits = find_placeholders(source, cfg_.placeholders);
            if (!hits.empty())
                return placeholder_verdict(hits);
        }
        Submission sub;
        sub.key = key;
        sub.source = std::string(source);
        sub.proof_lines = static_cast<int>(text::count_lines(source));
        return check(sub, policy);
    }

protected:
    virtual CheckerOutcome run(const Submission& sub) const = 0;

private:
    Verdict placeholder_verdict(const std::vector<PlaceholderHit>& hits) const {
        Verdict v;
        v.status = VerdictStatus::Fail;
        v.placeholder = true;
        v.raw_output_cap = cfg_.raw_output_cap;
        for (const auto& h : hits)
            v.diagnostics.push_back({h.line, h.column, Severity::Error,
                                     "placeholder '" + h.token + "' leaves a goal unproven", true});
        return v;
    }

    Verdict check(const Submission& sub, PlaceholderPolicy policy) const {
        CheckerOutcome outcome;
        {
            slots_.acquire();
            struct Release {
                std::counting_semaphore<>& s;
                ~Release() { s.release(); }
            } release{slots_};
            outcome = run(sub);
        }

        Verdict v;
        v.duration = outcome.duration;
        v.raw_output_bytes = outcome.output.size();
        v.raw_output_cap = cfg_.raw_output_cap;
        v.raw_output_truncated = outcome.output.size() > cfg_.raw_output_cap;
        v.raw_output = outcome.output.substr(0, cfg_.raw_output_cap);
        v.timed_out = outcome.timed_out;
        if (outcome.timed_out) {
            v.status = VerdictStatus::Fail;
            v.diagnostics.push_back({1, 0, Severity::Error,
                                     fmt::format("timeout: checker exceeded {} s", cfg_.timeout.count()), true});
            return v;
        }

        auto parsed = parse_diagnostics(outcome.output);
        v.residual = std::move(parsed.residual);
        std::vector<Diagnostic> ds;
        for (auto d : parsed.diagnostics)
            ds.push_back(to_proof_coordinates(std::move(d), sub));
        sort_diagnostics(ds);

        bool has_error = std::any_of(ds.begin(), ds.end(), [](auto& d) { return d.severity == Severity::Error; });
        bool sorry_warning = std::any_of(ds.begin(), ds.end(), [](auto& d) {
            return d.severity == Severity::Warning && d.message.find("declaration uses 'sorry'") != std::string::npos;
        });
        bool fail = has_error || outcome.exit_code != 0 || (policy == PlaceholderPolicy::Strict && sorry_warning);
        if (fail) {
            v.status = VerdictStatus::Fail;
            v.placeholder = sorry_warning;
            v.diagnostics = std::move(ds);
            if (v.diagnostics.empty())
                v.diagnostics.push_back(
                    {1, 0, Severity::Error, fmt::format("checker exited with status {}", outcome.exit_code), true});
        } else {
            v.status = VerdictStatus::Pass;
            v.warnings = std::move(ds);
        }
        return v;
    }

    static Diagnostic to_proof_coordinates(Diagnostic d, const Submission& sub) {
        if (!sub.has_proof)
            return d;
        int local = d.line - sub.line_offset;
        if (local < 1) {
            d.message = fmt::format("[theorem context, file line {}] {}", d.line, d.message);
            d.line = 1;
            d.column = 0;
            return d;
        }
        d.line = local;
        if (local <= sub.proof_lines)
            d.column = std::max(0, d.column - sub.column_offset);
        return d;
    }

    CheckerConfig cfg_;
    mutable std::counting_semaphore<> slots_;
};

// ---------------------------------------------------------------------------

/// Runs the real checker on a scratch copy of the submission.
class LeanVerifier : public Verifier {
public:
    using Verifier::Verifier;
    std::string name() const override { return "lean"; }

protected:
    CheckerOutcome run(const Submission& sub) const override {
        const auto& cfg = config();
        auto root = cfg.scratch_root.empty() ? std::filesystem::temp_directory_path() / "dream-scratch"
                                             : cfg.scratch_root;
        auto dir = root / fmt::format("{}-{}-{}", sanitize(sub.key), ::getpid(), counter_.fetch_add(1));
        std::filesystem::create_directories(dir);
        auto file = dir / cfg.file_name;
        write_text_file(file, sub.source);

        std::vector<std::string> argv;
        for (auto tok : cfg.command) {
            replace_all(tok, "{file}", file.string());
            replace_all(tok, "{dir}", dir.string());
            replace_all(tok, "{project}", cfg.project_root.string());
            argv.push_back(tok);
        }
        auto cwd = cfg.project_root.empty() ? dir : cfg.project_root;
        ProcessResult pr;
        try {
            pr = run_process(argv, cwd, std::chrono::duration_cast<std::chrono::milliseconds>(cfg.timeout));
        } catch (...) {
            if (!cfg.keep_artifacts)
                std::filesystem::remove_all(dir);
            throw;
        }
        if (!cfg.keep_artifacts)
            std::filesystem::remove_all(dir);
        return {pr.exit_code, std::move(pr.output), pr.timed_out, pr.duration};
    }

private:
    static std::string sanitize(std::string_view s) {
        std::string out;
        for (char c : s)
            out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
        return out.empty() ? "theorem" : out;
    }
    static void replace_all(std::string& s, std::string_view from, std::string_view to) {
        for (std::size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size())
            s.replace(p, from.size(), to);
    }

    mutable std::atomic<std::uint64_t> counter_{0};
};

// ---------------------------------------------------------------------------

/// Rule-table verifier for hermetic tests.  Rules file:
///   { "<theorem id>" | "*": { "accept": [ {"exact": "..."}, {"regex": "..."} ],
///                             "accept_all": false,
///                             "diagnostics": [ {"line":1,"column":0,"severity":"error","message":"..."} ],
///                             "output": "raw checker text (optional)" } }
/// Exact rules compare trimmed text.  Proof checks match the proof body; whole
/// file checks match the file.  Rejections emit checker-format output with
/// the configured diagnostics, so they travel the same parsing path as real
/// checker output.
class MockVerifier : public Verifier {
public:
    MockVerifier(nlohmann::json rules, CheckerConfig cfg = {}) : Verifier(std::move(cfg)), rules_(std::move(rules)) {
        if (!rules_.is_object())
            throw ConfigError("mock rule table must be a JSON object keyed by theorem id");
    }

    static std::unique_ptr<MockVerifier> from_file(const std::filesystem::path& p, CheckerConfig cfg = {}) {
        return std::make_unique<MockVerifier>(nlohmann::json::parse(read_text_file(p)), std::move(cfg));
    }

    std::string name() const override { return "mock"; }

protected:
    CheckerOutcome run(const Submission& sub) const override {
        const nlohmann::json* rule = nullptr;
        if (rules_.contains(sub.key))
            rule = &rules_.at(sub.key);
        else if (rules_.contains("*"))
            rule = &rules_.at("*");

        const std::string target = sub.has_proof ? sub.proof : sub.source;
        if (rule && accepts(*rule, target))
            return {0, "", false, std::chrono::milliseconds(0)};

        std::string output;
        if (rule && rule->contains("output")) {
            output = rule->at("output").get<std::string>();
        } else {
            std::vector<Diagnostic> ds;
            if (rule && rule->contains("diagnostics"))
                ds = rule->at("diagnostics").get<std::vector<Diagnostic>>();
            if (ds.empty())
                ds.push_back({1, 0, Severity::Error, "mock verifier: proof rejected", true});
            for (const auto& d : ds)
                output += fmt::format("{}:{}:{}: {}: {}\n", config().file_name, d.line + sub.line_offset,
                                      d.column + (d.line <= sub.proof_lines ? sub.column_offset : 0),
                                      severity_name(d.severity), d.message);
        }
        return {1, output, false, std::chrono::milliseconds(0)};
    }

private:
    static bool accepts(const nlohmann::json& rule, const std::string& target) {
        if (rule.value("accept_all", false))
            return true;
        if (!rule.contains("accept"))
            return false;
        const auto trimmed = text::trim(target);
        for (const auto& a : rule.at("accept")) {
            if (a.contains("exact") && text::trim(a.at("exact").get<std::string>()) == trimmed)
                return true;
            if (a.contains("regex")) {
                std::regex re(a.at("regex").get<std::string>());
                if (std::regex_search(target, re))
                    return true;
            }
        }
        return false;
    }

    nlohmann::json rules_;
};

} // namespace dream
