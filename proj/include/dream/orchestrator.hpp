// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// The per-theorem revision loop.  Revision 1 proves from the theorem alone,
// scheduled revisions diversify through the axiom tree, and every other
// revision refines from the analyzed failure history.  The loop stops at the
// first proof the verifier accepts.

#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dream/axiom_tree.hpp"
#include "dream/errors.hpp"
#include "dream/feedback.hpp"
#include "dream/gateway.hpp"
#include "dream/theorem.hpp"
#include "dream/verifier.hpp"

namespace dream {

struct ScheduleConfig {
    int max_revisions = 10;
    std::set<int> diversify_at{4, 7};
    int k = 2;
    int m_min = 3;
    int m_max = 5;
    LeafSelection selection = LeafSelection::Lexicographic;
    std::uint64_t seed = 0;
    std::chrono::seconds wall_budget{30 * 60};
    std::size_t history_budget_chars = kDefaultHistoryBudget;
    std::string comment_prefix = std::string(kDefaultCommentPrefix);

    void validate() const {
        if (max_revisions < 1)
            throw InvalidArgument("max_revisions must be >= 1");
        for (int r : diversify_at)
            if (r < 2 || r > max_revisions)
                throw InvalidArgument("diversification revision " + std::to_string(r) + " outside [2, " +
                                      std::to_string(max_revisions) + "]");
        if (k < 1)
            throw InvalidArgument("combination size k must be >= 1");
        if (m_min < 1 || m_max < m_min)
            throw InvalidArgument("axiom count range must satisfy 1 <= min <= max");
        if (comment_prefix.empty())
            throw InvalidArgument("comment prefix must not be empty");
    }
};

inline RevisionMode revision_mode(int r, const ScheduleConfig& schedule) {
    if (r < 1 || r > schedule.max_revisions)
        throw InvalidArgument("revision " + std::to_string(r) + " outside [1, " +
                              std::to_string(schedule.max_revisions) + "]");
    if (r == 1)
        return RevisionMode::Initial;
    if (schedule.diversify_at.count(r))
        return RevisionMode::Diversify;
    return RevisionMode::Refine;
}

enum class Method { Dream, Repeated };

inline std::string_view method_name(Method m) { return m == Method::Dream ? "dream" : "repeated"; }

inline Method method_from_name(std::string_view s) {
    if (s == "dream" || s == "Dream")
        return Method::Dream;
    if (s == "repeated" || s == "Repeated")
        return Method::Repeated;
    throw InvalidArgument("unknown method '" + std::string(s) + "' (expected dream or repeated)");
}

struct ProofResult {
    std::string theorem_id;
    std::string domain;
    Method method = Method::Dream;
    bool solved = false;
    std::optional<int> solved_at_revision;
    std::vector<ProofAttempt> attempts;
    std::vector<AnnotatedProof> annotated;
    nlohmann::json tree_snapshot; // null until the tree is built
    std::chrono::milliseconds wall_time{0};
    bool aborted = false;
    std::string failure_reason;
};

inline nlohmann::json to_json(const ProofResult& r) {
    nlohmann::json attempts = nlohmann::json::array();
    for (const auto& a : r.attempts)
        attempts.push_back(to_json(a));
    nlohmann::json annotated = nlohmann::json::array();
    for (const auto& a : r.annotated)
        annotated.push_back(to_json(a));
    return {{"theorem_id", r.theorem_id},
            {"domain", r.domain},
            {"method", method_name(r.method)},
            {"solved", r.solved},
            {"solved_at_revision", r.solved_at_revision ? nlohmann::json(*r.solved_at_revision) : nlohmann::json()},
            {"attempts", attempts},
            {"annotated", annotated},
            {"tree_snapshot", r.tree_snapshot},
            {"wall_time_ms", r.wall_time.count()},
            {"aborted", r.aborted},
            {"failure_reason", r.failure_reason}};
}

/// Hooks invoked as the loop progresses; used for incremental run logs.
struct ProveObserver {
    /// After each compiled attempt; `annotated` is null for passing attempts
    /// and for methods that keep no feedback.
    std::function<void(const ProofAttempt&, const AnnotatedProof*)> on_attempt;
    /// When the theorem aborts at revision `r` before its attempt completed.
    std::function<void(int r, const std::string& reason)> on_abort;
};

namespace detail {

struct GeneratedProof {
    std::string source;
    bool unfenced = false;
};

inline GeneratedProof generate_proof(const Gateway& gateway, const Theorem& theorem, const PromptContext& extra,
                                     std::string_view prefix) {
    auto ctx = theorem_prompt_context(theorem);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        ctx[it.key()] = it.value();
    auto resp = gateway.invoke(PromptRole::GenerateProof, ctx, theorem.id);
    auto block = extract_code_block(resp.text);
    // sentinel comments copied from the history are ours, not part of the proof
    return {strip_prefixed_lines(block.code, prefix), block.unfenced};
}

inline Strategy generate_strategy(const Gateway& gateway, const Theorem& theorem, const SecondLevelAxiom& leaf) {
    auto ctx = theorem_prompt_context(theorem);
    ctx["axiom_set"] = leaf.statement;
    auto resp = gateway.invoke(PromptRole::ProposeStrategy, ctx, theorem.id);
    Strategy s{std::string(text::trim(resp.text)), leaf};
    if (s.description.empty())
        throw BackendError("model returned an empty strategy");
    return s;
}

} // namespace detail

inline ProofResult prove_theorem(const Theorem& theorem, const Gateway& gateway, const Verifier& verifier,
                                 const ScheduleConfig& schedule = {}, const ProveObserver& observer = {}) {
    schedule.validate();
    const auto start = std::chrono::steady_clock::now();
    ProofResult result;
    result.theorem_id = theorem.id;
    result.domain = theorem.domain;
    result.method = Method::Dream;

    FeedbackPool pool(theorem.id);
    std::optional<AxiomTree> tree;
    std::size_t reuse = 0;
    const AxiomTreeOptions tree_opts{schedule.m_min, schedule.m_max, schedule.k, schedule.selection, schedule.seed};

    int r = 1;
    try {
        for (; r <= schedule.max_revisions; ++r) {
            if (std::chrono::steady_clock::now() - start > schedule.wall_budget)
                throw EnvironmentError("wall-clock budget of " + std::to_string(schedule.wall_budget.count()) +
                                       " s exceeded");
            ProofAttempt attempt;
            attempt.revision = r;
            attempt.mode = revision_mode(r, schedule);
            PromptContext extra = PromptContext::object();

            switch (attempt.mode) {
            case RevisionMode::Initial:
                break;
            case RevisionMode::Diversify: {
                if (!tree)
                    tree = build_axiom_tree(theorem, gateway, tree_opts);
                auto leaf = next_leaf(*tree, gateway, theorem);
                if (!leaf) {
                    // exhausted: cycle through the leaves already consumed
                    auto used = tree->consumed();
                    leaf = used[reuse++ % used.size()];
                }
                attempt.strategy = detail::generate_strategy(gateway, theorem, *leaf);
                extra["strategy"] = attempt.strategy->description;
                result.tree_snapshot = tree->to_json();
                break;
            }
            case RevisionMode::Refine: {
                attempt.insight = build_insight(gateway, theorem, pool, r, schedule.history_budget_chars);
                extra["insight"] = attempt.insight->text;
                extra["history"] = failure_history(pool, schedule.history_budget_chars).items;
                break;
            }
            }

            auto proof = detail::generate_proof(gateway, theorem, extra, schedule.comment_prefix);
            attempt.proof_source = std::move(proof.source);
            attempt.unfenced = proof.unfenced;
            attempt.verdict = verifier.compile(attempt.proof_source, theorem, PlaceholderPolicy::Strict);

            if (attempt.verdict.passed()) {
                if (observer.on_attempt)
                    observer.on_attempt(attempt, nullptr);
                result.solved = true;
                result.solved_at_revision = r;
                result.attempts.push_back(std::move(attempt));
                break;
            }

            auto aligned = align_errors(attempt.proof_source, attempt.verdict.diagnostics, schedule.comment_prefix);
            auto annotated = annotate_subpropositions(gateway, theorem, aligned, r, schedule.comment_prefix);
            if (observer.on_attempt)
                observer.on_attempt(attempt, &annotated);
            result.attempts.push_back(attempt);
            result.annotated.push_back(annotated);
            pool.append(std::move(attempt), std::move(annotated));
        }
    } catch (const BackendError& e) {
        result.aborted = true;
        result.failure_reason = std::string("backend: ") + e.what();
    } catch (const EnvironmentError& e) {
        result.aborted = true;
        result.failure_reason = std::string("environment: ") + e.what();
    } catch (const TreeConstructionError& e) {
        result.aborted = true;
        result.failure_reason = std::string("axiom tree: ") + e.what();
    }
    if (result.aborted && observer.on_abort)
        observer.on_abort(r, result.failure_reason);
    if (tree)
        result.tree_snapshot = tree->to_json();
    result.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

/// Baseline: R independent, history-free samples with the same budget.
inline ProofResult sample_repeatedly(const Theorem& theorem, const Gateway& gateway, const Verifier& verifier,
                                     const ScheduleConfig& schedule = {}, const ProveObserver& observer = {}) {
    schedule.validate();
    const auto start = std::chrono::steady_clock::now();
    ProofResult result;
    result.theorem_id = theorem.id;
    result.domain = theorem.domain;
    result.method = Method::Repeated;
    int r = 1;
    try {
        for (; r <= schedule.max_revisions; ++r) {
            if (std::chrono::steady_clock::now() - start > schedule.wall_budget)
                throw EnvironmentError("wall-clock budget of " + std::to_string(schedule.wall_budget.count()) +
                                       " s exceeded");
            ProofAttempt attempt;
            attempt.revision = r;
            attempt.mode = RevisionMode::Initial;
            auto proof = detail::generate_proof(gateway, theorem, PromptContext::object(), schedule.comment_prefix);
            attempt.proof_source = std::move(proof.source);
            attempt.unfenced = proof.unfenced;
            attempt.verdict = verifier.compile(attempt.proof_source, theorem, PlaceholderPolicy::Strict);
            if (observer.on_attempt)
                observer.on_attempt(attempt, nullptr);
            bool passed = attempt.verdict.passed();
            result.attempts.push_back(std::move(attempt));
            if (passed) {
                result.solved = true;
                result.solved_at_revision = r;
                break;
            }
        }
    } catch (const BackendError& e) {
        result.aborted = true;
        result.failure_reason = std::string("backend: ") + e.what();
    } catch (const EnvironmentError& e) {
        result.aborted = true;
        result.failure_reason = std::string("environment: ") + e.what();
    }
    if (result.aborted && observer.on_abort)
        observer.on_abort(r, result.failure_reason);
    result.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

/// Re-run the verifier on a solved result's final proof.
inline bool reverify(const ProofResult& result, const Theorem& theorem, const Verifier& verifier) {
    if (!result.solved || result.attempts.empty())
        return false;
    return verifier.compile(result.attempts.back().proof_source, theorem, PlaceholderPolicy::Strict).passed();
}

} // namespace dream
