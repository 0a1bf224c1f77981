// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Sub-proposition error feedback: compiler errors spliced into the failed
// proof as comments, sub-proposition labels added by the model and checked
// locally, and the failure analysis that feeds the next revision.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dream/axiom_tree.hpp"
#include "dream/diagnostics.hpp"
#include "dream/gateway.hpp"
#include "dream/theorem.hpp"
#include "dream/verifier.hpp"

namespace dream {

inline constexpr std::string_view kDefaultCommentPrefix = "-- [DREAM]";

enum class RevisionMode { Initial, Diversify, Refine };

inline std::string_view mode_name(RevisionMode m) {
    switch (m) {
    case RevisionMode::Initial: return "Initial";
    case RevisionMode::Diversify: return "Diversify";
    case RevisionMode::Refine: return "Refine";
    }
    return "?";
}

struct InputsDigest {
    std::string hash;
    int included = 0;
    int elided = 0;
};

struct Insight {
    int revision = 0;
    std::string text;
    InputsDigest inputs_digest;
};

struct ProofAttempt {
    int revision = 1;
    RevisionMode mode = RevisionMode::Initial;
    std::string proof_source;
    bool unfenced = false;
    Verdict verdict;
    std::optional<Strategy> strategy;
    std::optional<Insight> insight;
};

struct AnnotatedProof {
    std::string source_with_comments;
    int attempt_ref = 0;
    int annotation_count = 0;
    int error_comment_count = 0;
    bool fallback = false;
    std::string fallback_reason;
};

/// Failed attempts of one theorem, append-only.
class FeedbackPool {
public:
    explicit FeedbackPool(std::string theorem_id = {}) : theorem_id_(std::move(theorem_id)) {}

    void append(ProofAttempt attempt, AnnotatedProof annotated) {
        if (annotated.attempt_ref != attempt.revision)
            throw PreconditionError("annotated proof refers to revision " + std::to_string(annotated.attempt_ref) +
                                    ", attempt is revision " + std::to_string(attempt.revision));
        if (!attempts_.empty() && attempt.revision <= attempts_.back().revision)
            throw PreconditionError("feedback pool revisions must increase");
        attempts_.push_back(std::move(attempt));
        annotated_.push_back(std::move(annotated));
    }

    const std::string& theorem_id() const { return theorem_id_; }
    const std::vector<ProofAttempt>& attempts() const { return attempts_; }
    const std::vector<AnnotatedProof>& annotated() const { return annotated_; }
    std::size_t size() const { return attempts_.size(); }
    bool empty() const { return attempts_.empty(); }

private:
    std::string theorem_id_;
    std::vector<ProofAttempt> attempts_;
    std::vector<AnnotatedProof> annotated_;
};

// ---------------------------------------------------------------------------
// Comment bookkeeping

inline bool is_prefixed_line(std::string_view line, std::string_view prefix) {
    return text::trim_left(line).starts_with(prefix);
}

inline bool is_error_comment(std::string_view line, std::string_view prefix) {
    auto t = text::trim_left(line);
    if (!t.starts_with(prefix))
        return false;
    auto rest = text::trim_left(t.substr(prefix.size()));
    return rest.starts_with("ERROR(") || rest.starts_with("WARNING(");
}

inline int count_error_comments(std::string_view source, std::string_view prefix) {
    int n = 0;
    for (const auto& l : text::split_lines(source).lines)
        n += is_error_comment(l, prefix) ? 1 : 0;
    return n;
}

/// Remove every line carrying the comment prefix.
inline std::string strip_prefixed_lines(std::string_view source, std::string_view prefix) {
    auto in = text::split_lines(source);
    text::Lines out;
    out.trailing_newline = in.trailing_newline;
    for (auto& l : in.lines)
        if (!is_prefixed_line(l, prefix))
            out.lines.push_back(std::move(l));
    if (out.lines.empty())
        out.trailing_newline = false;
    return text::join_lines(out);
}

inline std::string leading_whitespace(std::string_view line) {
    auto e = line.find_first_not_of(" \t");
    return std::string(line.substr(0, e == std::string_view::npos ? line.size() : e));
}

inline std::string error_comment(const Diagnostic& d, std::string_view prefix, std::string_view note = {}) {
    return fmt::format("{} {}(line {}, col {}): {}{}", prefix, d.severity == Severity::Error ? "ERROR" : "WARNING",
                       d.line, d.column, text::single_line(d.message), note);
}

/// Insert one comment line per diagnostic directly after the line it points
/// at.  Diagnostics beyond the last line go after the last line with a range
/// note.  Comments on the same line are ordered by column, then input order.
inline std::string align_errors(std::string_view proof_source, const std::vector<Diagnostic>& diagnostics,
                                std::string_view comment_prefix = kDefaultCommentPrefix) {
    if (diagnostics.empty())
        return std::string(proof_source);
    auto in = text::split_lines(proof_source);
    const int n = static_cast<int>(in.lines.size());

    std::vector<std::size_t> order(diagnostics.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    auto effective_line = [&](const Diagnostic& d) { return d.line > n ? n + 1 : std::max(d.line, 1); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& da = diagnostics[a];
        const auto& db = diagnostics[b];
        int la = effective_line(da), lb = effective_line(db);
        if (la != lb)
            return la < lb;
        if (da.line != db.line)
            return da.line < db.line;
        return da.column < db.column;
    });

    text::Lines out;
    out.trailing_newline = in.trailing_newline;
    std::size_t next = 0;
    for (int ln = 1; ln <= n; ++ln) {
        const auto& line = in.lines[static_cast<std::size_t>(ln - 1)];
        out.lines.push_back(line);
        const auto indent = leading_whitespace(line);
        while (next < order.size() && std::max(diagnostics[order[next]].line, 1) == ln) {
            out.lines.push_back(indent + error_comment(diagnostics[order[next]], comment_prefix));
            ++next;
        }
    }
    for (; next < order.size(); ++next) {
        const auto& d = diagnostics[order[next]];
        out.lines.push_back(
            error_comment(d, comment_prefix, fmt::format(" [line {} is beyond the proof's {} lines]", d.line, n)));
    }
    return text::join_lines(out);
}

// ---------------------------------------------------------------------------
// Sub-proposition annotation

struct AnnotationCheck {
    bool ok = false;
    std::string normalized;
    int annotations = 0;
    std::string reason;
};

/// Check a model-annotated proof against the error-aligned input.  Every input
/// line must survive in order; every added line must be a line comment, which
/// is rewritten to carry the sentinel prefix so it strips mechanically.
inline AnnotationCheck check_annotation(std::string_view aligned, std::string_view annotated,
                                        std::string_view prefix) {
    AnnotationCheck r;
    auto in = text::split_lines(aligned);
    auto model = text::split_lines(annotated);
    text::Lines out;
    out.trailing_newline = in.trailing_newline;
    std::size_t j = 0;
    for (const auto& line : model.lines) {
        if (j < in.lines.size() && text::trim_right(line) == text::trim_right(in.lines[j])) {
            out.lines.push_back(in.lines[j++]);
            continue;
        }
        auto t = text::trim_left(line);
        if (t.empty())
            continue;
        if (!t.starts_with("--")) {
            r.reason = "annotator changed or added a code line: '" + std::string(text::trim(line)) + "'";
            return r;
        }
        if (is_error_comment(line, prefix)) {
            r.reason = "annotator added or altered an error comment";
            return r;
        }
        std::string_view body = t.starts_with(prefix) ? t.substr(prefix.size()) : t.substr(2);
        body = text::trim(body);
        if (body.empty())
            continue;
        out.lines.push_back(leading_whitespace(line) + std::string(prefix) + " " + std::string(body));
        ++r.annotations;
    }
    if (j != in.lines.size()) {
        r.reason = "annotator dropped line " + std::to_string(j + 1) + " of the proof";
        return r;
    }
    r.normalized = text::join_lines(out);
    if (strip_prefixed_lines(r.normalized, prefix) != strip_prefixed_lines(aligned, prefix)) {
        r.reason = "annotated proof does not strip back to the original";
        return r;
    }
    if (count_error_comments(r.normalized, prefix) != count_error_comments(aligned, prefix)) {
        r.reason = "annotated proof lost an error comment";
        return r;
    }
    r.ok = true;
    return r;
}

/// Ask the model to label sub-propositions; fall back to the error-aligned
/// source when two tries fail validation or the backend fails.
inline AnnotatedProof annotate_subpropositions(const Gateway& gateway, const Theorem& theorem,
                                               std::string_view error_aligned_source, int attempt_ref,
                                               std::string_view prefix = kDefaultCommentPrefix) {
    AnnotatedProof ap;
    ap.attempt_ref = attempt_ref;
    ap.error_comment_count = count_error_comments(error_aligned_source, prefix);
    PromptContext ctx{{"conjecture", theorem.conjecture_source},
                      {"proof", std::string(error_aligned_source)},
                      {"comment_prefix", std::string(prefix)}};
    std::string reason;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            auto resp = gateway.invoke(PromptRole::AnnotateSubpropositions, ctx, theorem.id);
            auto code = extract_code_block(resp.text).code;
            auto check = check_annotation(error_aligned_source, code, prefix);
            if (check.ok) {
                ap.source_with_comments = std::move(check.normalized);
                ap.annotation_count = check.annotations;
                return ap;
            }
            reason = check.reason;
        } catch (const BackendError& e) {
            reason = std::string("annotator backend failure: ") + e.what();
        }
    }
    ap.source_with_comments = std::string(error_aligned_source);
    ap.annotation_count = 0;
    ap.fallback = true;
    ap.fallback_reason = reason;
    return ap;
}

// ---------------------------------------------------------------------------
// History rendering and insight

struct HistoryWindow {
    std::vector<std::string> items; // newest last
    int elided = 0;
};

/// Keep the newest suffix of `items` whose rendered size fits `budget_chars`.
/// The newest item is always kept.
inline HistoryWindow fit_history(std::vector<std::string> items, std::size_t budget_chars) {
    HistoryWindow w;
    std::size_t total = 0;
    std::size_t keep = 0;
    for (std::size_t i = items.size(); i-- > 0;) {
        std::size_t cost = items[i].size() + (keep ? 2 : 0);
        if (keep > 0 && total + cost > budget_chars)
            break;
        total += cost;
        ++keep;
    }
    w.elided = static_cast<int>(items.size() - keep);
    w.items.assign(std::make_move_iterator(items.end() - static_cast<std::ptrdiff_t>(keep)),
                   std::make_move_iterator(items.end()));
    return w;
}

inline std::string format_annotated_item(const AnnotatedProof& a) {
    return fmt::format("Attempt {}:\n```lean\n{}\n```", a.attempt_ref,
                       lean::strip_trailing_newlines(a.source_with_comments));
}

inline std::string format_failure_item(const ProofAttempt& a) {
    std::string errs;
    for (const auto& d : a.verdict.diagnostics)
        errs += fmt::format("line {}, col {}: {}: {}\n", d.line, d.column, severity_name(d.severity),
                            text::single_line(d.message));
    return fmt::format("Attempt {}:\n```lean\n{}\n```\nCompiler errors:\n{}", a.revision,
                       lean::strip_trailing_newlines(a.proof_source), lean::strip_trailing_newlines(errs));
}

inline HistoryWindow annotated_history(const FeedbackPool& pool, std::size_t budget_chars) {
    std::vector<std::string> items;
    for (const auto& a : pool.annotated())
        items.push_back(format_annotated_item(a));
    return fit_history(std::move(items), budget_chars);
}

inline HistoryWindow failure_history(const FeedbackPool& pool, std::size_t budget_chars) {
    std::vector<std::string> items;
    for (const auto& a : pool.attempts())
        items.push_back(format_failure_item(a));
    return fit_history(std::move(items), budget_chars);
}

inline constexpr std::size_t kDefaultHistoryBudget = 48 * 1024;

/// Analyze the annotated failures of revisions 1..r-1 for revision r.
inline Insight build_insight(const Gateway& gateway, const Theorem& theorem, const FeedbackPool& pool, int r,
                             std::size_t budget_chars = kDefaultHistoryBudget) {
    if (r < 2)
        throw PreconditionError("insight requires revision >= 2");
    if (pool.empty())
        throw PreconditionError("insight requires at least one failed attempt in the feedback pool");
    if (static_cast<int>(pool.size()) != r - 1)
        throw PreconditionError("feedback pool holds " + std::to_string(pool.size()) + " attempts, revision " +
                                std::to_string(r) + " expects " + std::to_string(r - 1));
    auto window = annotated_history(pool, budget_chars);
    auto ctx = theorem_prompt_context(theorem);
    ctx["history"] = window.items;
    auto resp = gateway.invoke(PromptRole::AnalyzeFailures, ctx, theorem.id);
    Insight ins;
    ins.revision = r;
    ins.text = std::string(text::trim(resp.text));
    if (ins.text.empty())
        throw BackendError("failure analysis returned empty text");
    std::string joined;
    for (const auto& i : window.items)
        joined += i + "\n\n";
    ins.inputs_digest = {text::hex_digest(joined), static_cast<int>(window.items.size()), window.elided};
    return ins;
}

// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Insight& i) {
    return {{"revision", i.revision},
            {"text", i.text},
            {"inputs_digest",
             {{"hash", i.inputs_digest.hash}, {"included", i.inputs_digest.included}, {"elided", i.inputs_digest.elided}}}};
}

inline nlohmann::json to_json(const AnnotatedProof& a) {
    return {{"source_with_comments", a.source_with_comments},
            {"attempt_ref", a.attempt_ref},
            {"annotation_count", a.annotation_count},
            {"error_comment_count", a.error_comment_count},
            {"fallback", a.fallback},
            {"fallback_reason", a.fallback_reason}};
}

inline nlohmann::json to_json(const ProofAttempt& a) {
    nlohmann::json j{{"revision", a.revision},
                     {"mode", mode_name(a.mode)},
                     {"proof_source", a.proof_source},
                     {"unfenced", a.unfenced},
                     {"verdict", a.verdict}};
    j["strategy"] = a.strategy ? to_json(*a.strategy) : nlohmann::json(nullptr);
    j["insight"] = a.insight ? to_json(*a.insight) : nlohmann::json(nullptr);
    return j;
}

} // namespace dream
