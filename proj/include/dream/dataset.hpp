// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// TPTP to Lean conversion (translate, postprocess, optimize context) and the
// on-disk dataset manifest.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dream/errors.hpp"
#include "dream/gateway.hpp"
#include "dream/lean_source.hpp"
#include "dream/theorem.hpp"
#include "dream/tptp.hpp"
#include "dream/verifier.hpp"

namespace dream {

inline constexpr int kDefaultTranslationAttempts = 60;
inline constexpr std::string_view kRetrySeparator = "\n\nPrevious attempt failed with:\n";

struct Provenance {
    std::string tptp_name;
    int translation_attempts = 0;
    bool verified = false;
    bool optimized = false;
    std::string archived_body;    // proof body removed by postprocess
    std::string rejection;        // why a context reduction was refused
    std::string draft_source;     // last model translation, verbatim
    std::vector<Diagnostic> diagnostics; // from the last failed attempt
};

struct LeanProblem {
    Theorem theorem;
    std::vector<std::string> imports; // mirrors theorem.imports
    Provenance provenance;
};

inline nlohmann::json to_json(const Provenance& p) {
    return {{"tptp_name", p.tptp_name},
            {"translation_attempts", p.translation_attempts},
            {"verified", p.verified},
            {"optimized", p.optimized},
            {"archived_body", p.archived_body},
            {"rejection", p.rejection},
            {"diagnostics", p.diagnostics}};
}

/// "GEO612+1" -> "GEO6": the domain code and the hundreds digit.
inline std::string domain_label(std::string_view problem_name) {
    auto d = tptp::detail::domain_of(problem_name);
    if (d.empty() || problem_name.size() < 4 || !std::isdigit(static_cast<unsigned char>(problem_name[3])))
        return d;
    return d + problem_name[3];
}

inline std::string format_diagnostics(const std::vector<Diagnostic>& ds, const std::vector<std::string>& residual = {}) {
    std::string out;
    for (const auto& d : ds)
        out += fmt::format("line {}, col {}: {}: {}\n", d.line, d.column, severity_name(d.severity), d.message);
    if (ds.empty())
        for (const auto& r : residual)
            out += r + "\n";
    return lean::strip_trailing_newlines(out);
}

/// Prompt slots for the translation role.
inline PromptContext translation_context(const tptp::TptpProblem& problem) {
    std::string axioms;
    std::string conjecture;
    for (const auto& f : problem.formulas) {
        if (f.role == tptp::Role::Conjecture)
            conjecture = f.source_text;
        else
            axioms += f.source_text + "\n";
    }
    return {{"axioms", lean::strip_trailing_newlines(axioms)}, {"conjecture", conjecture}};
}

struct TranslateOptions {
    int max_attempts = kDefaultTranslationAttempts;
    TheoremOrigin origin = TheoremOrigin::TptpRevised;
};

/// Step 1.  Each attempt is compiled placeholder-tolerant; failures feed the
/// next attempt's prompt.  Returns the first verified translation, otherwise
/// the last attempt marked unverified.
inline LeanProblem translate_problem(const Gateway& gateway, const Verifier& verifier, const tptp::TptpProblem& problem,
                                     const TranslateOptions& opt = {}) {
    if (opt.max_attempts < 1)
        throw InvalidArgument("max_attempts must be >= 1");
    tptp::validate_problem(problem);
    const auto domain = domain_label(problem.name);
    const auto base = gateway.make_request(PromptRole::TranslateTptp, translation_context(problem), problem.name);

    LeanProblem out;
    out.provenance.tptp_name = problem.name;
    std::string feedback;
    for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
        auto req = base;
        if (!feedback.empty())
            req.user_text += std::string(kRetrySeparator) + feedback;
        auto code = extract_code_block(gateway.invoke(req).text).code;
        out.provenance.translation_attempts = attempt;
        out.provenance.draft_source = code;

        auto verdict = verifier.verify_file(code, problem.name, PlaceholderPolicy::Tolerant);
        std::optional<Theorem> parsed;
        try {
            parsed = theorem_from_source(code, problem.name, domain, opt.origin);
        } catch (const StructureError& e) {
            if (verdict.passed())
                verdict.diagnostics.push_back({1, 0, Severity::Error, e.what(), true});
            verdict.status = VerdictStatus::Fail;
        }
        if (parsed) {
            out.theorem = *parsed;
            out.imports = parsed->imports;
        } else {
            out.theorem = Theorem{problem.name, domain, {}, code, {}, opt.origin};
            out.imports.clear();
        }
        if (verdict.passed()) {
            out.provenance.verified = true;
            out.provenance.diagnostics.clear();
            return out;
        }
        out.provenance.diagnostics = verdict.diagnostics;
        feedback = format_diagnostics(verdict.diagnostics, verdict.residual);
    }
    out.provenance.verified = false;
    return out;
}

/// Step 2.  Splits context from the conjecture, resets the body to `sorry`,
/// and puts the required imports first.  Idempotent.  When a verifier is
/// given the result is re-checked and `verified` updated.
inline LeanProblem postprocess(LeanProblem draft, const std::vector<std::string>& required_imports,
                               const Verifier* verifier = nullptr) {
    auto t = theorem_from_source(draft.theorem.source(), draft.theorem.id, draft.theorem.domain, draft.theorem.origin);
    auto parts = lean::split_theorem(t.conjecture_source);
    if (parts.has_assign && !lean::is_placeholder_body(parts.body))
        draft.provenance.archived_body = parts.body;
    t.conjecture_source = parts.header + " := sorry";

    std::vector<std::string> imports;
    for (const auto& list : {required_imports, t.imports})
        for (const auto& i : list) {
            std::string s(text::trim(i));
            if (!s.empty() && std::find(imports.begin(), imports.end(), s) == imports.end())
                imports.push_back(s);
        }
    t.imports = imports;
    draft.imports = imports;
    draft.theorem = std::move(t);
    if (verifier) {
        auto v = verifier->verify_file(draft.theorem.source(), draft.theorem.id, PlaceholderPolicy::Tolerant);
        draft.provenance.verified = v.passed();
        draft.provenance.diagnostics = v.passed() ? std::vector<Diagnostic>{} : v.diagnostics;
    }
    return draft;
}

/// Every non-blank block of `reduced` occurs verbatim among the blocks of
/// `original`, in the original order.
inline bool is_context_subset(std::string_view original, std::string_view reduced) {
    std::vector<std::string> orig;
    for (const auto& b : lean::split_blocks(original))
        if (b.kind != lean::BlockKind::Blank)
            orig.emplace_back(lean::strip_trailing_newlines(b.text));
    std::size_t at = 0;
    for (const auto& b : lean::split_blocks(reduced)) {
        if (b.kind == lean::BlockKind::Blank)
            continue;
        auto want = lean::strip_trailing_newlines(b.text);
        while (at < orig.size() && orig[at] != want)
            ++at;
        if (at == orig.size())
            return false;
        ++at;
    }
    return true;
}

/// Step 3.  Accepts a model-proposed reduced context only when it is a subset
/// of the original and the reduced file still verifies.
inline LeanProblem optimize_context(const Gateway& gateway, const Verifier& verifier, LeanProblem problem) {
    if (!problem.provenance.verified)
        throw PreconditionError("optimize_context needs a verified problem ('" + problem.theorem.id + "')");
    auto reject = [&](std::string why) {
        problem.provenance.optimized = false;
        problem.provenance.rejection = std::move(why);
        return problem;
    };
    std::string reduced;
    try {
        PromptContext ctx{{"context", problem.theorem.context_source},
                          {"conjecture", problem.theorem.conjecture_source}};
        reduced = lean::strip_trailing_newlines(
            extract_code_block(gateway.invoke(PromptRole::OptimizeContext, ctx, problem.theorem.id).text).code);
    } catch (const Error& e) {
        return reject(std::string("model request failed: ") + e.what());
    }
    if (!is_context_subset(problem.theorem.context_source, reduced))
        return reject("reduced context is not a subset of the original");

    Theorem candidate = problem.theorem;
    candidate.context_source = reduced;
    Verdict v;
    try {
        v = verifier.verify_file(candidate.source(), candidate.id, PlaceholderPolicy::Tolerant);
    } catch (const Error& e) {
        return reject(std::string("verification failed to run: ") + e.what());
    }
    if (!v.passed())
        return reject("reduced context does not verify: " + text::single_line(format_diagnostics(v.diagnostics)));
    problem.theorem = std::move(candidate);
    problem.provenance.optimized = true;
    problem.provenance.rejection.clear();
    return problem;
}

// ---------------------------------------------------------------------------
// Manifest

inline constexpr int kManifestSchemaVersion = 1;

struct ManifestEntry {
    std::string id;
    std::string domain;
    TheoremOrigin origin = TheoremOrigin::TptpRevised;
    std::string path; // relative to the manifest directory
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    std::map<std::string, int> stats; // per-domain counts as stored
    std::filesystem::path base_dir;

    std::map<std::string, int> recount() const {
        std::map<std::string, int> c;
        for (const auto& e : entries)
            ++c[e.domain];
        return c;
    }
};

inline nlohmann::json to_json(const Manifest& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : m.entries)
        entries.push_back({{"id", e.id}, {"domain", e.domain}, {"origin", origin_name(e.origin)}, {"path", e.path}});
    return {{"schema_version", kManifestSchemaVersion}, {"entries", entries}, {"stats", m.stats}};
}

inline Manifest manifest_from_json(const nlohmann::json& j, std::filesystem::path base_dir = {}) {
    if (!j.is_object())
        throw ValidationError("manifest must be a JSON object");
    Manifest m;
    m.base_dir = std::move(base_dir);
    try {
        if (j.value("schema_version", kManifestSchemaVersion) != kManifestSchemaVersion)
            throw ValidationError("unsupported manifest schema_version " + j.at("schema_version").dump());
        for (const auto& e : j.value("entries", nlohmann::json::array()))
            m.entries.push_back({e.at("id").get<std::string>(), e.at("domain").get<std::string>(),
                                 origin_from_name(e.value("origin", std::string("tptp"))),
                                 e.at("path").get<std::string>()});
        if (j.contains("stats"))
            m.stats = j.at("stats").get<std::map<std::string, int>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& p) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(p));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("manifest " + p.string() + " is not valid JSON: " + e.what());
    }
    return manifest_from_json(j, p.parent_path());
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& p) {
    write_text_file(p, to_json(m).dump(2) + "\n");
}

inline Theorem load_entry(const Manifest& m, const ManifestEntry& e) {
    return load_theorem_file(m.base_dir / e.path, e.id, e.domain, e.origin);
}

/// Reference dataset shape: Lean problem counts per domain and totals.
struct ReferenceCounts {
    std::map<std::string, int> tptp_domains{{"FLD1", 77}, {"FLD2", 32}, {"GEO6", 44}, {"GEO8", 41}, {"GEO9", 8},
                                            {"GRP5", 10}, {"NUM9", 36}, {"KRS1", 67}, {"SET1", 9}};
    int tptp_total = 324;
    int manual_total = 123;
    int total = 447;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;
    std::map<std::string, int> counts;
    int tptp = 0;
    int manual = 0;
    int total = 0;

    void fail(std::string msg) {
        ok = false;
        problems.push_back(std::move(msg));
    }

    std::string text() const {
        std::string out = fmt::format("{} entries ({} tptp, {} manual)\n", total, tptp, manual);
        for (const auto& [d, n] : counts)
            out += fmt::format("  {:<6} {}\n", d, n);
        for (const auto& p : problems)
            out += "error: " + p + "\n";
        out += ok ? "manifest OK\n" : "manifest INVALID\n";
        return out;
    }

    nlohmann::json to_json() const {
        return {{"ok", ok}, {"problems", problems}, {"counts", counts},
                {"tptp", tptp}, {"manual", manual}, {"total", total}};
    }
};

struct ValidateOptions {
    bool check_files = true;
    std::optional<ReferenceCounts> reference;
};

inline ValidationReport validate_manifest(const Manifest& m, const ValidateOptions& opt = {}) {
    ValidationReport r;
    r.counts = m.recount();
    std::set<std::string> ids;
    for (const auto& e : m.entries) {
        ++r.total;
        (e.origin == TheoremOrigin::Manual ? r.manual : r.tptp)++;
        if (!ids.insert(e.id).second)
            r.fail("duplicate id '" + e.id + "'");
        if (e.domain.empty())
            r.fail("entry '" + e.id + "' has no domain");
        if (opt.check_files) {
            try {
                load_entry(m, e);
            } catch (const Error& ex) {
                r.fail("entry '" + e.id + "' (" + e.path + "): " + ex.what());
            }
        }
    }
    std::set<std::string> domains;
    for (const auto& [d, n] : m.stats)
        domains.insert(d);
    for (const auto& [d, n] : r.counts)
        domains.insert(d);
    for (const auto& d : domains) {
        int stored = m.stats.count(d) ? m.stats.at(d) : 0;
        int actual = r.counts.count(d) ? r.counts.at(d) : 0;
        if (stored != actual)
            r.fail(fmt::format("stats mismatch for {}: manifest says {}, found {}", d, stored, actual));
    }
    if (opt.reference) {
        const auto& ref = *opt.reference;
        std::map<std::string, int> tptp_counts;
        for (const auto& e : m.entries)
            if (e.origin == TheoremOrigin::TptpRevised)
                ++tptp_counts[e.domain];
        for (const auto& [d, n] : ref.tptp_domains) {
            int actual = tptp_counts.count(d) ? tptp_counts.at(d) : 0;
            if (actual != n)
                r.fail(fmt::format("reference count mismatch for {}: expected {}, found {}", d, n, actual));
        }
        if (r.tptp != ref.tptp_total)
            r.fail(fmt::format("expected {} tptp-revised theorems, found {}", ref.tptp_total, r.tptp));
        if (r.manual != ref.manual_total)
            r.fail(fmt::format("expected {} manual theorems, found {}", ref.manual_total, r.manual));
        if (r.total != ref.total)
            r.fail(fmt::format("expected {} theorems in total, found {}", ref.total, r.total));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Conversion driver

struct ConvertOptions {
    tptp::ParseOptions parse;
    TranslateOptions translate;
    std::vector<std::string> imports{"import Mathlib"};
    bool skip_optimize = false;
    std::filesystem::path out_dir;
};

struct ConvertOutcome {
    std::string name;
    std::optional<LeanProblem> problem; // set when conversion produced a verified file
    std::string error;
};

/// Runs all three steps for one TPTP file.  Failures are reported, not thrown,
/// except environment errors, which abort the batch.
inline ConvertOutcome convert_one(const Gateway& gateway, const Verifier& verifier, const std::filesystem::path& file,
                                  const ConvertOptions& opt) {
    ConvertOutcome out;
    out.name = file.stem().string();
    try {
        auto parse = opt.parse;
        parse.problem_name = out.name;
        auto problem = tptp::parse_tptp_file(file, parse);
        auto lp = translate_problem(gateway, verifier, problem, opt.translate);
        if (!lp.provenance.verified) {
            out.error = fmt::format("no verified translation after {} attempts: {}", lp.provenance.translation_attempts,
                                    text::single_line(format_diagnostics(lp.provenance.diagnostics)));
            return out;
        }
        lp = postprocess(std::move(lp), opt.imports, &verifier);
        if (!lp.provenance.verified) {
            out.error = "postprocessed file does not verify: " +
                        text::single_line(format_diagnostics(lp.provenance.diagnostics));
            return out;
        }
        if (!opt.skip_optimize)
            lp = optimize_context(gateway, verifier, std::move(lp));
        out.problem = std::move(lp);
    } catch (const EnvironmentError&) {
        throw;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

/// Writes `<domain>/<id>.lean` files plus `manifest.json` under out_dir.
inline Manifest write_dataset(const std::vector<LeanProblem>& problems, const std::filesystem::path& out_dir) {
    Manifest m;
    m.base_dir = out_dir;
    for (const auto& p : problems) {
        std::string rel = (p.theorem.domain.empty() ? std::string("misc") : p.theorem.domain) + "/" + p.theorem.id +
                          ".lean";
        write_text_file(out_dir / rel, p.theorem.source());
        m.entries.push_back({p.theorem.id, p.theorem.domain, p.theorem.origin, rel});
    }
    std::sort(m.entries.begin(), m.entries.end(), [](auto& a, auto& b) { return a.id < b.id; });
    m.stats = m.recount();
    save_manifest(m, out_dir / "manifest.json");
    nlohmann::json prov = nlohmann::json::object();
    for (const auto& p : problems)
        prov[p.theorem.id] = to_json(p.provenance);
    write_text_file(out_dir / "provenance.json", prov.dump(2) + "\n");
    return m;
}

} // namespace dream
