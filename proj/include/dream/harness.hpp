// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner, JSONL run logs, cumulative pass rates and per-domain
// report tables.

#pragma once

#include <sys/file.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/orchestrator.hpp"
#include "dream/text.hpp"

namespace dream {

inline constexpr int kRunLogSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Exact fractions

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0)
            throw InvalidArgument("fraction with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    /// Percentage rounded half-up to `decimals` places, e.g. 3/44 -> "6.8%".
    std::string percent(int decimals = 1) const {
        std::int64_t scale = 100;
        for (int i = 0; i < decimals; ++i)
            scale *= 10;
        std::int64_t units = (2 * scale * num + den) / (2 * den);
        if (decimals == 0)
            return fmt::format("{}%", units);
        std::int64_t p = 1;
        for (int i = 0; i < decimals; ++i)
            p *= 10;
        return fmt::format("{}.{:0{}}%", units / p, units % p, decimals);
    }

    std::string str() const { return fmt::format("{}/{}", num, den); }

    friend bool operator==(const Fraction& a, const Fraction& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(const Fraction& a, const Fraction& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
    friend Fraction operator+(const Fraction& a, const Fraction& b) {
        auto l = std::lcm(a.den, b.den);
        __int128 n = static_cast<__int128>(a.num) * (l / a.den) + static_cast<__int128>(b.num) * (l / b.den);
        if (n > INT64_MAX || n < INT64_MIN)
            throw InvalidArgument("fraction overflow");
        return {static_cast<std::int64_t>(n), l};
    }
};

// ---------------------------------------------------------------------------
// Run records

enum class RecordKind { Revision, Result };

struct RunRecord {
    RecordKind kind = RecordKind::Revision;
    std::string theorem_id;
    std::string domain;
    Method method = Method::Dream;
    int revision = 0;
    std::string mode;           // Initial / Diversify / Refine
    std::string verdict_status; // Pass / Fail / Aborted
    std::string timestamp;
    nlohmann::json extra = nlohmann::json::object(); // diagnostics count, hashes, result fields

    bool passed() const { return kind == RecordKind::Revision && verdict_status == "Pass"; }
};

inline nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j{{"schema_version", kRunLogSchemaVersion},
                     {"kind", r.kind == RecordKind::Revision ? "revision" : "result"},
                     {"theorem_id", r.theorem_id},
                     {"domain", r.domain},
                     {"method", method_name(r.method)}};
    if (r.kind == RecordKind::Revision) {
        j["revision"] = r.revision;
        j["mode"] = r.mode;
        j["verdict_status"] = r.verdict_status;
    }
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it)
        j[it.key()] = it.value();
    j["timestamp"] = r.timestamp;
    return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != kRunLogSchemaVersion)
            throw ValidationError("unsupported run log schema_version " + j.at("schema_version").dump());
        RunRecord r;
        auto kind = j.at("kind").get<std::string>();
        if (kind != "revision" && kind != "result")
            throw ValidationError("unknown run record kind '" + kind + "'");
        r.kind = kind == "revision" ? RecordKind::Revision : RecordKind::Result;
        r.theorem_id = j.at("theorem_id").get<std::string>();
        r.domain = j.at("domain").get<std::string>();
        r.method = method_from_name(j.at("method").get<std::string>());
        r.timestamp = j.value("timestamp", std::string());
        static const std::set<std::string> core{"schema_version", "kind",           "theorem_id", "domain", "method",
                                                "revision",       "verdict_status", "mode",       "timestamp"};
        if (r.kind == RecordKind::Revision) {
            r.revision = j.at("revision").get<int>();
            r.mode = j.at("mode").get<std::string>();
            r.verdict_status = j.at("verdict_status").get<std::string>();
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!core.count(it.key()))
                r.extra[it.key()] = it.value();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed run record: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ValidationError(std::string("malformed run record: ") + e.what());
    }
}

struct RunLog {
    std::vector<RunRecord> records;
    std::size_t skipped_lines = 0; // unparseable lines, e.g. a torn final write
};

inline RunLog parse_run_log(std::string_view content, bool strict = false) {
    RunLog log;
    std::size_t n = 0;
    for (const auto& line : text::split_lines(content).lines) {
        ++n;
        if (text::trim(line).empty())
            continue;
        try {
            log.records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            if (strict)
                throw ValidationError(fmt::format("run log line {}: {}", n, e.what()));
            ++log.skipped_lines;
        }
    }
    return log;
}

inline RunLog read_run_log(const std::filesystem::path& p, bool strict = false) {
    return parse_run_log(read_text_file(p), strict);
}

/// Appends records to a JSONL file; one flushed line per record, guarded by a
/// process-local mutex and an advisory file lock.
class RunLogWriter {
public:
    RunLogWriter(const std::filesystem::path& path, bool truncate) {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        f_ = std::fopen(path.c_str(), truncate ? "w" : "a");
        if (!f_)
            throw EnvironmentError("cannot open run log " + path.string());
    }
    RunLogWriter(const RunLogWriter&) = delete;
    RunLogWriter& operator=(const RunLogWriter&) = delete;
    ~RunLogWriter() {
        if (f_)
            std::fclose(f_);
    }

    void write(const RunRecord& r) {
        auto line = to_json(r).dump() + "\n";
        std::lock_guard lock(mutex_);
        ::flock(fileno(f_), LOCK_EX);
        std::fwrite(line.data(), 1, line.size(), f_);
        std::fflush(f_);
        ::flock(fileno(f_), LOCK_UN);
    }

private:
    std::FILE* f_ = nullptr;
    std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Metrics

/// Theorems with at least one Pass at revision <= cutoff over theorems
/// attempted.  Aborted theorems stay in the denominator.
inline Fraction cumulative_pass_rate(const std::vector<RunRecord>& records, int cutoff,
                                     std::optional<Method> method = std::nullopt) {
    if (cutoff < 1)
        throw InvalidArgument("cutoff must be >= 1");
    std::set<std::string> attempted;
    std::set<std::string> solved;
    for (const auto& r : records) {
        if (method && r.method != *method)
            continue;
        attempted.insert(r.theorem_id);
        if (r.passed() && r.revision <= cutoff)
            solved.insert(r.theorem_id);
    }
    if (attempted.empty())
        throw UndefinedMetric("pass rate is undefined over an empty record set");
    return {static_cast<std::int64_t>(solved.size()), static_cast<std::int64_t>(attempted.size())};
}

struct DomainRow {
    std::string domain;
    int passed = 0;
    int attempted = 0;
    Fraction rate() const { return {passed, attempted}; }
};

struct ReportTable {
    Method method = Method::Dream;
    int revision_cutoff = 10;
    std::vector<DomainRow> rows;
    Fraction average; // pooled counts
    Fraction macro;   // mean of per-domain rates
    int passed = 0;
    int attempted = 0;
};

inline ReportTable aggregate_by_domain(const std::vector<RunRecord>& records, int cutoff, Method method) {
    if (cutoff < 1)
        throw InvalidArgument("cutoff must be >= 1");
    std::map<std::string, std::set<std::string>> attempted;
    std::map<std::string, std::set<std::string>> solved;
    for (const auto& r : records) {
        if (r.method != method)
            continue;
        if (r.domain.empty())
            throw ValidationError("run record for '" + r.theorem_id + "' has no domain");
        attempted[r.domain].insert(r.theorem_id);
        if (r.passed() && r.revision <= cutoff)
            solved[r.domain].insert(r.theorem_id);
    }
    if (attempted.empty())
        throw UndefinedMetric("no records for method " + std::string(method_name(method)));
    ReportTable t;
    t.method = method;
    t.revision_cutoff = cutoff;
    Fraction rate_sum{0, 1};
    for (const auto& [d, ids] : attempted) {
        DomainRow row{d, static_cast<int>(solved[d].size()), static_cast<int>(ids.size())};
        t.passed += row.passed;
        t.attempted += row.attempted;
        rate_sum = rate_sum + row.rate();
        t.rows.push_back(row);
    }
    t.average = Fraction(t.passed, t.attempted);
    t.macro = Fraction(rate_sum.num, rate_sum.den * static_cast<std::int64_t>(t.rows.size()));
    return t;
}

inline std::vector<Method> methods_in(const std::vector<RunRecord>& records) {
    std::set<Method> s;
    for (const auto& r : records)
        s.insert(r.method);
    return {s.begin(), s.end()};
}

inline std::string render_table(const std::vector<ReportTable>& tables) {
    if (tables.empty())
        return {};
    std::vector<std::string> domains;
    for (const auto& t : tables)
        for (const auto& r : t.rows)
            if (std::find(domains.begin(), domains.end(), r.domain) == domains.end())
                domains.push_back(r.domain);
    std::sort(domains.begin(), domains.end());
    std::string out = fmt::format("{:<10}", "Method");
    for (const auto& d : domains)
        out += fmt::format(" {:>7}", d);
    out += fmt::format(" {:>7} {:>7}\n", "Avg.", "Macro");
    for (const auto& t : tables) {
        out += fmt::format("{:<10}", method_name(t.method));
        for (const auto& d : domains) {
            auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](auto& r) { return r.domain == d; });
            out += fmt::format(" {:>7}", it == t.rows.end() ? std::string("-") : it->rate().percent());
        }
        out += fmt::format(" {:>7} {:>7}\n", t.average.percent(), t.macro.percent());
    }
    out += fmt::format("(cutoff {}; Avg. pools theorems across domains, Macro averages domain rates)\n",
                       tables.front().revision_cutoff);
    return out;
}

inline std::string render_csv(const std::vector<ReportTable>& tables) {
    std::string out = "method,cutoff,domain,passed,attempted,rate,percent\n";
    for (const auto& t : tables) {
        for (const auto& r : t.rows)
            out += fmt::format("{},{},{},{},{},{},{}\n", method_name(t.method), t.revision_cutoff, r.domain, r.passed,
                               r.attempted, r.rate().str(), r.rate().percent());
        out += fmt::format("{},{},Avg.,{},{},{},{}\n", method_name(t.method), t.revision_cutoff, t.passed, t.attempted,
                           t.average.str(), t.average.percent());
        out += fmt::format("{},{},Macro,,,{},{}\n", method_name(t.method), t.revision_cutoff, t.macro.str(),
                           t.macro.percent());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Runner

struct RunOptions {
    Method method = Method::Dream;
    std::filesystem::path out;
    bool resume = false;
    int parallel = 1;
    ScheduleConfig schedule;
    bool strip_axioms = false;
};

struct RunSummary {
    int attempted = 0;
    int skipped = 0;
    int solved = 0;
    int aborted = 0;
};

inline RunRecord revision_record(const Theorem& t, Method m, const ProofAttempt& a, const AnnotatedProof* annotated) {
    RunRecord r;
    r.theorem_id = t.id;
    r.domain = t.domain;
    r.method = m;
    r.revision = a.revision;
    r.mode = std::string(mode_name(a.mode));
    r.verdict_status = std::string(status_name(a.verdict.status));
    r.timestamp = text::utc_timestamp();
    r.extra["proof_hash"] = text::hex_digest(a.proof_source);
    r.extra["diagnostics"] = a.verdict.diagnostics.size();
    r.extra["placeholder"] = a.verdict.placeholder;
    if (annotated)
        r.extra["annotation_fallback"] = annotated->fallback;
    return r;
}

inline RunRecord result_record(const ProofResult& res) {
    RunRecord r;
    r.kind = RecordKind::Result;
    r.theorem_id = res.theorem_id;
    r.domain = res.domain;
    r.method = res.method;
    r.timestamp = text::utc_timestamp();
    r.extra["solved"] = res.solved;
    r.extra["solved_at_revision"] =
        res.solved_at_revision ? nlohmann::json(*res.solved_at_revision) : nlohmann::json();
    r.extra["revisions"] = res.attempts.size();
    r.extra["aborted"] = res.aborted;
    r.extra["failure_reason"] = res.failure_reason;
    return r;
}

/// Keeps only theorems whose result record is present; returns their ids.
inline std::set<std::string> compact_for_resume(const std::filesystem::path& log_path, Method method) {
    std::set<std::string> done;
    if (!std::filesystem::exists(log_path))
        return done;
    auto log = read_run_log(log_path);
    std::set<std::pair<std::string, Method>> complete;
    for (const auto& r : log.records)
        if (r.kind == RecordKind::Result)
            complete.insert({r.theorem_id, r.method});
    std::string kept;
    for (const auto& r : log.records)
        if (complete.count({r.theorem_id, r.method}))
            kept += to_json(r).dump() + "\n";
    auto tmp = log_path;
    tmp += ".tmp";
    write_text_file(tmp, kept);
    std::filesystem::rename(tmp, log_path);
    for (const auto& [id, m] : complete)
        if (m == method)
            done.insert(id);
    return done;
}

inline ProofResult run_one(const Theorem& theorem, const Gateway& gateway, const Verifier& verifier,
                           const RunOptions& opt, RunLogWriter& writer) {
    ProveObserver obs;
    obs.on_attempt = [&](const ProofAttempt& a, const AnnotatedProof* ap) {
        writer.write(revision_record(theorem, opt.method, a, ap));
    };
    obs.on_abort = [&](int r, const std::string& reason) {
        if (r > opt.schedule.max_revisions)
            return;
        RunRecord rec;
        rec.theorem_id = theorem.id;
        rec.domain = theorem.domain;
        rec.method = opt.method;
        rec.revision = r;
        rec.mode = std::string(mode_name(opt.method == Method::Dream ? revision_mode(r, opt.schedule)
                                                                      : RevisionMode::Initial));
        rec.verdict_status = "Aborted";
        rec.timestamp = text::utc_timestamp();
        rec.extra["reason"] = reason;
        writer.write(rec);
    };
    const Theorem t = opt.strip_axioms ? without_context_axioms(theorem) : theorem;
    ProofResult res;
    try {
        res = opt.method == Method::Dream ? prove_theorem(t, gateway, verifier, opt.schedule, obs)
                                          : sample_repeatedly(t, gateway, verifier, opt.schedule, obs);
    } catch (const Error& e) {
        // anything the loop does not classify still must not stop the run
        res = ProofResult{};
        res.theorem_id = t.id;
        res.domain = t.domain;
        res.method = opt.method;
        res.aborted = true;
        res.failure_reason = std::string("error: ") + e.what();
    }
    writer.write(result_record(res));
    return res;
}

inline RunSummary run_experiment(const std::vector<Theorem>& theorems, const Gateway& gateway,
                                 const Verifier& verifier, const RunOptions& opt) {
    if (opt.out.empty())
        throw InvalidArgument("run log path is required");
    if (opt.parallel < 1)
        throw InvalidArgument("--parallel must be >= 1");
    opt.schedule.validate();
    std::set<std::string> ids;
    for (const auto& t : theorems)
        if (!ids.insert(t.id).second)
            throw ValidationError("duplicate theorem id '" + t.id + "'");

    std::set<std::string> done;
    if (opt.resume) {
        done = compact_for_resume(opt.out, opt.method);
    } else if (std::filesystem::exists(opt.out) && std::filesystem::file_size(opt.out) > 0) {
        throw InvalidArgument("run log " + opt.out.string() + " already exists; pass --resume or remove it");
    }
    RunLogWriter writer(opt.out, !opt.resume);

    std::vector<const Theorem*> todo;
    RunSummary summary;
    for (const auto& t : theorems) {
        if (done.count(t.id))
            ++summary.skipped;
        else
            todo.push_back(&t);
    }

    std::atomic<std::size_t> next{0};
    std::mutex smu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
            auto res = run_one(*todo[i], gateway, verifier, opt, writer);
            std::lock_guard lock(smu);
            ++summary.attempted;
            summary.solved += res.solved;
            summary.aborted += res.aborted;
        }
    };
    const int n = std::min<int>(opt.parallel, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
    }
    return summary;
}

inline std::vector<Theorem> load_manifest_theorems(const Manifest& m) {
    std::vector<Theorem> out;
    for (const auto& e : m.entries)
        out.push_back(load_entry(m, e));
    return out;
}

} // namespace dream
