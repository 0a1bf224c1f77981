// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: convert, prove, run, report, validate.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dream/config.hpp"
#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/harness.hpp"
#include "dream/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace dream;

namespace {

struct Common {
    std::string config;
    std::string backend;
    std::string verifier;
};

void add_common(CLI::App* sub, Common& c, bool need_backend = true) {
    sub->add_option("--config", c.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    if (need_backend)
        sub->add_option("--backend", c.backend, "backend name from the config (default: config \"backend\")");
    sub->add_option("--verifier", c.verifier, "verifier name from the config (default: config \"verifier\")");
}

std::vector<fs::path> collect_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".p")
                    files.push_back(e.path());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw EnvironmentError("input " + in + " does not exist");
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_convert(const Common& c, const std::vector<std::string>& inputs, const std::string& tptp_root,
                const std::string& out, std::optional<int> max_attempts, bool skip_optimize, int parallel) {
    auto cfg = Config::load(c.config);
    auto bundle = cfg.make_gateway(c.backend);
    auto verifier = cfg.make_verifier(c.verifier);
    ConvertOptions opt;
    opt.parse.tptp_root = tptp_root;
    opt.translate.max_attempts = max_attempts.value_or(cfg.max_attempts());
    opt.imports = cfg.dataset_imports();
    opt.skip_optimize = skip_optimize;
    opt.out_dir = out;

    auto files = collect_inputs(inputs);
    std::vector<ConvertOutcome> outcomes(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < files.size();)
            outcomes[i] = convert_one(*bundle.gateway, *verifier, files[i], opt);
    };
    {
        std::vector<std::jthread> pool;
        for (int i = 0; i < std::max(1, parallel); ++i)
            pool.emplace_back(worker);
    }
    std::vector<LeanProblem> ok;
    nlohmann::json failures = nlohmann::json::object();
    for (auto& o : outcomes) {
        if (o.problem)
            ok.push_back(std::move(*o.problem));
        else
            failures[o.name] = o.error;
    }
    auto manifest = write_dataset(ok, out);
    write_text_file(fs::path(out) / "failures.json", failures.dump(2) + "\n");
    fmt::print("converted {} of {} problems into {}\n", ok.size(), files.size(), out);
    for (auto it = failures.begin(); it != failures.end(); ++it)
        fmt::print(stderr, "failed {}: {}\n", it.key(), it.value().get<std::string>());
    auto report = validate_manifest(manifest);
    if (!report.ok) {
        fmt::print(stderr, "{}", report.text());
        return static_cast<int>(ExitCode::Validation);
    }
    return 0;
}

int cmd_prove(const Common& c, const std::string& theorem_path, const std::string& manifest_path,
              const std::string& id, const std::string& method, const std::string& out,
              const std::string& dump_annotated, bool do_reverify) {
    auto cfg = Config::load(c.config);
    auto bundle = cfg.make_gateway(c.backend);
    auto verifier = cfg.make_verifier(c.verifier);
    Theorem theorem;
    if (!manifest_path.empty()) {
        auto m = load_manifest(manifest_path);
        auto it = std::find_if(m.entries.begin(), m.entries.end(),
                               [&](auto& e) { return e.id == (id.empty() ? theorem_path : id); });
        if (it == m.entries.end())
            throw ValidationError("theorem '" + (id.empty() ? theorem_path : id) + "' is not in the manifest");
        theorem = load_entry(m, *it);
    } else {
        theorem = load_theorem_file(theorem_path, id);
    }
    if (cfg.strip_axioms())
        theorem = without_context_axioms(theorem);
    auto schedule = cfg.schedule();
    auto m = method_from_name(method);
    auto result = m == Method::Dream ? prove_theorem(theorem, *bundle.gateway, *verifier, schedule)
                                     : sample_repeatedly(theorem, *bundle.gateway, *verifier, schedule);
    auto j = to_json(result);
    if (do_reverify)
        j["reverified"] = reverify(result, theorem, *verifier);
    if (!dump_annotated.empty())
        for (const auto& a : result.annotated)
            write_text_file(fs::path(dump_annotated) / fmt::format("{}.r{:02}.lean", theorem.id, a.attempt_ref),
                            a.source_with_comments);
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text_file(out, j.dump(2) + "\n");
    fmt::print(stderr, "{}: {}{}\n", theorem.id,
               result.solved ? fmt::format("solved at revision {}", *result.solved_at_revision) : "not solved",
               result.aborted ? " (aborted: " + result.failure_reason + ")" : "");
    if (do_reverify && result.solved && !j["reverified"].get<bool>())
        return static_cast<int>(ExitCode::Validation);
    return result.aborted ? static_cast<int>(ExitCode::Environment) : 0;
}

int cmd_run(const Common& c, const std::string& manifest_path, const std::string& method, const std::string& out,
            bool resume, int parallel) {
    auto cfg = Config::load(c.config);
    auto manifest = load_manifest(manifest_path);
    auto report = validate_manifest(manifest);
    if (!report.ok) {
        fmt::print(stderr, "{}", report.text());
        return static_cast<int>(ExitCode::Validation);
    }
    auto bundle = cfg.make_gateway(c.backend);
    auto verifier = cfg.make_verifier(c.verifier);
    RunOptions opt;
    opt.method = method_from_name(method);
    opt.out = out;
    opt.resume = resume;
    opt.parallel = parallel;
    opt.schedule = cfg.schedule();
    opt.strip_axioms = cfg.strip_axioms();
    auto summary = run_experiment(load_manifest_theorems(manifest), *bundle.gateway, *verifier, opt);
    fmt::print("{}: attempted {}, skipped {}, solved {}, aborted {}\n", method_name(opt.method), summary.attempted,
               summary.skipped, summary.solved, summary.aborted);
    return 0;
}

int cmd_report(const std::string& log_path, int cutoff, const std::string& format, const std::string& method) {
    auto log = read_run_log(log_path);
    if (log.skipped_lines)
        fmt::print(stderr, "warning: skipped {} unreadable line(s) in {}\n", log.skipped_lines, log_path);
    std::vector<Method> methods;
    if (method.empty())
        methods = methods_in(log.records);
    else
        methods.push_back(method_from_name(method));
    if (methods.empty())
        throw UndefinedMetric("run log " + log_path + " contains no records");
    std::vector<ReportTable> tables;
    for (auto m : methods)
        tables.push_back(aggregate_by_domain(log.records, cutoff, m));
    std::cout << (format == "csv" ? render_csv(tables) : render_table(tables));
    return 0;
}

int cmd_validate(const std::string& manifest_path, bool reference, bool as_json) {
    auto m = load_manifest(manifest_path);
    ValidateOptions opt;
    if (reference)
        opt.reference = ReferenceCounts{};
    auto report = validate_manifest(m, opt);
    std::cout << (as_json ? report.to_json().dump(2) + "\n" : report.text());
    return report.ok ? 0 : static_cast<int>(ExitCode::Validation);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Theorem-proving harness: dataset conversion, proving runs and reports"};
    app.require_subcommand(1);

    Common common;

    auto* convert = app.add_subcommand("convert", "translate TPTP FOF problems into a Lean dataset");
    std::vector<std::string> inputs;
    std::string tptp_root, convert_out;
    std::optional<int> max_attempts;
    bool skip_optimize = false;
    int convert_parallel = 1;
    add_common(convert, common);
    convert->add_option("inputs", inputs, "TPTP files or directories of .p files")->required();
    convert->add_option("--tptp-root", tptp_root, "directory include() paths are resolved against");
    convert->add_option("--out", convert_out, "output dataset directory")->required();
    convert->add_option("--max-attempts", max_attempts, "translation attempts per problem")
        ->check(CLI::PositiveNumber);
    convert->add_flag("--skip-optimize", skip_optimize, "skip context optimization");
    convert->add_option("--parallel", convert_parallel, "worker threads")->check(CLI::PositiveNumber);

    auto* prove = app.add_subcommand("prove", "run the revision loop on one theorem");
    std::string theorem_path, prove_manifest, prove_id, prove_method = "dream", prove_out, dump_annotated;
    bool do_reverify = false;
    add_common(prove, common);
    prove->add_option("--theorem", theorem_path, "Lean file (or theorem id with --manifest)")->required();
    prove->add_option("--manifest", prove_manifest, "look the theorem up in this manifest");
    prove->add_option("--id", prove_id, "theorem id (default: file stem)");
    prove->add_option("--method", prove_method, "dream or repeated")->check(CLI::IsMember({"dream", "repeated"}));
    prove->add_option("--out", prove_out, "write the result JSON here instead of stdout");
    prove->add_option("--dump-annotated", dump_annotated, "directory for annotated failing proofs");
    prove->add_flag("--reverify", do_reverify, "re-check the final proof after solving");

    auto* run = app.add_subcommand("run", "run an experiment over a manifest");
    std::string run_manifest, run_method = "dream", run_out;
    bool resume = false;
    int parallel = 1;
    add_common(run, common);
    run->add_option("--manifest", run_manifest, "dataset manifest")->required()->check(CLI::ExistingFile);
    run->add_option("--method", run_method, "dream or repeated")->check(CLI::IsMember({"dream", "repeated"}));
    run->add_option("--out", run_out, "JSONL run log")->required();
    run->add_flag("--resume", resume, "skip theorems already completed in --out");
    run->add_option("--parallel", parallel, "theorems proved concurrently")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "per-domain pass rates from a run log");
    std::string log_path, format = "table", report_method;
    int cutoff = 10;
    report->add_option("--log", log_path, "JSONL run log")->required()->check(CLI::ExistingFile);
    report->add_option("--cutoff", cutoff, "revision cutoff")->check(CLI::PositiveNumber);
    report->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    report->add_option("--method", report_method, "restrict to one method")
        ->check(CLI::IsMember({"dream", "repeated"}));

    auto* validate = app.add_subcommand("validate", "check a dataset manifest");
    std::string validate_manifest_path;
    bool reference = false, as_json = false;
    validate->add_option("--manifest", validate_manifest_path, "dataset manifest")->required();
    validate->add_flag("--reference", reference, "also compare against the reference dataset counts");
    validate->add_flag("--json", as_json, "print the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    try {
        if (*convert)
            return cmd_convert(common, inputs, tptp_root, convert_out, max_attempts, skip_optimize, convert_parallel);
        if (*prove)
            return cmd_prove(common, theorem_path, prove_manifest, prove_id, prove_method, prove_out, dump_annotated,
                             do_reverify);
        if (*run)
            return cmd_run(common, run_manifest, run_method, run_out, resume, parallel);
        if (*report)
            return cmd_report(log_path, cutoff, format, report_method);
        if (*validate)
            return cmd_validate(validate_manifest_path, reference, as_json);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return static_cast<int>(exit_code_for(e));
    }
    return static_cast<int>(ExitCode::Usage);
}
