// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include "dream/dataset.hpp"
#include "dream/harness.hpp"
#include "support.hpp"

using namespace dream;
using dream::testing::failing_script;
using dream::testing::lean_fence;
using dream::testing::TempDir;

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(DREAM_TEST_DATA) / "tptp";

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    TempDir dir{"dream-cli"};

    Outcome run(const std::string& args) {
        const auto err_path = dir / "stderr.txt";
        std::string cmd = std::string(DREAM_CLI) + " " + args + " 2> '" + err_path.string() + "'";
        Outcome o;
        FILE* p = ::popen(cmd.c_str(), "r");
        if (!p)
            return o;
        char buf[4096];
        for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;)
            o.out.append(buf, n);
        int status = ::pclose(p);
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.err = read_text_file(err_path);
        return o;
    }

    std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }

    fs::path write_config(nlohmann::json script, nlohmann::json rules) {
        nlohmann::json cfg{{"backend", "stub"},
                           {"verifier", "mock"},
                           {"backends", {{"stub", {{"type", "stub"}, {"entries", std::move(script)}}}}},
                           {"verifiers", {{"mock", {{"type", "mock"}, {"rule_table", std::move(rules)}}}}}};
        auto p = dir / "config.json";
        write_text_file(p, cfg.dump(2));
        return p;
    }

    static nlohmann::json accept_exact(const std::string& s) {
        return nlohmann::json{{"*", {{"accept", nlohmann::json::array({{{"exact", s}}})}}}};
    }

    fs::path one_theorem_dataset() {
        auto theorem = dream::testing::sample_theorem("ORD001", "ORD1");
        LeanProblem lp;
        lp.theorem = theorem;
        return fs::path(write_dataset({lp}, dir / "ds").base_dir) / "manifest.json";
    }
};

const std::string kGood = "exact le_trans a b c h1 h2";

} // namespace

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("report").code, 1);
    EXPECT_EQ(run("report --log /nonexistent/x.jsonl").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ValidateExitCodes) {
    auto manifest = one_theorem_dataset();
    auto ok = run("validate --manifest " + q(manifest));
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("manifest OK"), std::string::npos);
    auto ref = run("validate --reference --json --manifest " + q(manifest));
    EXPECT_EQ(ref.code, 3);
    auto j = nlohmann::json::parse(ref.out);
    EXPECT_FALSE(j.at("ok").get<bool>());
    EXPECT_EQ(j.at("total"), 1);
    EXPECT_EQ(run("validate --manifest " + q(dir / "missing.json")).code, 2);
    write_text_file(dir / "bad.json", "[1,");
    EXPECT_EQ(run("validate --manifest " + q(dir / "bad.json")).code, 3);
}

TEST_F(Cli, ConvertBuildsAValidDataset) {
    const std::string lean = "import Mathlib\n\naxiom p : Prop\naxiom ax_p : ¬¬p\n\ntheorem goal : p := by\n"
                             "  exact Classical.byContradiction ax_p\n";
    auto cfg = write_config({{"SYN003+1/TranslateTptp:1", lean_fence(lean)}, {"OptimizeContext:*", "no code"}},
                            {{"*", {{"accept", nlohmann::json::array({{{"regex", "theorem goal"}}})}}}});
    auto out = dir / "converted";
    auto r = run("convert --config " + q(cfg) + " --tptp-root " + q(kRoot) + " --out " + q(out) +
                 " --max-attempts 2 " + q(kRoot / "SYN003+1.p") + " " + q(kRoot / "SYN001+1.p"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("converted 1 of 2"), std::string::npos) << r.out;
    auto failures = nlohmann::json::parse(read_text_file(out / "failures.json"));
    EXPECT_TRUE(failures.contains("SYN001+1"));
    auto m = load_manifest(out / "manifest.json");
    ASSERT_EQ(m.entries.size(), 1u);
    EXPECT_EQ(m.entries[0].domain, "SYN0");
    EXPECT_EQ(run("validate --manifest " + q(out / "manifest.json")).code, 0);
    auto prov = nlohmann::json::parse(read_text_file(out / "provenance.json"));
    EXPECT_FALSE(prov.at("SYN003+1").at("optimized").get<bool>());
}

TEST_F(Cli, ProveSolvesAndReverifies) {
    auto script = failing_script();
    script["ORD001/GenerateProof:2"] = lean_fence(kGood);
    auto cfg = write_config(script, accept_exact(kGood));
    auto manifest = one_theorem_dataset();
    auto r = run("prove --config " + q(cfg) + " --manifest " + q(manifest) + " --theorem ORD001 --reverify");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.at("solved").get<bool>());
    EXPECT_EQ(j.at("solved_at_revision"), 2);
    EXPECT_TRUE(j.at("reverified").get<bool>());
    EXPECT_NE(r.err.find("solved at revision 2"), std::string::npos);

    auto file = dir / "ds" / "ORD1" / "ORD001.lean";
    auto dump = dir / "annotated";
    auto rep = run("prove --config " + q(cfg) + " --theorem " + q(file) + " --method repeated --out " +
                   q(dir / "res.json") + " --dump-annotated " + q(dump));
    EXPECT_EQ(rep.code, 0) << rep.err;
    EXPECT_EQ(nlohmann::json::parse(read_text_file(dir / "res.json")).at("method"), "repeated");
}

TEST_F(Cli, ProveAbortExitsTwo) {
    auto cfg = write_config(nlohmann::json::object(), nlohmann::json::object());
    auto r = run("prove --config " + q(cfg) + " --theorem " + q(one_theorem_dataset().parent_path() / "ORD1" /
                                                              "ORD001.lean"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("aborted"), std::string::npos);
}

TEST_F(Cli, ConfigErrorsAreUsageErrors) {
    write_text_file(dir / "c.json", "{\"backend\": \"nope\"}");
    auto manifest = one_theorem_dataset();
    EXPECT_EQ(run("prove --config " + q(dir / "c.json") + " --manifest " + q(manifest) + " --theorem ORD001").code, 1);
    write_text_file(dir / "c2.json", "{\"schedule\": {\"diversify_at\": [1]}}");
    EXPECT_EQ(run("prove --config " + q(dir / "c2.json") + " --manifest " + q(manifest) + " --theorem ORD001").code,
              1);
}

TEST_F(Cli, RunThenReport) {
    auto script = failing_script();
    script["ORD001/GenerateProof:3"] = lean_fence(kGood);
    auto cfg = write_config(script, accept_exact(kGood));
    auto manifest = one_theorem_dataset();
    auto log = dir / "run.jsonl";
    auto r = run("run --config " + q(cfg) + " --manifest " + q(manifest) + " --out " + q(log));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("attempted 1, skipped 0, solved 1"), std::string::npos) << r.out;
    // refuses to clobber, resumes on request
    EXPECT_EQ(run("run --config " + q(cfg) + " --manifest " + q(manifest) + " --out " + q(log)).code, 1);
    auto again = run("run --config " + q(cfg) + " --manifest " + q(manifest) + " --out " + q(log) + " --resume");
    EXPECT_EQ(again.code, 0);
    EXPECT_NE(again.out.find("skipped 1"), std::string::npos);

    auto table = run("report --log " + q(log) + " --cutoff 2");
    EXPECT_EQ(table.code, 0);
    EXPECT_NE(table.out.find("0.0%"), std::string::npos) << table.out;
    auto csv = run("report --log " + q(log) + " --format csv");
    EXPECT_NE(csv.out.find("dream,10,ORD1,1,1,1/1,100.0%"), std::string::npos) << csv.out;
    EXPECT_EQ(run("report --log " + q(log) + " --method repeated").code, 1);
}
