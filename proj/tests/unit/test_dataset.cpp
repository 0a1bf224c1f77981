// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "dream/dataset.hpp"
#include "support.hpp"

using namespace dream;
using dream::testing::lean_fence;
using dream::testing::TempDir;

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(DREAM_TEST_DATA) / "tptp";

const std::string kGoodLean = "import Mathlib\n\n"
                              "axiom p : Prop\n"
                              "axiom q : Prop\n"
                              "axiom ax_p : ¬¬p\n\n"
                              "theorem goal : p := by\n"
                              "  exact Classical.byContradiction ax_p\n";

tptp::TptpProblem syn003() {
    tptp::ParseOptions o;
    o.tptp_root = kRoot;
    return tptp::parse_tptp_file(kRoot / "SYN003+1.p", o);
}

nlohmann::json accept_regex(const std::string& re) {
    return nlohmann::json{{"*", {{"accept", nlohmann::json::array({{{"regex", re}}})},
                                 {"diagnostics", nlohmann::json::array({{{"line", 4}, {"column", 11},
                                                                         {"message", "unknown identifier 'pp'"}}})}}}};
}

LeanProblem verified_problem() {
    LeanProblem lp;
    lp.theorem = theorem_from_source(kGoodLean, "SYN003+1", "SYN0");
    lp.imports = lp.theorem.imports;
    lp.provenance.verified = true;
    return postprocess(lp, {"import Mathlib"});
}

} // namespace

TEST(Translate, DomainLabels) {
    EXPECT_EQ(domain_label("GEO612+1"), "GEO6");
    EXPECT_EQ(domain_label("KRS153+1"), "KRS1");
    EXPECT_EQ(domain_label("SET"), "SET");
    EXPECT_EQ(domain_label("weird"), "");
}

TEST(Translate, ContextSeparatesConjecture) {
    auto ctx = translation_context(syn003());
    EXPECT_EQ(ctx.at("axioms"), "fof(ax_p, axiom, ~ ~ p).");
    EXPECT_EQ(ctx.at("conjecture"), "fof(goal, conjecture, p).");
}

TEST(Translate, FirstAttemptVerifies) {
    StubBackend stub(nlohmann::json{{"SYN003+1/TranslateTptp:1", lean_fence(kGoodLean)}});
    Gateway gw(stub);
    MockVerifier v(accept_regex("theorem goal"));
    auto lp = translate_problem(gw, v, syn003());
    EXPECT_TRUE(lp.provenance.verified);
    EXPECT_EQ(lp.provenance.translation_attempts, 1);
    EXPECT_EQ(lp.theorem.id, "SYN003+1");
    EXPECT_EQ(lp.theorem.domain, "SYN0");
    EXPECT_EQ(lp.imports, std::vector<std::string>{"import Mathlib"});
    EXPECT_NE(stub.requests().at(0).user_text.find("fof(ax_p, axiom, ~ ~ p)."), std::string::npos);
}

TEST(Translate, RetryPromptCarriesDiagnostics) {
    StubBackend stub(nlohmann::json{{"TranslateTptp:1", lean_fence("axiom ax_p : ¬¬pp\ntheorem g : p := sorry")},
                                    {"TranslateTptp:2", lean_fence(kGoodLean)}});
    Gateway gw(stub);
    MockVerifier v(accept_regex("theorem goal"));
    auto lp = translate_problem(gw, v, syn003());
    ASSERT_TRUE(lp.provenance.verified);
    EXPECT_EQ(lp.provenance.translation_attempts, 2);
    auto reqs = stub.requests();
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_EQ(reqs[0].user_text.find(std::string(kRetrySeparator)), std::string::npos);
    auto at = reqs[1].user_text.find(std::string(kRetrySeparator));
    ASSERT_NE(at, std::string::npos);
    EXPECT_EQ(reqs[1].user_text.substr(0, at), reqs[0].user_text);
    EXPECT_NE(reqs[1].user_text.find("line 4, col 11: error: unknown identifier 'pp'"), std::string::npos);
}

TEST(Translate, BudgetExhaustedReturnsUnverifiedDraft) {
    StubBackend stub(nlohmann::json{{"TranslateTptp:*", lean_fence("theorem goal : p := sorry")}});
    Gateway gw(stub);
    MockVerifier v(accept_regex("never matches"));
    TranslateOptions opt;
    opt.max_attempts = 3;
    auto lp = translate_problem(gw, v, syn003(), opt);
    EXPECT_FALSE(lp.provenance.verified);
    EXPECT_EQ(lp.provenance.translation_attempts, 3);
    EXPECT_EQ(stub.calls(PromptRole::TranslateTptp), 3);
    EXPECT_EQ(lp.provenance.draft_source, "theorem goal : p := sorry");
    EXPECT_FALSE(lp.provenance.diagnostics.empty());
    opt.max_attempts = 0;
    EXPECT_THROW(translate_problem(gw, v, syn003(), opt), InvalidArgument);
}

TEST(Translate, VerifiedFileWithoutTheoremIsAFailedAttempt) {
    StubBackend stub(nlohmann::json{{"TranslateTptp:1", lean_fence("axiom p : Prop")},
                                    {"TranslateTptp:2", lean_fence(kGoodLean)}});
    Gateway gw(stub);
    MockVerifier v(nlohmann::json{{"*", {{"accept_all", true}}}});
    auto lp = translate_problem(gw, v, syn003());
    EXPECT_TRUE(lp.provenance.verified);
    EXPECT_EQ(lp.provenance.translation_attempts, 2);
    EXPECT_NE(stub.requests()[1].user_text.find("theorem"), std::string::npos);
}

TEST(Translate, ProblemsNeedOneConjecture) {
    StubBackend stub(nlohmann::json{{"TranslateTptp:*", "x"}});
    Gateway gw(stub);
    MockVerifier v(nlohmann::json::object());
    auto p = tptp::parse_tptp("fof(a, axiom, p).", {{}, "SYN900+1"});
    EXPECT_THROW(translate_problem(gw, v, p), ValidationError);
}

TEST(Postprocess, PlaceholderBodyArchivedAndImportsOrdered) {
    LeanProblem lp;
    lp.theorem = theorem_from_source("import Foo\nimport Mathlib\n\naxiom p : Prop\naxiom ax_p : ¬¬p\n\n"
                                     "theorem goal : p := by\n  exact Classical.byContradiction ax_p\n",
                                     "SYN003+1", "SYN0");
    auto out = postprocess(lp, {"import Mathlib", "import Aesop"});
    EXPECT_EQ(out.imports, (std::vector<std::string>{"import Mathlib", "import Aesop", "import Foo"}));
    EXPECT_EQ(out.theorem.imports, out.imports);
    EXPECT_EQ(out.theorem.conjecture_source, "theorem goal : p := sorry");
    EXPECT_EQ(text::trim(out.provenance.archived_body), "by\n  exact Classical.byContradiction ax_p");
    auto again = postprocess(out, {"import Mathlib", "import Aesop"});
    EXPECT_EQ(again.theorem.source(), out.theorem.source());
    EXPECT_EQ(again.provenance.archived_body, out.provenance.archived_body);
}

TEST(Postprocess, ReverifiesWhenGivenAVerifier) {
    MockVerifier ok(nlohmann::json{{"*", {{"accept_all", true}}}});
    MockVerifier bad(nlohmann::json::object());
    auto lp = verified_problem();
    EXPECT_TRUE(postprocess(lp, {}, &ok).provenance.verified);
    auto rejected = postprocess(lp, {}, &bad);
    EXPECT_FALSE(rejected.provenance.verified);
    EXPECT_FALSE(rejected.provenance.diagnostics.empty());
}

TEST(Postprocess, TwoTheoremsIsAStructureError) {
    LeanProblem lp;
    lp.theorem.id = "X";
    lp.theorem.context_source = "theorem a : True := trivial";
    lp.theorem.conjecture_source = "theorem b : True := trivial";
    EXPECT_THROW(postprocess(lp, {}), StructureError);
}

TEST(Optimize, SubsetCheck) {
    const std::string ctx = "axiom p : Prop\n\naxiom q : Prop\n\naxiom ax_p : ¬¬p";
    EXPECT_TRUE(is_context_subset(ctx, "axiom p : Prop\n\naxiom ax_p : ¬¬p"));
    EXPECT_TRUE(is_context_subset(ctx, ""));
    EXPECT_TRUE(is_context_subset(ctx, ctx));
    EXPECT_FALSE(is_context_subset(ctx, "axiom ax_p : ¬¬p\n\naxiom p : Prop"));
    EXPECT_FALSE(is_context_subset(ctx, "axiom p : Prop\n\naxiom ax_p : p"));
    EXPECT_FALSE(is_context_subset(ctx, "axiom r : Prop"));
}

TEST(Optimize, AcceptsVerifiedSubset) {
    StubBackend stub(nlohmann::json{{"OptimizeContext:*", lean_fence("axiom p : Prop\naxiom ax_p : ¬¬p")}});
    Gateway gw(stub);
    MockVerifier v(accept_regex("theorem goal"));
    auto out = optimize_context(gw, v, verified_problem());
    EXPECT_TRUE(out.provenance.optimized) << out.provenance.rejection;
    EXPECT_EQ(out.theorem.context_source.find("axiom q"), std::string::npos);
    EXPECT_TRUE(out.provenance.rejection.empty());
}

TEST(Optimize, RejectionsKeepTheOriginal) {
    const auto original = verified_problem();
    MockVerifier v(accept_regex("axiom q"));
    struct Case {
        std::string answer;
        std::string reason;
    };
    for (const auto& c : {Case{lean_fence("axiom p : Prop\naxiom ax_p : p"), "not a subset"},
                          Case{lean_fence("axiom p : Prop\naxiom ax_p : ¬¬p"), "does not verify"}}) {
        StubBackend stub(nlohmann::json{{"OptimizeContext:*", c.answer}});
        Gateway gw(stub);
        auto out = optimize_context(gw, v, original);
        EXPECT_FALSE(out.provenance.optimized);
        EXPECT_NE(out.provenance.rejection.find(c.reason), std::string::npos) << out.provenance.rejection;
        EXPECT_EQ(out.theorem.source(), original.theorem.source());
    }
    StubBackend empty(nlohmann::json::object());
    Gateway gw(empty);
    auto out = optimize_context(gw, v, original);
    EXPECT_NE(out.provenance.rejection.find("model request failed"), std::string::npos);
    auto unverified = original;
    unverified.provenance.verified = false;
    EXPECT_THROW(optimize_context(gw, v, unverified), PreconditionError);
}

TEST(Convert, FullPipelineWritesDataset) {
    StubBackend stub(nlohmann::json{{"SYN003+1/TranslateTptp:1", lean_fence(kGoodLean)},
                                    {"OptimizeContext:*", lean_fence("axiom p : Prop\naxiom ax_p : ¬¬p")}});
    Gateway gw(stub);
    MockVerifier v(accept_regex("theorem goal"));
    ConvertOptions opt;
    opt.parse.tptp_root = kRoot;
    auto ok = convert_one(gw, v, kRoot / "SYN003+1.p", opt);
    ASSERT_TRUE(ok.problem) << ok.error;
    EXPECT_TRUE(ok.problem->provenance.optimized);
    auto failed = convert_one(gw, v, kRoot / "SYN001+1.p", opt); // no script entry
    EXPECT_FALSE(failed.problem);
    EXPECT_FALSE(failed.error.empty());

    TempDir dir;
    auto m = write_dataset({*ok.problem}, dir.path());
    ASSERT_EQ(m.entries.size(), 1u);
    EXPECT_EQ(m.entries[0].path, "SYN0/SYN003+1.lean");
    auto back = load_manifest(dir / "manifest.json");
    EXPECT_TRUE(validate_manifest(back).ok) << validate_manifest(back).text();
    auto t = load_entry(back, back.entries[0]);
    EXPECT_EQ(t.conjecture_source, "theorem goal : p := sorry");
    auto prov = nlohmann::json::parse(read_text_file(dir / "provenance.json"));
    EXPECT_EQ(prov.at("SYN003+1").at("translation_attempts"), 1);
}

TEST(Convert, MissingIncludeRootAbortsTheBatch) {
    StubBackend stub(nlohmann::json{{"TranslateTptp:*", "x"}});
    Gateway gw(stub);
    MockVerifier v(nlohmann::json::object());
    ConvertOptions opt;
    opt.parse.tptp_root = kRoot / "missing";
    EXPECT_THROW(convert_one(gw, v, kRoot / "GRP001+1.p", opt), EnvironmentError);
}

namespace {

Manifest synthetic(const ReferenceCounts& ref, int manual) {
    Manifest m;
    for (const auto& [d, n] : ref.tptp_domains)
        for (int i = 0; i < n; ++i)
            m.entries.push_back({d + "_" + std::to_string(i), d, TheoremOrigin::TptpRevised, "x.lean"});
    for (int i = 0; i < manual; ++i)
        m.entries.push_back({"M" + std::to_string(i), "MAN", TheoremOrigin::Manual, "x.lean"});
    m.stats = m.recount();
    return m;
}

} // namespace

TEST(Manifest, ReferenceShape) {
    ReferenceCounts ref;
    int sum = 0;
    for (const auto& [d, n] : ref.tptp_domains)
        sum += n;
    EXPECT_EQ(sum, ref.tptp_total);
    EXPECT_EQ(ref.tptp_total + ref.manual_total, ref.total);

    ValidateOptions opt{false, ref};
    auto good = validate_manifest(synthetic(ref, 123), opt);
    EXPECT_TRUE(good.ok) << good.text();
    EXPECT_EQ(good.total, 447);

    auto short_geo = synthetic(ref, 123);
    short_geo.entries.erase(std::find_if(short_geo.entries.begin(), short_geo.entries.end(),
                                         [](const auto& e) { return e.domain == "GEO6"; }));
    short_geo.stats = short_geo.recount();
    auto r = validate_manifest(short_geo, opt);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.text().find("GEO6: expected 44, found 43"), std::string::npos) << r.text();

    auto empty = validate_manifest(Manifest{}, opt);
    EXPECT_FALSE(empty.ok);
    EXPECT_TRUE(validate_manifest(Manifest{}).ok);
}

TEST(Manifest, StructuralProblems) {
    ReferenceCounts ref;
    auto m = synthetic(ref, 0);
    m.entries.push_back(m.entries.front());
    m.entries.push_back({"nodomain", "", TheoremOrigin::Manual, "x.lean"});
    auto r = validate_manifest(m, {false, {}});
    EXPECT_FALSE(r.ok);
    auto text = r.text();
    EXPECT_NE(text.find("duplicate id"), std::string::npos);
    EXPECT_NE(text.find("has no domain"), std::string::npos);
    EXPECT_NE(text.find("stats mismatch for FLD1"), std::string::npos);
    auto files = validate_manifest(synthetic(ReferenceCounts{{{"SET1", 1}}, 1, 0, 1}, 0));
    EXPECT_FALSE(files.ok);
    EXPECT_EQ(files.to_json().at("problems").size(), 1u);
}

TEST(Manifest, JsonRoundTripAndErrors) {
    TempDir dir;
    auto m = synthetic(ReferenceCounts{{{"SET1", 2}}, 2, 1, 3}, 1);
    save_manifest(m, dir / "m.json");
    auto back = load_manifest(dir / "m.json");
    EXPECT_EQ(to_json(back), to_json(m));
    write_text_file(dir / "bad.json", "{not json");
    EXPECT_THROW(load_manifest(dir / "bad.json"), ValidationError);
    EXPECT_THROW(manifest_from_json(nlohmann::json{{"schema_version", 9}}), ValidationError);
    EXPECT_THROW(manifest_from_json(nlohmann::json{{"entries", {{{"id", "a"}}}}}), ValidationError);
}
