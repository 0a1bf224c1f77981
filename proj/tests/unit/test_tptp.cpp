// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "dream/tptp.hpp"
#include "support.hpp"

using namespace dream;
using namespace dream::tptp;

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(DREAM_TEST_DATA) / "tptp";
const fs::path kBad = fs::path(DREAM_TEST_DATA) / "tptp_bad";

ParseOptions rooted() {
    ParseOptions o;
    o.tptp_root = kRoot;
    return o;
}

std::vector<fs::path> corpus() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(kRoot))
        if (e.path().extension() == ".p")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Parse, SimpleProblemStructure) {
    auto p = parse_tptp("fof(a1, axiom, ! [X] : ( p(X) => q(X) )).\nfof(g, conjecture, q(c)).", {{}, "SYN100+1"});
    EXPECT_EQ(p.name, "SYN100+1");
    EXPECT_EQ(p.domain, "SYN");
    ASSERT_EQ(p.formulas.size(), 2u);
    const auto& ax = p.formulas[0];
    EXPECT_EQ(ax.label, "a1");
    EXPECT_EQ(ax.role, Role::Axiom);
    EXPECT_EQ(ax.formula.kind, Formula::Kind::Forall);
    EXPECT_EQ(ax.formula.variables, std::vector<std::string>{"X"});
    EXPECT_EQ(ax.formula.children[0].kind, Formula::Kind::Binary);
    EXPECT_EQ(ax.formula.children[0].op, Connective::Implies);
    EXPECT_EQ(ax.source_text, "fof(a1, axiom, ! [X] : ( p(X) => q(X) )).");
    EXPECT_NO_THROW(validate_problem(p));
}

TEST(Parse, AssociativeChainsAndPrecedence) {
    auto f = parse_tptp("fof(x, axiom, a & b & ~ c).").formulas[0].formula;
    ASSERT_EQ(f.kind, Formula::Kind::Assoc);
    EXPECT_EQ(f.children.size(), 3u);
    EXPECT_EQ(f.children[2].kind, Formula::Kind::Not);
    // quantifier scope is a unit: the implication is outside it
    auto q = parse_tptp("fof(x, axiom, ! [X] : p(X) => q).").formulas[0].formula;
    ASSERT_EQ(q.kind, Formula::Kind::Binary);
    EXPECT_EQ(q.children[0].kind, Formula::Kind::Forall);
    auto e = parse_tptp("fof(x, axiom, ~ f(X) = g(Y)).").formulas[0].formula;
    ASSERT_EQ(e.kind, Formula::Kind::Not);
    EXPECT_EQ(e.children[0].kind, Formula::Kind::Equality);
}

TEST(Parse, RolesAnnotationsAndQuotedNames) {
    auto p = parse_tptp_file(kRoot / "ALG001+1.p");
    ASSERT_EQ(p.formulas.size(), 3u);
    EXPECT_EQ(p.formulas[0].formula.op, Connective::ReverseImplies);
    EXPECT_EQ(p.formulas[1].label, "'quoted name'");
    auto d = parse_tptp_file(kRoot / "NUM002+1.p");
    EXPECT_EQ(d.formulas[0].role, Role::Other);
    EXPECT_EQ(d.formulas[0].role_text, "definition");
    EXPECT_EQ(d.domain, "NUM");
}

TEST(Parse, IncludeResolvesAgainstRoot) {
    auto p = parse_tptp_file(kRoot / "GRP001+1.p", rooted());
    EXPECT_EQ(p.with_role(Role::Axiom).size(), 4u);
    EXPECT_EQ(p.with_role(Role::Hypothesis).size(), 1u);
    EXPECT_EQ(p.formulas.front().label, "associativity");
    auto sel = parse_tptp_file(kRoot / "GRP002+1.p", rooted());
    EXPECT_EQ(sel.with_role(Role::Axiom).size(), 3u);
    for (const auto* f : sel.with_role(Role::Axiom))
        EXPECT_NE(f->label, "right_identity");
}

TEST(Parse, MissingIncludeIsEnvironmentError) {
    ParseOptions o;
    o.tptp_root = kRoot / "nowhere";
    EXPECT_THROW(parse_tptp_file(kRoot / "SET001+1.p", o), EnvironmentError);
}

TEST(Parse, ErrorsCarryPosition) {
    try {
        parse_tptp("fof(a, axiom, p).\nfof(b, axiom, p(X).\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 19);
    }
    EXPECT_THROW(parse_tptp("fof(a, axiom, X)."), ParseError);
    EXPECT_THROW(parse_tptp("fof(a, axiom, p)"), ParseError);
    EXPECT_THROW(parse_tptp("/* never closed"), ParseError);
    EXPECT_THROW(parse_tptp("fof(a, axiom, p => q => r)."), ParseError);
    EXPECT_THROW(parse_tptp_file(kBad / "MIX.p"), ParseError);
}

TEST(Parse, EmptyInputHasNoFormulas) {
    auto p = parse_tptp("% only a comment\n");
    EXPECT_TRUE(p.formulas.empty());
    EXPECT_THROW(validate_problem(p), ValidationError);
    auto two = parse_tptp("fof(a, conjecture, p).\nfof(b, conjecture, q).");
    EXPECT_THROW(validate_problem(two), ValidationError);
}

TEST(Dialect, NonFofInputsAreRejectedByName) {
    const std::pair<const char*, const char*> cases[] = {{"CNF.p", "cnf"},
                                                         {"TFF.p", "tff"},
                                                         {"THF.p", "thf"},
                                                         {"SEQ.p", "sequent (-->)"},
                                                         {"TYPED.p", "typed variable (tff)"}};
    for (auto [file, construct] : cases) {
        try {
            parse_tptp_file(kBad / file);
            ADD_FAILURE() << file << " was accepted";
        } catch (const UnsupportedDialect& e) {
            EXPECT_EQ(e.construct(), construct) << file;
        }
    }
}

TEST(Corpus, EveryFileParsesValidatesAndRoundTrips) {
    auto files = corpus();
    ASSERT_GE(files.size(), 20u);
    for (const auto& f : files) {
        SCOPED_TRACE(f.filename().string());
        auto p = parse_tptp_file(f, rooted());
        EXPECT_NO_THROW(validate_problem(p));
        EXPECT_FALSE(p.domain.empty());
        auto again = parse_tptp(to_string(p), rooted());
        ASSERT_EQ(again.formulas.size(), p.formulas.size());
        for (std::size_t i = 0; i < p.formulas.size(); ++i) {
            EXPECT_EQ(again.formulas[i].label, p.formulas[i].label);
            EXPECT_EQ(again.formulas[i].role_text, p.formulas[i].role_text);
            EXPECT_EQ(again.formulas[i].formula, p.formulas[i].formula);
        }
    }
}

TEST(RoundTrip, GeneratedFormulas) {
    dream::testing::FormulaGenerator gen(7);
    for (int i = 0; i < 300; ++i) {
        auto f = gen.formula(4);
        AnnotatedFormula af{"f" + std::to_string(i), Role::Axiom, "axiom", f, {}};
        auto text = to_string(af);
        SCOPED_TRACE(text);
        auto parsed = parse_tptp(text);
        ASSERT_EQ(parsed.formulas.size(), 1u);
        EXPECT_EQ(parsed.formulas[0].formula, f);
        EXPECT_EQ(to_string(parsed.formulas[0]), text);
    }
}

TEST(Serialize, CanonicalSpacing) {
    auto f = parse_tptp("fof(x,axiom,![X,Y]:((p(X)&~q(Y))|r)).").formulas[0];
    EXPECT_EQ(to_string(f), "fof(x, axiom, ! [X,Y] : ((p(X) & ~ q(Y)) | r)).");
}
