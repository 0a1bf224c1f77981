// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit and acceptance suites.

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "dream/theorem.hpp"
#include "dream/tptp.hpp"

namespace dream::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag = "dream-test") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

inline Theorem sample_theorem(const std::string& id = "ORD001", const std::string& domain = "ORD1") {
    return theorem_from_source("import Mathlib\n\n"
                               "axiom U : Type\n"
                               "axiom le : U → U → Prop\n"
                               "axiom le_refl : ∀ x : U, le x x\n"
                               "axiom le_trans : ∀ x y z : U, le x y → le y z → le x z\n"
                               "axiom le_antisymm : ∀ x y : U, le x y → le y x → x = y\n\n"
                               "theorem le_chain (a b c : U) (h1 : le a b) (h2 : le b c) : le a c := sorry\n",
                               id, domain);
}

inline std::string lean_fence(const std::string& code) { return "```lean\n" + code + "\n```"; }

/// Stub script whose proofs never pass and whose other roles give well-formed answers.
inline nlohmann::json failing_script() {
    return {{"GenerateProof:*", lean_fence("theorem le_chain (a b c : U) (h1 : le a b) (h2 : le b c) : le a c := by\n"
                                           "  apply le_trans\n  exact h1")},
            {"ProposeAxioms:*", "1. le_refl\n2. le_trans\n3. le_antisymm\n4. transitivity chains"},
            {"SynthesizeAxiom:*", "le x y ∧ le y z → le x z"},
            {"ProposeStrategy:*", "Instantiate le_trans with a b c and discharge both premises."},
            {"AnalyzeFailures:*", "Pattern: the second premise of le_trans is never supplied."},
            {"AnnotateSubpropositions:*", "no code block"}};
}

/// Random well-formed FOF formula.  Every tree is one the parser can produce.
class FormulaGenerator {
public:
    explicit FormulaGenerator(std::uint64_t seed) : rng_(seed) {}

    tptp::Formula formula(int depth = 4) {
        using K = tptp::Formula::Kind;
        tptp::Formula f;
        const int pick = depth <= 0 ? pick_int(0, 2) : pick_int(0, 7);
        switch (pick) {
        case 0:
        case 1: return tptp::Formula::atom(function(2, true));
        case 2:
            f.kind = pick_int(0, 1) ? K::Equality : K::Inequality;
            f.terms = {term(2), term(2)};
            return f;
        case 3:
            f.kind = K::Not;
            f.children.push_back(formula(depth - 1));
            return f;
        case 4:
            f.kind = pick_int(0, 1) ? K::Forall : K::Exists;
            for (int i = pick_int(1, 3); i > 0; --i)
                f.variables.push_back(variable());
            f.children.push_back(formula(depth - 1));
            return f;
        case 5:
        case 6: {
            static const tptp::Connective ops[] = {tptp::Connective::Implies, tptp::Connective::ReverseImplies,
                                                   tptp::Connective::Iff,     tptp::Connective::Xor,
                                                   tptp::Connective::Nor,     tptp::Connective::Nand};
            f.kind = K::Binary;
            f.op = ops[pick_int(0, 5)];
            f.children = {formula(depth - 1), formula(depth - 1)};
            return f;
        }
        default:
            f.kind = K::Assoc;
            f.op = pick_int(0, 1) ? tptp::Connective::And : tptp::Connective::Or;
            for (int i = pick_int(2, 4); i > 0; --i)
                f.children.push_back(formula(depth - 1));
            return f;
        }
    }

private:
    int pick_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string variable() { return std::string(1, "XYZW"[pick_int(0, 3)]) + std::to_string(pick_int(0, 2)); }

    tptp::Term function(int depth, bool predicate) {
        static const char* names[] = {"p", "q", "r_1", "'quoted name'", "$true", "f", "g", "c"};
        tptp::Term t{tptp::Term::Kind::Function, names[pick_int(predicate ? 0 : 5, predicate ? 4 : 7)], {}};
        if (t.name != "$true" && depth > 0)
            for (int i = pick_int(0, 3); i > 0; --i)
                t.args.push_back(term(depth - 1));
        return t;
    }

    tptp::Term term(int depth) {
        switch (pick_int(0, 4)) {
        case 0:
        case 1: return {tptp::Term::Kind::Variable, variable(), {}};
        case 2: return {tptp::Term::Kind::Function, std::to_string(pick_int(0, 99)), {}};
        case 3: return {tptp::Term::Kind::Function, "\"obj\"", {}};
        default: return function(depth, false);
        }
    }

    std::mt19937_64 rng_;
};

} // namespace dream::testing
