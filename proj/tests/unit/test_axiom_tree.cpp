// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "dream/axiom_tree.hpp"
#include "support.hpp"

using namespace dream;
using dream::testing::sample_theorem;

namespace {

nlohmann::json tree_script(const std::string& proposals) {
    return {{"ProposeAxioms:*", proposals}, {"SynthesizeAxiom:*", "derived axiom"}};
}

} // namespace

TEST(BuildAxiomTree, KeepsProposedAxiomsWithinRange) {
    StubBackend stub(tree_script("1. le_refl\n2. le_trans\n3. le_antisymm\n4. totality of the order"));
    Gateway gw(stub);
    auto tree = build_axiom_tree(sample_theorem(), gw);
    EXPECT_EQ(tree.m(), 4);
    EXPECT_EQ(tree.k(), 2);
    EXPECT_EQ(tree.capacity(), 6u);
    EXPECT_TRUE(tree.leaves().empty());
    EXPECT_EQ(tree.cursor(), 0u);
    EXPECT_TRUE(tree.warnings().empty());
    EXPECT_EQ(tree.first_level()[0].id, "A1");
    EXPECT_EQ(tree.first_level()[0].origin, AxiomOrigin::FromContext);
    EXPECT_EQ(tree.first_level()[3].origin, AxiomOrigin::ModelProposed);
}

TEST(BuildAxiomTree, TruncatesToUpperBoundInProposalOrder) {
    StubBackend stub(tree_script("1. a1\n2. a2\n3. a3\n4. a4\n5. a5\n6. a6\n7. a7"));
    Gateway gw(stub);
    auto tree = build_axiom_tree(sample_theorem(), gw);
    ASSERT_EQ(tree.m(), 5);
    for (int i = 0; i < 5; ++i)
        EXPECT_EQ(tree.first_level()[i].statement, "a" + std::to_string(i + 1));
    EXPECT_EQ(tree.warnings().size(), 1u);
}

TEST(BuildAxiomTree, BuildsWithFewerThanLowerBoundAndWarns) {
    StubBackend stub(tree_script("- only one\n- and two"));
    Gateway gw(stub);
    auto tree = build_axiom_tree(sample_theorem(), gw);
    EXPECT_EQ(tree.m(), 2);
    EXPECT_EQ(tree.capacity(), 1u);
    EXPECT_FALSE(tree.warnings().empty());
}

TEST(BuildAxiomTree, EmptyProposalIsAnError) {
    StubBackend stub(tree_script("   \n"));
    Gateway gw(stub);
    EXPECT_THROW(build_axiom_tree(sample_theorem(), gw), TreeConstructionError);
}

TEST(BuildAxiomTree, GatewayFailurePropagates) {
    StubBackend stub(nlohmann::json::object());
    Gateway gw(stub);
    EXPECT_THROW(build_axiom_tree(sample_theorem(), gw), ScriptExhausted);
}

TEST(BuildAxiomTree, DeterministicForDeterministicGateway) {
    auto build = [] {
        StubBackend stub(tree_script("1. x\n2. y\n3. z"));
        Gateway gw(stub);
        return build_axiom_tree(sample_theorem(), gw).to_json();
    };
    EXPECT_EQ(build(), build());
}

TEST(NextLeaf, ConsumesLexicographicallyThenSignalsExhaustion) {
    StubBackend stub(nlohmann::json{{"ProposeAxioms:1", "1. p\n2. q\n3. r"},
                      {"SynthesizeAxiom:1", "pq"},
                      {"SynthesizeAxiom:2", "pr"},
                      {"SynthesizeAxiom:3", "qr"}});
    Gateway gw(stub);
    auto th = sample_theorem();
    auto tree = build_axiom_tree(th, gw);
    auto a = next_leaf(tree, gw, th);
    auto b = next_leaf(tree, gw, th);
    auto c = next_leaf(tree, gw, th);
    ASSERT_TRUE(a && b && c);
    EXPECT_EQ(a->parent_indices, (IndexTuple{1, 2}));
    EXPECT_EQ(b->parent_indices, (IndexTuple{1, 3}));
    EXPECT_EQ(c->parent_indices, (IndexTuple{2, 3}));
    EXPECT_EQ(c->statement, "qr");
    EXPECT_FALSE(next_leaf(tree, gw, th).has_value());
    EXPECT_EQ(stub.calls(PromptRole::SynthesizeAxiom), 3);
    EXPECT_EQ(tree.cursor(), 3u);
}

TEST(NextLeaf, TreesOfDifferentTheoremsAreIndependent) {
    StubBackend stub(tree_script("1. a\n2. b\n3. c\n4. d"));
    Gateway gw(stub);
    auto t1 = sample_theorem("T1");
    auto t2 = sample_theorem("T2");
    auto tree1 = build_axiom_tree(t1, gw);
    auto tree2 = build_axiom_tree(t2, gw);
    std::vector<IndexTuple> seen1, seen2;
    // interleave: 1,2,2,1,2,1
    for (int which : {1, 2, 2, 1, 2, 1}) {
        auto& tree = which == 1 ? tree1 : tree2;
        auto leaf = next_leaf(tree, gw, which == 1 ? t1 : t2);
        ASSERT_TRUE(leaf);
        (which == 1 ? seen1 : seen2).push_back(leaf->parent_indices);
    }
    std::vector<IndexTuple> expected{{1, 2}, {1, 3}, {1, 4}};
    EXPECT_EQ(seen1, expected);
    EXPECT_EQ(seen2, expected);
    EXPECT_EQ(tree1.cursor(), 3u);
    EXPECT_EQ(tree2.cursor(), 3u);
}

TEST(NextLeaf, RandomSelectionIsAPermutationWithoutRepeats) {
    StubBackend stub(tree_script("1. a\n2. b\n3. c\n4. d\n5. e"));
    Gateway gw(stub);
    auto th = sample_theorem();
    AxiomTreeOptions opt;
    opt.selection = LeafSelection::Random;
    opt.seed = 42;
    auto tree = build_axiom_tree(th, gw, opt);
    std::set<IndexTuple> seen;
    while (auto leaf = next_leaf(tree, gw, th))
        EXPECT_TRUE(seen.insert(leaf->parent_indices).second);
    EXPECT_EQ(seen.size(), 10u);
    EXPECT_NE(tree.consumption_order(), k_combinations(5, 2));
}

TEST(AxiomTree, SnapshotRecordsPopulatedLeavesAndCursor) {
    StubBackend stub(tree_script("1. a\n2. b\n3. c"));
    Gateway gw(stub);
    auto th = sample_theorem();
    auto tree = build_axiom_tree(th, gw);
    next_leaf(tree, gw, th);
    auto j = tree.to_json();
    EXPECT_EQ(j["cursor"], 1);
    ASSERT_EQ(j["leaves"].size(), 1u);
    EXPECT_EQ(j["leaves"][0]["parent_indices"], nlohmann::json({1, 2}));
    EXPECT_EQ(j["first_level"].size(), 3u);
}

TEST(ParseAxiomList, AcceptsNumberedBulletedAndPlainLists) {
    EXPECT_EQ(parse_axiom_list("1. a\n2) b\n3: c"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(parse_axiom_list("Here:\n- a\n* b"), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(parse_axiom_list("a\n\nb\n"), (std::vector<std::string>{"a", "b"}));
}
