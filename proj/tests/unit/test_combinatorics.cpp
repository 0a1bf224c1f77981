// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dream/combinatorics.hpp"

using namespace dream;

namespace {

// Independent oracle: every bitmask of width m with popcount k, read as the
// set of its 1-based positions, then sorted.
std::vector<IndexTuple> subsets_by_bitmask(int m, int k) {
    std::vector<IndexTuple> out;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) != k)
            continue;
        IndexTuple t;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i))
                t.push_back(i + 1);
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(KCombinations, FourChooseTwoIsLexicographic) {
    std::vector<IndexTuple> expected{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    EXPECT_EQ(k_combinations(4, 2), expected);
}

TEST(KCombinations, FullCombination) { EXPECT_EQ(k_combinations(3, 3), (std::vector<IndexTuple>{{1, 2, 3}})); }

TEST(KCombinations, FiveChooseTwoMatchesBruteForce) {
    auto got = k_combinations(5, 2);
    EXPECT_EQ(got.size(), 10u);
    EXPECT_EQ(got, subsets_by_bitmask(5, 2));
}

TEST(KCombinations, RejectsInvalidSizes) {
    EXPECT_THROW(k_combinations(3, 4), InvalidArgument);
    EXPECT_THROW(k_combinations(3, 0), InvalidArgument);
    EXPECT_THROW(k_combinations(0, 0), InvalidArgument);
}

TEST(KCombinations, RandomPairsAgreeWithOracle) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int m = std::uniform_int_distribution<int>(1, 12)(rng);
        int k = std::uniform_int_distribution<int>(1, m)(rng);
        auto got = k_combinations(m, k);
        ASSERT_EQ(got, subsets_by_bitmask(m, k)) << "m=" << m << " k=" << k;
        ASSERT_EQ(got.size(), binomial(m, k));
    }
}

TEST(KCombinations, RankInvertsEnumeration) {
    auto all = k_combinations(7, 3);
    for (std::size_t i = 0; i < all.size(); ++i)
        EXPECT_EQ(combination_rank(all[i], 7), i);
}

TEST(Binomial, SmallValues) {
    EXPECT_EQ(binomial(4, 2), 6u);
    EXPECT_EQ(binomial(5, 0), 1u);
    EXPECT_EQ(binomial(3, 5), 0u);
    EXPECT_EQ(binomial(12, 6), 924u);
}
