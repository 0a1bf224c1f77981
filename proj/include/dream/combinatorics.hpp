// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// k-subsets of {1..m} in lexicographic order.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dream/errors.hpp"

namespace dream {

/// Strictly increasing 1-based indices into a first-level axiom list.
using IndexTuple = std::vector<int>;

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays exact because r is C(n-k+i-1, i-1)
        if (r > std::numeric_limits<std::uint64_t>::max() / (n - k + i))
            throw InvalidArgument("binomial coefficient overflows 64 bits");
        r = r * (n - k + i) / i;
    }
    return r;
}

/// Advance `t` to its lexicographic successor among k-subsets of {1..m}.
/// Returns false when `t` was the last one (t is left unchanged).
inline bool next_combination(IndexTuple& t, int m) {
    const int k = static_cast<int>(t.size());
    int i = k - 1;
    while (i >= 0 && t[i] == m - k + i + 1)
        --i;
    if (i < 0)
        return false;
    ++t[i];
    for (int j = i + 1; j < k; ++j)
        t[j] = t[j - 1] + 1;
    return true;
}

inline void check_combination_args(int m, int k) {
    if (m < 1 || k < 1 || k > m)
        throw InvalidArgument("k-combinations require 1 <= k <= m (got m=" + std::to_string(m) +
                              ", k=" + std::to_string(k) + ")");
}

inline std::vector<IndexTuple> k_combinations(int m, int k) {
    check_combination_args(m, k);
    std::vector<IndexTuple> out;
    out.reserve(static_cast<std::size_t>(binomial(m, k)));
    IndexTuple t(k);
    for (int i = 0; i < k; ++i)
        t[i] = i + 1;
    do {
        out.push_back(t);
    } while (next_combination(t, m));
    return out;
}

/// Position of `t` in the lexicographic order of k-subsets of {1..m} (0-based).
inline std::uint64_t combination_rank(const IndexTuple& t, int m) {
    const int k = static_cast<int>(t.size());
    std::uint64_t rank = 0;
    int prev = 0;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < t[i]; ++v)
            rank += binomial(m - v, k - i - 1);
        prev = t[i];
    }
    return rank;
}

} // namespace dream
