#pragma once

// Test-only oracles and helpers. Nothing here calls into the code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace kgc::testing {

// Upper 0.1% points of the chi-square distribution (scipy.stats.chi2.ppf(0.999, df)).
inline double chi2_critical_999(int df) {
    switch (df) {
        case 1: return 10.827566170662733;
        case 2: return 13.815510557964274;
        case 3: return 16.26623619623813;
        case 5: return 20.515005652432873;
        case 23: return 49.7282324664315;
        case 119: return 172.41768160217916;
        default: return NAN;
    }
}

inline double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    }
    return stat;
}

// Probability of a full order under sequential weighted draws without
// replacement: product over positions of w[order[k]] / (remaining weight).
inline double sequential_draw_probability(const std::vector<double>& w,
                                          const std::vector<std::size_t>& order) {
    double remaining = 0.0;
    for (const double x : w) remaining += x;
    double p = 1.0;
    for (const std::size_t i : order) {
        p *= w[i] / remaining;
        remaining -= w[i];
    }
    return p;
}

inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

// Exhaustive pairwise concordance: (concordant + ties / 2) / (P * N).
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / pairs;
}

}  // namespace kgc::testing
