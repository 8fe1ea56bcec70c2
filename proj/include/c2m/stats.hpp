#pragma once

#include <array>
#include <string>
#include <vector>

namespace c2m {

enum class Choice { method_a, method_b, tie };

struct VoteRecord {
    std::string item_id;
    std::string rater_id;
    Choice choice = Choice::tie;
};

struct MajorityReport {
    long items_total = 0;
    // Tie votes ignored; items with equal a/b counts excluded.
    long items_decided_ignoring_ties = 0;
    double pct_majority_a = 0.0;
    double pct_majority_b = 0.0;
    // An item is tied when tie is a plurality choice or a/b counts are equal.
    long items_tied = 0;
    double pct_tied_items = 0.0;
    double pct_majority_a_non_tied = 0.0;
    double pct_majority_b_non_tied = 0.0;
    long total_votes_a = 0;
    long total_votes_b = 0;
    long total_votes_tie = 0;
};

// Per-item tallies over {a, b, tie}. Throws std::invalid_argument on empty
// input or duplicate (item, rater) pairs.
MajorityReport majority_analysis(const std::vector<VoteRecord>& votes);

struct ChiSquared {
    double statistic = 0.0;
    double p_value = 1.0;
};

// 2x2 test with continuity correction:
//   N * (max(0, |ad - bc| - N/2))^2 / (r1 * r2 * c1 * c2),
// p = upper tail of chi-square with 1 degree of freedom. Throws
// std::invalid_argument on a zero row or column marginal.
ChiSquared chi_squared_yates(const std::array<std::array<long, 2>, 2>& table);

// Regularized upper incomplete gamma Q(a, x), accurate to ~1e-10: the
// standard power series for P(a, x) when x < a + 1, otherwise a modified
// Lentz continued fraction for Q(a, x) directly.
double igamma_upper_regularized(double a, double x);

}  // namespace c2m
