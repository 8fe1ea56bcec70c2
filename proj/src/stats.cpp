#include "c2m/stats.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace c2m {

MajorityReport majority_analysis(const std::vector<VoteRecord>& votes) {
    if (votes.empty()) {
        throw std::invalid_argument("majority_analysis: no votes");
    }
    struct Tally {
        long a = 0, b = 0, t = 0;
    };
    std::map<std::string, Tally> items;
    std::set<std::pair<std::string, std::string>> seen;
    MajorityReport rep;
    for (const auto& v : votes) {
        if (!seen.insert({v.item_id, v.rater_id}).second) {
            throw std::invalid_argument("majority_analysis: duplicate (item, rater): " +
                                        v.item_id + ", " + v.rater_id);
        }
        Tally& t = items[v.item_id];
        switch (v.choice) {
            case Choice::method_a: ++t.a; ++rep.total_votes_a; break;
            case Choice::method_b: ++t.b; ++rep.total_votes_b; break;
            case Choice::tie: ++t.t; ++rep.total_votes_tie; break;
        }
    }
    rep.items_total = static_cast<long>(items.size());

    long maj_a_ignoring = 0, maj_b_ignoring = 0;
    long tied = 0, maj_a_nt = 0, maj_b_nt = 0;
    for (const auto& [id, t] : items) {
        if (t.a > t.b) ++maj_a_ignoring;
        else if (t.b > t.a) ++maj_b_ignoring;
        // An item is tied when the tie choice is a plurality or a/b are equal.
        bool is_tied = (t.t >= t.a && t.t >= t.b) || t.a == t.b;
        if (is_tied) {
            ++tied;
        } else if (t.a > t.b) {
            ++maj_a_nt;
        } else {
            ++maj_b_nt;
        }
    }
    rep.items_decided_ignoring_ties = maj_a_ignoring + maj_b_ignoring;
    rep.items_tied = tied;
    auto pct = [](long n, long d) {
        return d > 0 ? 100.0 * static_cast<double>(n) / static_cast<double>(d) : 0.0;
    };
    rep.pct_majority_a = pct(maj_a_ignoring, rep.items_decided_ignoring_ties);
    rep.pct_majority_b = pct(maj_b_ignoring, rep.items_decided_ignoring_ties);
    rep.pct_tied_items = pct(tied, rep.items_total);
    rep.pct_majority_a_non_tied = pct(maj_a_nt, maj_a_nt + maj_b_nt);
    rep.pct_majority_b_non_tied = pct(maj_b_nt, maj_a_nt + maj_b_nt);
    return rep;
}

// Q(a, x) per Numerical Recipes 6.2: series for P when x < a + 1 (each term
// multiplies by x / (a + n), stop when a term is below 1e-12 of the sum),
// otherwise the continued fraction
//   Q(a, x) = exp(-x + a ln x - lnGamma(a)) * 1/(x+1-a- 1(1-a)/(x+3-a- ...))
// evaluated by the modified Lentz method to the same tolerance.
double igamma_upper_regularized(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("igamma_upper_regularized: domain error");
    }
    if (x == 0.0) return 1.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double term = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-12) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-12) break;
    }
    return std::exp(log_prefix) * h;
}

ChiSquared chi_squared_yates(const std::array<std::array<long, 2>, 2>& table) {
    const double a = static_cast<double>(table[0][0]);
    const double b = static_cast<double>(table[0][1]);
    const double c = static_cast<double>(table[1][0]);
    const double d = static_cast<double>(table[1][1]);
    if (a < 0 || b < 0 || c < 0 || d < 0) {
        throw std::invalid_argument("chi_squared_yates: negative count");
    }
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) {
        throw std::invalid_argument("chi_squared_yates: zero marginal");
    }
    const double n = r1 + r2;
    const double base = std::max(0.0, std::fabs(a * d - b * c) - n / 2.0);
    const double stat = n * base * base / (r1 * r2 * c1 * c2);
    return {stat, igamma_upper_regularized(0.5, stat / 2.0)};
}

}  // namespace c2m
