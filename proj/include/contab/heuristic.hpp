#pragma once

#include <cstdint>
#include <optional>

#include <boost/multiprecision/cpp_int.hpp>

#include "contab/margins.hpp"

namespace contab {

using BigRational = boost::multiprecision::cpp_rational;

// Value of the independence heuristic
//   G(a,b) = C(N+mn-1, mn-1)^{-1} * prod_i C(a_i+n-1, n-1) * prod_j C(b_j+m-1, m-1),
// the row-margin and column-margin counts divided by the total-sum count.
struct HeuristicValue {
    std::optional<BigRational> exact;  // present in exact mode only
    double log_value = 0.0;            // natural log, always present
    MarginPair margins;
};

enum class HeuristicMode { Exact, Log };

struct HeuristicOptions {
    // Exact rational evaluation is refused above this many cells.
    std::size_t exact_max_cells = 400;
};

// log C(s+k-1, k-1): the number of ways to write s as an ordered sum of k
// nonnegative parts.  Relative error <= 1e-13 (exact product for a short
// side, Stirling with Binet-series corrections otherwise).
double log_multiset_count(std::int64_t k, std::int64_t s);

// Natural log of a positive big rational through 50-digit intermediates.
double rational_log(const BigRational& q);

// Exact mode carries the big-rational value alongside its log; log mode
// assembles the log directly from log_multiset_count terms.
HeuristicValue independence_heuristic(const MarginPair& margins, HeuristicMode mode,
                                      const HeuristicOptions& opts = {});

// log G for Barvinok margins straight from (n1, floor(BCn), floor(Cn)),
// without materializing the margin vectors; O(1) log-gamma work.
double barvinok_log_heuristic(const BarvinokParams& params);

struct CorrelationReport {
    double log_T = 0.0;
    double log_G = 0.0;
    double log_ratio = 0.0;                // log_T - log_G
    std::optional<double> normalized;      // log_ratio / n^{1+delta} if params given
    bool upper_bound_surrogate = false;    // log_T is g(Z), not an exact count
};

// Exact-count flavor: counts the tables (small instances only).
CorrelationReport correlation_ratio(const MarginPair& margins,
                                    const std::optional<BarvinokParams>& params = {});

// Surrogate flavor: caller supplies log_T (typically g(Z) as an upper-bound
// stand-in at scales where counting is infeasible); the report says so.
CorrelationReport correlation_ratio(const MarginPair& margins, double log_T_surrogate,
                                    const std::optional<BarvinokParams>& params = {});

}  // namespace contab
