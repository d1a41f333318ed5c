#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "contab/margins.hpp"

namespace contab {

using BigInt = boost::multiprecision::cpp_int;

struct TableCount {
    BigInt value;
    MarginPair margins;
};

struct CountOptions {
    // Cap on live DP states (boundary layer plus all in-column buckets).
    std::size_t max_states = 50'000'000;
};

// Exact number of nonnegative integer matrices with the given margins.
//
// Column-by-column dynamic programming over residual row-margin vectors;
// each column is itself expanded row by row (state: partially updated
// residual vector; the column budget already spent is implied by the vector
// sum), so no explicit composition enumeration happens.  Columns are
// processed in decreasing margin order, and once the remaining columns all
// carry the same margin, states are merged under their sorted-descending
// canonical form (counts are invariant under permuting row margins, and
// exchangeable remaining columns make the merge safe for reconstruction).
// If m > n the problem is transposed first so the state side is the
// shorter one.  Counts are promoted u64 -> u128 -> arbitrary precision as
// soon as an intermediate could overflow.
//
// Throws InvalidMargins via validate-style checks, ResourceLimit when live
// states exceed opts.max_states.
TableCount count_tables(const MarginPair& margins, const CountOptions& opts = {});

struct Table {
    std::vector<std::vector<std::int64_t>> entries;
};

// Brute-force oracle: emits every table with the given margins exactly once,
// in ascending lexicographic order of the row-major entry sequence, stopping
// after `limit` tables or when the sink returns false.
void enumerate_tables(const MarginPair& margins, std::uint64_t limit,
                      const std::function<bool(const Table&)>& sink);

// Collecting convenience wrapper.
std::vector<Table> enumerate_tables(const MarginPair& margins, std::uint64_t limit);

// Natural log of the exact count, via 50-digit intermediate conversion
// (relative error well under 1e-12).  The count must be positive.
double log_count(const TableCount& count);
double log_count(const MarginPair& margins, const CountOptions& opts = {});

}  // namespace contab
