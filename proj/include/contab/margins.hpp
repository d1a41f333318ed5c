#pragma once

#include <cstdint>
#include <vector>

namespace contab {

// Row/column margins with a common total N.  Entries are nonnegative;
// zero entries are legal here (the counter handles forced-zero lines),
// construction of structured Barvinok margins rejects them separately.
struct MarginPair {
    std::vector<std::int64_t> rows;
    std::vector<std::int64_t> cols;
    std::int64_t total = 0;

    std::size_t m() const { return rows.size(); }
    std::size_t n() const { return cols.size(); }
};

// Checks both lists nonempty, entries >= 0, and equal totals.
// Throws EmptyMargin / InvalidMargins / SumMismatch.
MarginPair validate(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols);

// Parameters (n, delta, B, C) of the structured square margins:
// floor(n^delta) entries equal to floor(BCn) followed by n entries equal
// to floor(Cn), identically for rows and columns.
struct BarvinokParams {
    std::int64_t n = 1;
    double delta = 0.5;
    double B = 1.0;
    double C = 1.0;
};

// Throws DomainError unless n >= 1, 0 <= delta < 1, B > 0, C > 0,
// and DegenerateMargin if floor(Cn) = 0 or floor(BCn) = 0.
void validate_params(const BarvinokParams& params);

// floor(x) with an integer-snap guard: values within 1e-9 (relative) of an
// integer round to it first.  Keeps floor(n^delta) and floor(BCn) stable
// against platform differences in pow/rounding.
std::int64_t snapped_floor(double x);

// n1 = floor(n^delta), the number of large margins.  The power is taken in
// long double before the guarded floor.
std::int64_t block_count(const BarvinokParams& params);

// The margin pair itself: m = n_total = n1 + n entries per side.
MarginPair barvinok_margins(const BarvinokParams& params);

// Exact total N = n1*floor(BCn) + n*floor(Cn) of the generated margins,
// without materializing them.  Asymptotically N = Cn^2 + BCn^{1+delta} + O(n).
std::int64_t total_sum(const BarvinokParams& params);

}  // namespace contab
