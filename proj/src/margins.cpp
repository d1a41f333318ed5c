#include "contab/margins.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "contab/errors.hpp"

namespace contab {

MarginPair validate(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols) {
    if (rows.empty() || cols.empty())
        throw EmptyMargin("margins: row and column lists must be nonempty");
    for (auto v : rows)
        if (v < 0) throw InvalidMargins("margins: negative row margin " + std::to_string(v));
    for (auto v : cols)
        if (v < 0) throw InvalidMargins("margins: negative column margin " + std::to_string(v));
    const std::int64_t rs = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
    const std::int64_t cs = std::accumulate(cols.begin(), cols.end(), std::int64_t{0});
    if (rs != cs)
        throw SumMismatch("margins: row total " + std::to_string(rs) +
                          " != column total " + std::to_string(cs));
    return MarginPair{std::move(rows), std::move(cols), rs};
}

void validate_params(const BarvinokParams& p) {
    if (p.n < 1) throw DomainError("params: n must be >= 1");
    if (!(p.delta >= 0.0 && p.delta < 1.0)) throw DomainError("params: delta must be in [0,1)");
    if (!(p.B > 0.0)) throw DomainError("params: B must be > 0");
    if (!(p.C > 0.0)) throw DomainError("params: C must be > 0");
    if (snapped_floor(p.C * static_cast<double>(p.n)) < 1)
        throw DegenerateMargin("params: floor(C*n) = 0, margins would be degenerate");
    if (snapped_floor(p.B * p.C * static_cast<double>(p.n)) < 1)
        throw DegenerateMargin("params: floor(B*C*n) = 0, margins would be degenerate");
}

std::int64_t snapped_floor(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

std::int64_t block_count(const BarvinokParams& p) {
    // long double pow keeps n^delta a hair more accurate before the guarded
    // floor; the 1e-9 snap then absorbs the remaining representation error
    // for cases like (10^6)^{1/3}.
    const long double v = std::pow(static_cast<long double>(p.n),
                                   static_cast<long double>(p.delta));
    return snapped_floor(static_cast<double>(v));
}

MarginPair barvinok_margins(const BarvinokParams& p) {
    validate_params(p);
    const std::int64_t n1 = block_count(p);
    const std::int64_t big = snapped_floor(p.B * p.C * static_cast<double>(p.n));
    const std::int64_t small = snapped_floor(p.C * static_cast<double>(p.n));
    std::vector<std::int64_t> side;
    side.reserve(static_cast<std::size_t>(n1 + p.n));
    side.insert(side.end(), static_cast<std::size_t>(n1), big);
    side.insert(side.end(), static_cast<std::size_t>(p.n), small);
    MarginPair out;
    out.cols = side;
    out.rows = std::move(side);
    out.total = n1 * big + p.n * small;
    return out;
}

std::int64_t total_sum(const BarvinokParams& p) {
    validate_params(p);
    const std::int64_t big = snapped_floor(p.B * p.C * static_cast<double>(p.n));
    const std::int64_t small = snapped_floor(p.C * static_cast<double>(p.n));
    return block_count(p) * big + p.n * small;
}

}  // namespace contab
