#include "contab/typical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "contab/errors.hpp"

namespace contab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long double entropy_l(long double x) {
    if (x == 0.0L) return 0.0L;
    return std::log1p(x) + x * std::log1p(1.0L / x);
}

// z(s) = 1/(e^s - 1), the dual parametrization of a table entry.
inline double z_of(double s) {
    const double e = std::expm1(s);
    return e == kInf ? 0.0 : 1.0 / e;
}

// Scalar dual update shared by row and column sweeps: find t solving
//   sum_k 1/(exp(t + other[k]) - 1) = target   (strictly decreasing in t)
// by Newton iteration guarded by the bracket (edge, hi); the map is convex,
// so Newton from either side lands on the h >= 0 branch and then converges
// monotonically.  `t` carries the previous value as a warm start.
double solve_dual_line(double t, const std::vector<double>& other, double target) {
    double edge = -other[0];
    for (double v : other) edge = std::max(edge, -v);
    double lo = edge, hi = kInf;
    if (!(t > edge)) t = edge + 1.0;
    for (int it = 0; it < 80; ++it) {
        double h = -target, dh = 0.0;
        for (double v : other) {
            const double z = z_of(t + v);
            h += z;
            dh -= z * (1.0 + z);
        }
        if (std::abs(h) <= 1e-12 * std::max(1.0, target)) break;
        if (h > 0.0)
            lo = std::max(lo, t);
        else
            hi = std::min(hi, t);
        double next = (dh < 0.0) ? t - h / dh : kInf;
        if (!(next > lo && next < hi)) {
            // fall back to bisection (or gap doubling while unbounded above)
            next = (hi == kInf) ? lo + 2.0 * std::max(t - lo, 1e-300) : 0.5 * (lo + hi);
        }
        if (next == t) break;
        t = next;
    }
    return t;
}

}  // namespace

double entry_entropy(double x) {
    if (x < 0.0) throw DomainError("entry_entropy: negative argument");
    if (x == 0.0) return 0.0;
    return std::log1p(x) + x * std::log1p(1.0 / x);
}

double table_entropy(const RealTable& X) {
    // Neumaier-compensated sum: mn can reach 10^8 terms of similar size
    double sum = 0.0, comp = 0.0;
    for (double v : X.entries) {
        const double term = entry_entropy(v);
        const double t = sum + term;
        comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

RealTable independence_table(const MarginPair& margins) {
    MarginPair mp = validate(margins.rows, margins.cols);
    if (mp.total == 0) throw ZeroTotal("independence_table: N must be positive");
    RealTable W;
    W.m = mp.m();
    W.n = mp.n();
    W.entries.resize(W.m * W.n);
    const double N = static_cast<double>(mp.total);
    for (std::size_t i = 0; i < W.m; ++i)
        for (std::size_t j = 0; j < W.n; ++j)
            W.entries[i * W.n + j] =
                static_cast<double>(mp.rows[i]) * static_cast<double>(mp.cols[j]) / N;
    W.margins = std::move(mp);
    return W;
}

TypicalTableResult solve_typical(const MarginPair& margins, const SolveOptions& opts) {
    MarginPair mp = validate(margins.rows, margins.cols);
    const std::size_t m = mp.m(), n = mp.n();

    // strip zero margins; the optimizer lives in the open orthant
    std::vector<std::size_t> rix, cix;
    for (std::size_t i = 0; i < m; ++i)
        if (mp.rows[i] > 0) rix.push_back(i);
    for (std::size_t j = 0; j < n; ++j)
        if (mp.cols[j] > 0) cix.push_back(j);

    TypicalTableResult res;
    res.Z.m = m;
    res.Z.n = n;
    res.Z.entries.assign(m * n, 0.0);
    res.Z.margins = mp;
    res.row_duals.assign(m, kInf);
    res.col_duals.assign(n, kInf);

    if (rix.empty() || cix.empty()) {
        // N = 0: the polytope is the single all-zero table
        res.g_value = 0.0;
        return res;
    }

    const std::size_t ms = rix.size(), ns = cix.size();
    std::vector<double> a(ms), b(ns);
    for (std::size_t i = 0; i < ms; ++i) a[i] = static_cast<double>(mp.rows[rix[i]]);
    for (std::size_t j = 0; j < ns; ++j) b[j] = static_cast<double>(mp.cols[cix[j]]);
    const double N = static_cast<double>(mp.total);

    // duals of the constant table N/(m's n's): feasible total, symmetric start
    const double t0 = 0.5 * std::log1p(static_cast<double>(ms) * static_cast<double>(ns) / N);
    std::vector<double> lam(ms, t0), mu(ns, t0);

    std::vector<double> zrow(ns);
    double residual = kInf;
    int sweeps = 0;
    for (; sweeps < opts.max_iter; ) {
        for (std::size_t i = 0; i < ms; ++i) lam[i] = solve_dual_line(lam[i], mu, a[i]);
        for (std::size_t j = 0; j < ns; ++j) mu[j] = solve_dual_line(mu[j], lam, b[j]);
        ++sweeps;

        residual = 0.0;
        std::vector<double> colsum(ns, 0.0);
        double g = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < ms; ++i) {
            double rowsum = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const double z = z_of(lam[i] + mu[j]);
                zrow[j] = z;
                rowsum += z;
                colsum[j] += z;
            }
            residual = std::max(residual, std::abs(rowsum - a[i]) / a[i]);
            if (opts.g_trace) {
                for (std::size_t j = 0; j < ns; ++j) {
                    const double term = entry_entropy(zrow[j]);
                    const double t = g + term;
                    comp += (std::abs(g) >= std::abs(term)) ? (g - t) + term : (term - t) + g;
                    g = t;
                }
            }
        }
        for (std::size_t j = 0; j < ns; ++j)
            residual = std::max(residual, std::abs(colsum[j] - b[j]) / b[j]);
        if (opts.g_trace) opts.g_trace->push_back(g + comp);
        if (residual <= opts.tol_margin) break;
    }
    if (residual > opts.tol_margin)
        throw NoConvergence("typical: margin residual " + std::to_string(residual) +
                                " after " + std::to_string(sweeps) + " sweeps",
                            residual);

    for (std::size_t i = 0; i < ms; ++i) res.row_duals[rix[i]] = lam[i];
    for (std::size_t j = 0; j < ns; ++j) res.col_duals[cix[j]] = mu[j];
    double stat = 0.0;
    for (std::size_t i = 0; i < ms; ++i)
        for (std::size_t j = 0; j < ns; ++j) {
            const double z = z_of(lam[i] + mu[j]);
            res.Z.entries[rix[i] * n + cix[j]] = z;
            stat = std::max(stat, std::abs(std::log1p(1.0 / z) - lam[i] - mu[j]));
        }
    res.g_value = table_entropy(res.Z);
    res.iterations = sweeps;
    res.residual = residual;
    res.stationarity = stat;
    return res;
}

BlockTypicalResult solve_block_typical(const BarvinokParams& params, double tol) {
    validate_params(params);
    const long double n = static_cast<long double>(params.n);
    const long double n1 = static_cast<long double>(block_count(params));
    const long double A1 =
        static_cast<long double>(snapped_floor(params.B * params.C * static_cast<double>(params.n)));
    const long double A2 =
        static_cast<long double>(snapped_floor(params.C * static_cast<double>(params.n)));

    // Exact block margin constraints: n1 z11 + n z12 = A1, n1 z12 + n z22 = A2.
    const auto z12_of = [&](long double z11) { return (A1 - n1 * z11) / n; };
    const auto z22_of = [&](long double z11) { return (A2 - n1 * z12_of(z11)) / n; };

    // positivity of all three entries bounds z11 to an open interval
    const long double lo = std::max<long double>(0.0L, (n1 * A1 - n * A2) / (n1 * n1));
    const long double hi = A1 / n1;
    if (!(lo < hi))
        throw InfeasibleBlock("block: empty feasibility interval for z_11");

    // stationarity of the reduced objective: psi(z11) = L(z11) - 2 L(z12) + L(z22)
    // with L = f', strictly decreasing, +inf at lo and -inf at hi
    const auto L = [](long double x) { return std::log1p(1.0L / x); };
    const long double ratio = n1 / n;
    long double z = static_cast<long double>(A1) * static_cast<long double>(A1) /
                    (n1 * A1 + n * A2);  // independence value of the big block
    const long double width = hi - lo;
    z = std::clamp(z, lo + 0.05L * width, hi - 0.05L * width);

    long double blo = lo, bhi = hi;
    for (int it = 0; it < 200; ++it) {
        const long double z12 = z12_of(z), z22 = z22_of(z);
        const long double p = L(z) - 2.0L * L(z12) + L(z22);
        const long double dp = -1.0L / (z * (z + 1.0L)) -
                               2.0L * ratio / (z12 * (z12 + 1.0L)) -
                               ratio * ratio / (z22 * (z22 + 1.0L));
        if (p > 0.0L)
            blo = std::max(blo, z);
        else
            bhi = std::min(bhi, z);
        long double next = z - p / dp;
        if (!(next > blo && next < bhi)) next = 0.5L * (blo + bhi);
        const long double step = std::abs(next - z);
        z = next;
        if (step <= static_cast<long double>(tol) * std::max<long double>(1.0L, std::abs(z)))
            break;
    }

    const long double z12 = z12_of(z), z22 = z22_of(z);
    BlockTypicalResult out;
    out.z_big_big = static_cast<double>(z);
    out.z_big_small = static_cast<double>(z12);
    out.z_small_small = static_cast<double>(z22);
    // O(n^2) sum of O(1) terms: accumulate in long double so g keeps >= 10
    // significant digits even at n = 10^6
    const long double g =
        n * n * entropy_l(z22) + 2.0L * n * n1 * entropy_l(z12) + n1 * n1 * entropy_l(z);
    out.g_value = static_cast<double>(g);
    out.params = params;
    return out;
}

BarvinokBounds barvinok_bounds(const MarginPair& margins, double gamma,
                               const SolveOptions& opts) {
    const TypicalTableResult sol = solve_typical(margins, opts);
    BarvinokBounds b;
    b.upper = sol.g_value;
    const double N = static_cast<double>(sol.Z.margins.total);
    const double penalty =
        N > 0.0 ? gamma * static_cast<double>(sol.Z.m + sol.Z.n) * std::log(N) : 0.0;
    b.lower = sol.g_value - penalty;
    return b;
}

}  // namespace contab
