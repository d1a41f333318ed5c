#pragma once

#include <cstddef>
#include <vector>

#include "contab/margins.hpp"

namespace contab {

// Dense nonnegative real matrix tied to its margins.
struct RealTable {
    std::size_t m = 0, n = 0;
    std::vector<double> entries;  // row-major, m*n
    MarginPair margins;

    double& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

// f(x) = (x+1)log(x+1) - x log x, the per-entry entropy term, evaluated in
// the cancellation-stable form log(x+1) + x log1p(1/x); f(0) = 0.
double entry_entropy(double x);

// g(X) = sum of f over all entries, compensated (Neumaier) summation.
double table_entropy(const RealTable& X);

// The rank-one independence table w_ij = a_i b_j / N.
RealTable independence_table(const MarginPair& margins);

struct SolveOptions {
    double tol_margin = 1e-10;  // relative, per margin
    double tol_dual = 1e-8;     // stationarity certificate threshold
    int max_iter = 10000;       // dual sweeps (one sweep = all rows + all cols)
    // Optional instrumentation: g(Z) after every sweep.
    std::vector<double>* g_trace = nullptr;
};

struct TypicalTableResult {
    RealTable Z;
    std::vector<double> row_duals;  // lambda_i; +inf on stripped zero rows
    std::vector<double> col_duals;  // mu_j;     +inf on stripped zero cols
    double g_value = 0.0;
    int iterations = 0;     // sweeps used
    double residual = 0.0;  // max relative margin violation of Z
    double stationarity = 0.0;  // max |log(1+1/z_ij) - lambda_i - mu_j|
};

// Maximizes g over the transportation polytope P(a,b).  First-order
// optimality forces log(1 + 1/z_ij) = lambda_i + mu_j, so the solver works
// in the duals: z_ij = 1/(exp(lambda_i + mu_j) - 1), alternating exact
// scalar root-finds per row and per column (safeguarded Newton on a strictly
// decreasing map).  Zero margins are stripped first and reinserted as exact
// zero blocks (their duals are +infinity, consistent with z = 0).
// Throws NoConvergence when max_iter sweeps leave the residual above
// tol_margin.
TypicalTableResult solve_typical(const MarginPair& margins, const SolveOptions& opts = {});

// Symmetry-reduced solver for Barvinok margins: the unique maximizer is
// constant on the three blocks (big x big, big x small twice, small x small),
// so the problem collapses to three unknowns tied by two exact linear margin
// constraints; eliminating two leaves a 1-D strictly concave maximization
// over z_big_big, solved by safeguarded Newton on its derivative.
struct BlockTypicalResult {
    double z_big_big = 0.0;      // z_11
    double z_big_small = 0.0;    // z_{1,n+1}
    double z_small_small = 0.0;  // z_{n+1,n+1}
    double g_value = 0.0;
    BarvinokParams params;
};

BlockTypicalResult solve_block_typical(const BarvinokParams& params, double tol = 1e-12);

// Entropy sandwich of the count: upper = g(Z), lower = g(Z) - gamma(m+n)logN.
struct BarvinokBounds {
    double lower = 0.0;
    double upper = 0.0;
};

BarvinokBounds barvinok_bounds(const MarginPair& margins, double gamma,
                               const SolveOptions& opts = {});

}  // namespace contab
