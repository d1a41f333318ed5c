#pragma once

// Phase structure and asymptotic expansions for the block margins produced by
// barvinok_margins().  Everything here is closed-form in (B, C, delta, n);
// the heavy lifting (extended-precision evaluation near the critical point)
// lives in the .cpp.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contab/margins.hpp"

namespace contab {

enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime r);

// B_c(C) = 1 + sqrt(1 + 1/C), the location of the second-order phase
// transition in B for fixed C.
double critical_b(double C);

struct PhasePoint {
    double B = 0.0;
    double C = 0.0;
    double B_c = 0.0;
    Regime regime = Regime::Subcritical;
};

// Classifies (B, C).  Points with |B - B_c| <= 1e-12 count as critical.
PhasePoint classify_phase(double B, double C);

// Constants appearing in the third-order term of the subcritical expansion:
//   E = B^2 C (C+1) / ((B_c - B)(B_c + B - 2))
//   D = f(E) + E log((1+C)(BC)^2 / (C (BC+1)^2)) - B^2 C / (2(C+1))
// E diverges as B -> B_c, so requesting these at (or beyond) the critical
// point is an error: CriticalPoint when |B - B_c| <= 1e-12, DomainError when
// B > B_c.
struct SubcriticalConstants {
    double D = 0.0;
    double E = 0.0;
};

SubcriticalConstants subcritical_constants(double B, double C);

// The correlation exponent lambda(B, C) >= 0: log rho ~ -lambda n^{1+delta}
// where rho = T/G.  Identically zero for B <= B_c; for B > B_c
//   lambda = C (B - B_c) log(1 + 1/C) - 2 (f(BC) - f(B_c C)).
// Continuous with two continuous derivatives at B = B_c (second-order
// transition); evaluated in 50-digit arithmetic internally because the two
// halves cancel to ~n^{-2} scale just above B_c.
double correlation_exponent(double B, double C);

struct ExponentDerivatives {
    double first = 0.0;   // d lambda / dB   = C log(1+1/C) - 2 C log(1+1/(BC))
    double second = 0.0;  // d^2 lambda / dB^2 = 2C / (B (BC + 1))
};

// Requires B strictly beyond the critical point (DomainError otherwise).
ExponentDerivatives correlation_exponent_derivatives(double B, double C);

// One term of an asymptotic expansion: value = coefficient * (order at n).
struct ExpansionTerm {
    std::string order;   // e.g. "n^2", "n^(1+delta)", "n^(2delta)"
    double coefficient = 0.0;
    double value = 0.0;
};

struct ExpansionReport {
    std::int64_t n = 0;
    Regime regime = Regime::Subcritical;
    std::vector<ExpansionTerm> terms;
    double predicted_total = 0.0;         // sum of term values
    std::string error_order;              // e.g. "n^(3delta-1) + n log n"
    std::optional<double> computed;       // filled by verify_expansion
    std::optional<double> residual;       // computed - predicted_total
    std::optional<double> normalized;     // residual / error_order(n)
};

// Expansion of log T for the block margins.  Subcritical: three terms with
// error n^(3delta-1) + n log n.  At or beyond the critical point: two terms
// (the n^(1+delta) coefficient freezes at its value at B_c) with error
// n^(2delta) + n log n.  The critical point itself is reported with
// regime = Critical but uses the two-term form, since the subcritical third
// term diverges there.
ExpansionReport log_count_prediction(const BarvinokParams& params, std::int64_t n);

// Expansion of log G (the independence heuristic) for the same margins,
// valid for every B > 0: three terms, error n^(3delta-1) + n log n.
// as_printed = true reproduces a published variant of the n^(1+delta)
// coefficient with f(BC) in place of 2 f(BC); it fails the growth test and
// is kept only so the discrepancy can be demonstrated.
ExpansionReport heuristic_prediction(const BarvinokParams& params, std::int64_t n,
                              bool as_printed = false);

// Expansion of g(Z) (the typical-table entropy, i.e. what solve_block_typical
// maximizes).  Same terms as the log-count expansion but with tighter error:
// n^(3delta-1) + n below the critical point, n^(2delta) at or above it.
ExpansionReport entropy_prediction(const BarvinokParams& params, std::int64_t n);

enum class ExpansionKind { LogCount, Heuristic, Entropy };

struct ExpansionCheck {
    std::vector<ExpansionReport> reports;  // one per n, ascending
    bool bounded = false;  // ratio <= 20
    double ratio = 0.0;    // max |normalized| / min |normalized|
};

// Evaluates the chosen expansion against a directly computed value for each n
// in n_list: g from solve_block_typical for LogCount and Entropy, log G from
// barvinok_log_heuristic for IH.  The residuals divided by the claimed error
// order must stay bounded as n grows; `bounded` reports whether the spread of
// those normalized residuals stays within a factor of 20.
ExpansionCheck verify_expansion(ExpansionKind kind, const BarvinokParams& params,
                                const std::vector<std::int64_t>& n_list,
                                bool as_printed = false);

}  // namespace contab
