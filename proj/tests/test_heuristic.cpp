#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"

#include "contab/errors.hpp"
#include "contab/exact_count.hpp"
#include "contab/heuristic.hpp"
#include "contab/margins.hpp"

using namespace contab;

namespace {

MarginPair random_margins(std::mt19937& rng, int max_side, std::int64_t entry_cap) {
    std::uniform_int_distribution<int> side(1, max_side);
    for (;;) {
        const int m = side(rng), n = side(rng);
        std::uniform_int_distribution<std::int64_t> cell(0, entry_cap);
        std::vector<std::int64_t> rows(m, 0), cols(n, 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const std::int64_t v = cell(rng);
                rows[i] += v;
                cols[j] += v;
            }
        MarginPair mp = validate(rows, cols);
        if (mp.total > 0) return mp;
    }
}

}  // namespace

TEST_CASE("log_multiset_count: exact small values") {
    // C(s+k-1, k-1): 3 parts summing to 5 -> C(7,2) = 21
    CHECK(log_multiset_count(3, 5) == doctest::Approx(std::log(21.0)).epsilon(1e-13));
    CHECK(log_multiset_count(1, 9) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(log_multiset_count(7, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(log_multiset_count(2, 41) == doctest::Approx(std::log(42.0)).epsilon(1e-13));
}

TEST_CASE("log_multiset_count: frozen large-argument reference values") {
    // log C(607, 15) — short side exact-product path
    CHECK(log_multiset_count(16, 592) ==
          doctest::Approx(68.05428453747097106).epsilon(1e-14));
    // log C(1000049, 49) — Stirling path with Binet corrections
    CHECK(log_multiset_count(50, 1000000) ==
          doctest::Approx(532.39549837369254529).epsilon(1e-13));
}

TEST_CASE("exact heuristic value on the 2x2 unit margins") {
    const MarginPair mp = validate({1, 1}, {1, 1});
    const HeuristicValue hv = independence_heuristic(mp, HeuristicMode::Exact);
    REQUIRE(hv.exact.has_value());
    CHECK(*hv.exact == BigRational(8, 5));
    CHECK(hv.log_value == doctest::Approx(std::log(1.6)).epsilon(1e-13));
    CHECK(rational_log(*hv.exact) == doctest::Approx(std::log(1.6)).epsilon(1e-13));
}

TEST_CASE("exact and log modes agree to 1e-10 on random margins") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 60; ++trial) {
        // keep mn <= 64 and N <= 200 so the exact rational stays cheap
        const MarginPair mp = random_margins(rng, 8, 3);
        const HeuristicValue ex = independence_heuristic(mp, HeuristicMode::Exact);
        const HeuristicValue lg = independence_heuristic(mp, HeuristicMode::Log);
        REQUIRE(ex.exact.has_value());
        CHECK(!lg.exact.has_value());
        CHECK(std::abs(rational_log(*ex.exact) - lg.log_value) <= 1e-10);
        CHECK(std::isfinite(lg.log_value));  // G > 0 always
    }
}

TEST_CASE("heuristic is symmetric in the two margin lists") {
    std::mt19937 rng(778);
    for (int trial = 0; trial < 20; ++trial) {
        const MarginPair mp = random_margins(rng, 8, 3);
        const MarginPair swapped = validate(mp.cols, mp.rows);
        const HeuristicValue a = independence_heuristic(mp, HeuristicMode::Exact);
        const HeuristicValue b = independence_heuristic(swapped, HeuristicMode::Exact);
        CHECK(*a.exact == *b.exact);
    }
}

TEST_CASE("log mode matches the three-factor assembly") {
    std::mt19937 rng(779);
    for (int trial = 0; trial < 40; ++trial) {
        const MarginPair mp = random_margins(rng, 8, 3);
        const std::int64_t m = static_cast<std::int64_t>(mp.m());
        const std::int64_t n = static_cast<std::int64_t>(mp.n());
        double assembled = -log_multiset_count(m * n, mp.total);
        for (std::int64_t a : mp.rows) assembled += log_multiset_count(n, a);
        for (std::int64_t b : mp.cols) assembled += log_multiset_count(m, b);
        const HeuristicValue lg = independence_heuristic(mp, HeuristicMode::Log);
        CHECK(std::abs(lg.log_value - assembled) <= 1e-9);
    }
}

TEST_CASE("exact mode refuses oversized instances") {
    std::vector<std::int64_t> rows(21, 1), cols(21, 1);
    const MarginPair mp = validate(rows, cols);
    CHECK_THROWS_AS(independence_heuristic(mp, HeuristicMode::Exact), ExactOverflow);
    CHECK_NOTHROW(independence_heuristic(mp, HeuristicMode::Log));
    HeuristicOptions wide;
    wide.exact_max_cells = 441;
    CHECK_NOTHROW(independence_heuristic(mp, HeuristicMode::Exact, wide));
}

TEST_CASE("closed-form block heuristic matches the generic evaluator") {
    const BarvinokParams p{50, 0.5, 2.0, 1.0};
    const MarginPair mp = barvinok_margins(p);
    const double generic = independence_heuristic(mp, HeuristicMode::Log).log_value;
    const double closed = barvinok_log_heuristic(p);
    CHECK(closed == doctest::Approx(generic).epsilon(1e-11));
}

TEST_CASE("correlation report, exact-count flavor") {
    const MarginPair mp = validate({4, 2, 1}, {3, 2, 2});
    const CorrelationReport rep = correlation_ratio(mp);
    CHECK(rep.log_T == doctest::Approx(std::log(16.0)).epsilon(1e-12));
    CHECK(rep.log_G == doctest::Approx(2.7150188704183016).epsilon(1e-12));
    CHECK(rep.log_ratio == doctest::Approx(rep.log_T - rep.log_G).epsilon(1e-13));
    CHECK(!rep.normalized.has_value());
    CHECK(!rep.upper_bound_surrogate);
}

TEST_CASE("correlation report, surrogate flavor carries the label and scale") {
    const BarvinokParams p{20, 0.5, 2.0, 1.0};
    const MarginPair mp = barvinok_margins(p);
    const CorrelationReport rep = correlation_ratio(mp, 1234.5, p);
    CHECK(rep.upper_bound_surrogate);
    CHECK(rep.log_T == 1234.5);
    REQUIRE(rep.normalized.has_value());
    const double scale = std::pow(20.0, 1.5);
    CHECK(*rep.normalized ==
          doctest::Approx(rep.log_ratio / scale).epsilon(1e-13));
}
