#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "contab/errors.hpp"
#include "contab/margins.hpp"

using namespace contab;

TEST_CASE("validate accepts matching totals and fills total") {
    MarginPair mp = validate({4, 2, 1}, {3, 2, 2});
    CHECK(mp.total == 7);
    CHECK(mp.m() == 3);
    CHECK(mp.n() == 3);
}

TEST_CASE("validate accepts zero entries and zero totals") {
    CHECK(validate({0, 3}, {1, 1, 1}).total == 3);
    CHECK(validate({0, 0}, {0}).total == 0);
}

TEST_CASE("validate rejects bad input") {
    CHECK_THROWS_AS(validate({}, {1}), EmptyMargin);
    CHECK_THROWS_AS(validate({1}, {}), EmptyMargin);
    CHECK_THROWS_AS(validate({2, 1}, {1, 1}), SumMismatch);
    CHECK_THROWS_AS(validate({-1, 3}, {1, 1}), InvalidMargins);
}

TEST_CASE("snapped_floor snaps near-integers before flooring") {
    // 1000^(1/3) lands a few ulps below 10; a bare floor would give 9
    CHECK(snapped_floor(std::pow(1000.0, 1.0 / 3.0)) == 10);
    CHECK(snapped_floor(2.5) == 2);
    CHECK(snapped_floor(3.0) == 3);
    CHECK(snapped_floor(3.0 - 1e-13) == 3);
    CHECK(snapped_floor(3.0 + 1e-13) == 3);
    CHECK(snapped_floor(0.9999) == 0);
}

TEST_CASE("block_count uses the snapped power") {
    CHECK(block_count({100, 0.5, 1, 1}) == 10);
    CHECK(block_count({1000, 1.0 / 3.0, 1, 1}) == 10);
    CHECK(block_count({50, 0.0, 1, 1}) == 1);  // n^0 = 1
}

TEST_CASE("validate_params guards the parameter domain") {
    CHECK_NOTHROW(validate_params({100, 0.5, 2.0, 1.0}));
    CHECK_THROWS_AS(validate_params({0, 0.5, 1, 1}), DomainError);
    CHECK_THROWS_AS(validate_params({100, -0.1, 1, 1}), DomainError);
    CHECK_THROWS_AS(validate_params({100, 1.0, 1, 1}), DomainError);
    CHECK_THROWS_AS(validate_params({100, 0.5, 0.0, 1}), DomainError);
    CHECK_THROWS_AS(validate_params({100, 0.5, 1, 0.0}), DomainError);
    // floor(Cn) = 0 would create all-zero small margins
    CHECK_THROWS_AS(validate_params({1, 0.5, 1, 0.5}), DegenerateMargin);
}

TEST_CASE("barvinok_margins structure") {
    const BarvinokParams p{100, 0.5, 2.0, 1.0};
    MarginPair mp = barvinok_margins(p);
    const std::int64_t n1 = block_count(p);
    CHECK(n1 == 10);
    REQUIRE(mp.rows.size() == static_cast<std::size_t>(n1 + p.n));
    CHECK(mp.rows == mp.cols);
    for (std::int64_t i = 0; i < n1; ++i) CHECK(mp.rows[i] == 200);
    for (std::size_t i = n1; i < mp.rows.size(); ++i) CHECK(mp.rows[i] == 100);
}

TEST_CASE("barvinok_margins invariants across a parameter grid") {
    for (std::int64_t n : {5, 20, 100, 333}) {
        for (double delta : {0.0, 0.3, 0.5, 0.7}) {
            for (double B : {1.0, 2.0, 3.5}) {
                for (double C : {0.5, 1.0, 2.0}) {
                    const BarvinokParams p{n, delta, B, C};
                    if (snapped_floor(C * static_cast<double>(n)) == 0) continue;
                    MarginPair mp = barvinok_margins(p);
                    // self-consistent totals (validate re-derives them)
                    MarginPair again = validate(mp.rows, mp.cols);
                    CHECK(again.total == mp.total);
                    CHECK(mp.rows.size() ==
                          static_cast<std::size_t>(block_count(p) + n));
                    CHECK(std::is_sorted(mp.rows.rbegin(), mp.rows.rend()));
                    CHECK(total_sum(p) == mp.total);
                    CHECK(total_sum(p) ==
                          std::accumulate(mp.rows.begin(), mp.rows.end(),
                                          std::int64_t{0}));
                }
            }
        }
    }
}
