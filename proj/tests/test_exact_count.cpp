#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "contab/errors.hpp"
#include "contab/exact_count.hpp"
#include "contab/margins.hpp"

using namespace contab;

namespace {

BigInt count(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols,
             const CountOptions& opts = {}) {
    return count_tables(validate(std::move(rows), std::move(cols)), opts).value;
}

// All ordered ways to write `total` as `parts` nonnegative integers.
void compositions(std::int64_t total, int parts, std::vector<std::int64_t>& cur,
                  std::vector<std::vector<std::int64_t>>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::int64_t v = 0; v <= total; ++v) {
        cur.push_back(v);
        compositions(total - v, parts - 1, cur, out);
        cur.pop_back();
    }
}

BigInt binomial(std::int64_t n, std::int64_t k) {
    BigInt r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

}  // namespace

TEST_CASE("known small counts") {
    CHECK(count({1, 1}, {1, 1}) == 2);
    CHECK(count({2, 2, 2}, {2, 2, 2}) == 21);   // 3x3 magic-ish constant 2
    CHECK(count({1, 1, 1}, {1, 1, 1}) == 6);    // permutation matrices
    CHECK(count({4, 3}, {2, 2, 2, 1}) == 13);
    CHECK(count({5}, {2, 3}) == 1);             // single row is forced
    CHECK(count({2, 3}, {5}) == 1);             // single column is forced
    CHECK(count({0, 0}, {0}) == 1);             // one empty table
    CHECK(count({0, 3}, {1, 1, 1}) == 1);       // zero row is forced
}

TEST_CASE("counts match the brute-force oracle exhaustively (m,n <= 3, N <= 7)") {
    for (std::int64_t N = 0; N <= 7; ++N) {
        std::vector<std::vector<std::int64_t>> sides;
        std::vector<std::int64_t> scratch;
        for (int parts = 1; parts <= 3; ++parts)
            compositions(N, parts, scratch, sides);
        for (const auto& rows : sides) {
            for (const auto& cols : sides) {
                const MarginPair mp = validate(rows, cols);
                std::uint64_t seen = 0;
                enumerate_tables(mp, UINT64_MAX, [&](const Table&) {
                    ++seen;
                    return true;
                });
                CHECK(count_tables(mp).value == seen);
            }
        }
    }
}

TEST_CASE("transpose symmetry") {
    CHECK(count({7, 4, 2}, {5, 5, 3}) == count({5, 5, 3}, {7, 4, 2}));
    CHECK(count({9, 1}, {3, 3, 2, 2}) == count({3, 3, 2, 2}, {9, 1}));
    CHECK(count({6, 6, 6, 6}, {8, 8, 8}) == count({8, 8, 8}, {6, 6, 6, 6}));
}

TEST_CASE("permutation invariance of margins") {
    const BigInt base = count({2, 5, 3}, {4, 1, 5});
    CHECK(count({5, 3, 2}, {4, 1, 5}) == base);
    CHECK(count({3, 2, 5}, {1, 5, 4}) == base);
}

TEST_CASE("two-row counts against the closed form") {
    // With unit column margins the table is determined by which of the n
    // columns feed row one: T((a, n-a), (1,...,1)) = C(n, a).
    std::vector<std::int64_t> ones(12, 1);
    CHECK(count({5, 7}, ones) == binomial(12, 5));
    // forces the u128 accumulator: C(70,35) ~ 1.1e20 > 2^64
    std::vector<std::int64_t> ones70(70, 1);
    CHECK(count({35, 35}, ones70) == binomial(70, 35));
    // forces full big-integer accumulation: C(140,70) ~ 9e40 > 2^128
    std::vector<std::int64_t> ones140(140, 1);
    CHECK(count({70, 70}, ones140) == binomial(140, 70));
}

TEST_CASE("resource cap throws instead of thrashing") {
    CountOptions tiny;
    tiny.max_states = 10;
    CHECK_THROWS_AS(count({20, 18, 17, 15}, {19, 18, 17, 16}, tiny), ResourceLimit);
}

TEST_CASE("key width beyond 126 bits is refused up front") {
    std::vector<std::int64_t> rows(16, 1 << 20), cols(16, 1 << 20);
    CHECK_THROWS_AS(count(rows, cols), ResourceLimit);
}

TEST_CASE("enumerate_tables emits margins-correct tables in ascending order") {
    const MarginPair mp = validate({2, 1}, {1, 1, 1});
    std::vector<Table> all = enumerate_tables(mp, UINT64_MAX);
    CHECK(all.size() == 3);
    std::vector<std::vector<std::int64_t>> flat;
    for (const Table& t : all) {
        REQUIRE(t.entries.size() == 2);
        std::vector<std::int64_t> row_sum(2, 0), col_sum(3, 0), f;
        for (std::size_t i = 0; i < 2; ++i) {
            REQUIRE(t.entries[i].size() == 3);
            for (std::size_t j = 0; j < 3; ++j) {
                row_sum[i] += t.entries[i][j];
                col_sum[j] += t.entries[i][j];
                f.push_back(t.entries[i][j]);
            }
        }
        CHECK(row_sum == mp.rows);
        CHECK(col_sum == mp.cols);
        flat.push_back(std::move(f));
    }
    CHECK(std::is_sorted(flat.begin(), flat.end()));
    CHECK(std::adjacent_find(flat.begin(), flat.end()) == flat.end());
}

TEST_CASE("enumerate_tables respects limit and early stop") {
    const MarginPair mp = validate({2, 2, 2}, {2, 2, 2});
    CHECK(enumerate_tables(mp, 5).size() == 5);
    std::uint64_t seen = 0;
    enumerate_tables(mp, UINT64_MAX, [&](const Table&) { return ++seen < 4; });
    CHECK(seen == 4);
}

TEST_CASE("log_count agrees with the exact value") {
    const TableCount tc = count_tables(validate({2, 2, 2}, {2, 2, 2}));
    CHECK(log_count(tc) == doctest::Approx(std::log(21.0)).epsilon(1e-12));
    CHECK(log_count(validate({1, 1}, {1, 1})) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
}
