#include "contab/exact_count.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "contab/errors.hpp"

namespace contab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mix64(u64 x) {
    // splitmix64 finisher; packed keys are highly clustered without it
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

u64 hash_key(u64 k) { return mix64(k); }
u64 hash_key(u128 k) { return mix64(static_cast<u64>(k) ^ (mix64(static_cast<u64>(k >> 64)))); }

// Open-addressing map from packed residual vectors to counts.  Node-based
// std::unordered_map is several times slower and fatter; DP layers here can
// reach millions of states.
template <class K, class V>
class FlatMap {
  public:
    static constexpr K kEmpty = ~K(0);

    explicit FlatMap(std::size_t expect = 16) { rehash(slots_for(expect)); }

    std::size_t size() const { return size_; }

    void add(K key, const V& delta) {
        if ((size_ + 1) * 5 > keys_.size() * 3) rehash(keys_.size() * 2);
        std::size_t i = static_cast<std::size_t>(hash_key(key)) & mask_;
        while (true) {
            if (keys_[i] == kEmpty) {
                keys_[i] = key;
                vals_[i] = delta;
                ++size_;
                return;
            }
            if (keys_[i] == key) {
                vals_[i] += delta;
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) f(keys_[i], vals_[i]);
    }

    void reset(std::size_t expect) {
        keys_.assign(slots_for(expect), kEmpty);
        vals_.assign(keys_.size(), V{});
        mask_ = keys_.size() - 1;
        size_ = 0;
    }

  private:
    static std::size_t slots_for(std::size_t expect) {
        std::size_t s = 16;
        while (s * 3 < expect * 5) s <<= 1;  // keep load factor under 0.6
        return s;
    }

    void rehash(std::size_t new_slots) {
        std::vector<K> old_keys = std::move(keys_);
        std::vector<V> old_vals = std::move(vals_);
        keys_.assign(std::max<std::size_t>(new_slots, 16), kEmpty);
        vals_.assign(keys_.size(), V{});
        mask_ = keys_.size() - 1;
        size_ = 0;
        for (std::size_t i = 0; i < old_keys.size(); ++i) {
            if (old_keys[i] == kEmpty) continue;
            std::size_t j = static_cast<std::size_t>(hash_key(old_keys[i])) & mask_;
            while (keys_[j] != kEmpty) j = (j + 1) & mask_;
            keys_[j] = old_keys[i];
            vals_[j] = std::move(old_vals[i]);
            ++size_;
        }
    }

    std::vector<K> keys_;
    std::vector<V> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

// Counts stay exact through a promotion ladder: u64 and u128 accumulators
// signal overflow (caller restarts one level wider), cpp_int never does.
struct OverflowSignal {};

inline void checked_add(u64& acc, u64 v) {
    if (__builtin_add_overflow(acc, v, &acc)) throw OverflowSignal{};
}
inline void checked_add(u128& acc, u128 v) {
    if (__builtin_add_overflow(acc, v, &acc)) throw OverflowSignal{};
}
inline void checked_add(BigInt& acc, const BigInt& v) { acc += v; }

template <class V>
struct Checked {
    V v{};
    Checked() = default;
    explicit Checked(u64 x) : v(x) {}
    Checked& operator+=(const Checked& o) {
        checked_add(v, o.v);
        return *this;
    }
};

BigInt to_bigint(u64 v) { return BigInt(v); }
BigInt to_bigint(u128 v) {
    BigInt hi(static_cast<u64>(v >> 64));
    return (hi << 64) | BigInt(static_cast<u64>(v));
}
BigInt to_bigint(const BigInt& v) { return v; }

struct DpProblem {
    std::vector<std::int64_t> state_side;  // sorted descending
    std::vector<std::int64_t> col_side;    // sorted descending
    int digit_bits;                        // per-digit width of the packed key
};

template <class K>
K pack(const std::vector<std::int64_t>& r, int kb) {
    K key = 0;
    for (std::size_t i = r.size(); i-- > 0;) key = (key << kb) | static_cast<K>(r[i]);
    return key;
}

// Column-by-column DP over residual row-margin vectors.  Every key in a
// layer shares the same digit sum (the unspent total), so the budget already
// spent inside a column is a function of the key's sum; states never need to
// carry it.  The column transition is a nested DP over rows: level i has
// rows 0..i-2 finished, row i-1 still absorbing units one at a time, rows
// >= i untouched.  Because a unit spend moves a key from sum-bucket s+1 to
// s, processing buckets in descending sum order keeps just two buckets per
// level live at once — the full mid-column state set (which is far larger
// than any inter-column layer) never has to exist in memory.
template <class K, class V>
BigInt run_dp(const DpProblem& prob, const CountOptions& opts) {
    const int m = static_cast<int>(prob.state_side.size());
    const int kb = prob.digit_bits;
    const K dmask = (K(1) << kb) - 1;

    using Map = FlatMap<K, Checked<V>>;
    Map cur;
    cur.add(pack<K>(prob.state_side, kb), Checked<V>(1));

    std::int64_t layer_sum = 0;
    for (auto v : prob.state_side) layer_sum += v;

    std::vector<std::int64_t> digits(m);
    std::vector<Map> lvl_prev(m + 1), lvl_cur(m + 1);  // [1..m]

    const auto live_states = [&]() {
        std::size_t total = cur.size();
        for (int i = 1; i <= m; ++i) total += lvl_prev[i].size() + lvl_cur[i].size();
        return total;
    };

    const std::size_t kcols = prob.col_side.size();
    for (std::size_t j = 0; j < kcols; ++j) {
        const std::int64_t b = prob.col_side[j];
        // merging permuted states is valid only while the columns still to
        // come are exchangeable; with a descending column order that is
        // exactly when the next column margin equals the last one
        const bool canonical =
            (j + 1 >= kcols) || (prob.col_side[j + 1] == prob.col_side.back());

        if (b == 0) {  // nothing to spend; at most re-canonicalize the layer
            if (canonical) {
                Map merged(cur.size());
                cur.for_each([&](K key, const Checked<V>& cnt) {
                    for (int k = 0; k < m; ++k)
                        digits[k] = static_cast<std::int64_t>((key >> (k * kb)) & dmask);
                    std::sort(digits.begin(), digits.end(), std::greater<>());
                    merged.add(pack<K>(digits, kb), cnt);
                });
                cur = std::move(merged);
            }
            continue;
        }

        const std::int64_t target_sum = layer_sum - b;

        for (std::int64_t s = layer_sum; s >= target_sum; --s) {
            const std::int64_t needed = b - (layer_sum - s);
            const bool final_bucket = (s == target_sum);

            for (int i = 1; i <= m; ++i) {
                const bool finalize = final_bucket && i == m && canonical;
                // a key is dead unless rows >= i-1 can still absorb `needed`
                const auto insert = [&](Map& dst, K key, const Checked<V>& cnt) {
                    std::int64_t capacity = 0;
                    for (int k = 0; k < m; ++k) {
                        digits[k] = static_cast<std::int64_t>((key >> (k * kb)) & dmask);
                        if (k >= i - 1) capacity += digits[k];
                    }
                    if (capacity < needed) return;
                    if (finalize) {
                        std::sort(digits.begin(), digits.end(), std::greater<>());
                        key = pack<K>(digits, kb);
                    }
                    dst.add(key, cnt);
                };

                const std::size_t expect =
                    (i == 1 ? (s == layer_sum ? cur.size() : 0) : lvl_cur[i - 1].size()) +
                    lvl_prev[i].size();
                Map dst(expect);
                // rows 0..i-2 closed at this sum: carry level i-1 over
                if (i == 1) {
                    if (s == layer_sum)
                        cur.for_each([&](K k, const Checked<V>& c) { insert(dst, k, c); });
                } else {
                    lvl_cur[i - 1].for_each([&](K k, const Checked<V>& c) { insert(dst, k, c); });
                }
                // one more unit onto row i-1: arrivals from the bucket above
                const int shift = (i - 1) * kb;
                lvl_prev[i].for_each([&](K k, const Checked<V>& c) {
                    if (((k >> shift) & dmask) > 0) insert(dst, k - (K(1) << shift), c);
                });
                lvl_cur[i] = std::move(dst);
                if (live_states() > opts.max_states)
                    throw ResourceLimit("count: live DP states exceeded cap of " +
                                        std::to_string(opts.max_states));
            }
            if (s == layer_sum) cur = Map(0);  // consumed by the top bucket
            std::swap(lvl_prev, lvl_cur);
            for (int i = 1; i <= m; ++i) lvl_cur[i] = Map(0);
        }

        cur = std::move(lvl_prev[m]);
        for (int i = 1; i <= m; ++i) lvl_prev[i] = Map(0);
        layer_sum = target_sum;
    }

    BigInt total = 0;
    cur.for_each([&](K, const Checked<V>& cnt) { total += to_bigint(cnt.v); });
    return total;
}

template <class K>
BigInt run_with_promotion(const DpProblem& prob, const CountOptions& opts) {
    try {
        return run_dp<K, u64>(prob, opts);
    } catch (const OverflowSignal&) {
    }
    try {
        return run_dp<K, u128>(prob, opts);
    } catch (const OverflowSignal&) {
    }
    return run_dp<K, BigInt>(prob, opts);
}

}  // namespace

TableCount count_tables(const MarginPair& margins, const CountOptions& opts) {
    // Re-validate defensively: a MarginPair constructed by hand could bypass
    // validate(), and the DP below assumes consistent totals.
    MarginPair checked = validate(margins.rows, margins.cols);

    if (checked.total == 0) return TableCount{BigInt(1), margins};

    DpProblem prob;
    if (checked.m() <= checked.n()) {
        prob.state_side = checked.rows;
        prob.col_side = checked.cols;
    } else {
        prob.state_side = checked.cols;
        prob.col_side = checked.rows;
    }
    std::sort(prob.state_side.begin(), prob.state_side.end(), std::greater<>());
    std::sort(prob.col_side.begin(), prob.col_side.end(), std::greater<>());

    // Fixed-width packing must address the whole product space; round the
    // digit width up to whole bits so extraction is shift-and-mask, and pick
    // the narrowest key type that fits, sparing room for the empty sentinel.
    int kb = 1;
    while ((std::int64_t(1) << kb) <= prob.state_side.front()) ++kb;
    prob.digit_bits = kb;
    const int bits = static_cast<int>(prob.state_side.size()) * kb;
    BigInt value;
    if (bits < 63)
        value = run_with_promotion<u64>(prob, opts);
    else if (bits < 127)
        value = run_with_promotion<u128>(prob, opts);
    else
        throw ResourceLimit("count: residual state space needs more than 126 bits of key");

    return TableCount{std::move(value), margins};
}

namespace {

void enumerate_rec(const MarginPair& mp, std::vector<std::int64_t>& rrow,
                   std::vector<std::int64_t>& rcol, std::size_t i, std::size_t j, Table& work,
                   std::uint64_t limit, std::uint64_t& emitted, bool& keep_going,
                   const std::function<bool(const Table&)>& sink) {
    if (!keep_going || emitted >= limit) return;
    const std::size_t m = mp.m(), n = mp.n();
    if (i == m) {
        ++emitted;
        if (!sink(work)) keep_going = false;
        return;
    }
    const std::size_t ni = (j + 1 == n) ? i + 1 : i;
    const std::size_t nj = (j + 1 == n) ? 0 : j + 1;
    if (i + 1 == m) {
        // last row: every entry forced by its column residual
        const std::int64_t x = rcol[j];
        if (x > rrow[i]) return;
        rrow[i] -= x;
        rcol[j] = 0;
        work.entries[i][j] = x;
        enumerate_rec(mp, rrow, rcol, ni, nj, work, limit, emitted, keep_going, sink);
        rrow[i] += x;
        rcol[j] = x;
        return;
    }
    if (j + 1 == n) {
        // last column of an interior row: forced by the row residual
        const std::int64_t x = rrow[i];
        if (x > rcol[j]) return;
        rrow[i] = 0;
        rcol[j] -= x;
        work.entries[i][j] = x;
        enumerate_rec(mp, rrow, rcol, ni, nj, work, limit, emitted, keep_going, sink);
        rrow[i] = x;
        rcol[j] += x;
        return;
    }
    // the row residual left after this cell must fit into the later columns
    std::int64_t later = 0;
    for (std::size_t k = j + 1; k < n; ++k) later += rcol[k];
    const std::int64_t lo = std::max<std::int64_t>(0, rrow[i] - later);
    const std::int64_t hi = std::min(rrow[i], rcol[j]);
    for (std::int64_t x = lo; x <= hi && keep_going && emitted < limit; ++x) {
        rrow[i] -= x;
        rcol[j] -= x;
        work.entries[i][j] = x;
        enumerate_rec(mp, rrow, rcol, ni, nj, work, limit, emitted, keep_going, sink);
        rrow[i] += x;
        rcol[j] += x;
    }
}

}  // namespace

void enumerate_tables(const MarginPair& margins, std::uint64_t limit,
                      const std::function<bool(const Table&)>& sink) {
    MarginPair mp = validate(margins.rows, margins.cols);
    std::vector<std::int64_t> rrow = mp.rows, rcol = mp.cols;
    Table work;
    work.entries.assign(mp.m(), std::vector<std::int64_t>(mp.n(), 0));
    std::uint64_t emitted = 0;
    bool keep_going = true;
    enumerate_rec(mp, rrow, rcol, 0, 0, work, limit, emitted, keep_going, sink);
}

std::vector<Table> enumerate_tables(const MarginPair& margins, std::uint64_t limit) {
    std::vector<Table> out;
    enumerate_tables(margins, limit, [&](const Table& t) {
        out.push_back(t);
        return true;
    });
    return out;
}

double log_count(const TableCount& count) {
    using F50 = boost::multiprecision::cpp_bin_float_50;
    if (count.value <= 0) throw DomainError("log_count: count must be positive");
    const F50 v(count.value);
    return static_cast<double>(boost::multiprecision::log(v));
}

double log_count(const MarginPair& margins, const CountOptions& opts) {
    return log_count(count_tables(margins, opts));
}

}  // namespace contab
