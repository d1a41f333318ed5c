// contab: count contingency tables, evaluate the independence heuristic,
// solve for typical tables, and sweep the phase transition in B.
//
// Exit codes: 0 success, 1 invalid input, 2 resource limit,
//             3 convergence failure, 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contab/asymptotics.hpp"
#include "contab/errors.hpp"
#include "contab/exact_count.hpp"
#include "contab/heuristic.hpp"
#include "contab/io.hpp"
#include "contab/margins.hpp"
#include "contab/typical.hpp"

using nlohmann::json;
using namespace contab;

namespace {

constexpr double kLn2 = 0.6931471805599453;

// ---------------------------------------------------------------------------
// plumbing

struct CommonArgs {
    std::string format;  // per-subcommand default
    std::string out_path;
    int digits = 17;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& c, const std::string& default_format,
                const std::vector<std::string>& formats) {
    c.format = default_format;
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember(formats));
    cmd->add_option("--out", c.out_path, "write output to this file instead of stdout");
    cmd->add_option("--digits", c.digits, "significant digits for text/csv numbers")
        ->check(CLI::Range(1, 17));
    cmd->add_option("--jobs", c.jobs, "max concurrent workers for scans and verify")
        ->check(CLI::Range(1, 256));
}

void emit(const CommonArgs& c, const std::string& payload) {
    if (c.out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(c.out_path);
    if (!out) throw Error("cannot open output file: " + c.out_path);
    out << payload;
}

// Rounds v to the requested significant digits so JSON output honors --digits
// (17 means bit-exact round trip and is left untouched).
double with_digits(double v, int digits) {
    if (digits >= 17 || !std::isfinite(v)) return v;
    return std::strtod(format_double(v, digits).c_str(), nullptr);
}

std::string fmt(double v, const CommonArgs& c) { return format_double(v, c.digits); }

// Margin sources: inline lists, a file, or structured (n, delta, B, C) margins.
struct MarginArgs {
    std::vector<std::int64_t> rows, cols;
    std::string margins_file;
    std::int64_t n = 0;
    double delta = 0.5, B = 1.0, C = 1.0;
    bool n_given = false;
};

void add_margin_flags(CLI::App* cmd, MarginArgs& a, bool structured_only = false) {
    if (!structured_only) {
        cmd->add_option("--rows", a.rows, "row margins")->delimiter(',');
        cmd->add_option("--cols", a.cols, "column margins")->delimiter(',');
        cmd->add_option("--margins-file", a.margins_file,
                        "margins file, JSON {\"rows\":[..],\"cols\":[..]} or record m,n,r...,c...");
    }
    auto* n_opt = cmd->add_option("--n", a.n, "structured margins: base size n (enables --delta/--B/--C)");
    n_opt->check(CLI::PositiveNumber);
    cmd->callback([&a, n_opt]() { a.n_given = n_opt->count() > 0; });
    cmd->add_option("--delta", a.delta, "structured margins: exponent delta in [0,1)");
    cmd->add_option("--B", a.B, "structured margins: bump factor B > 0");
    cmd->add_option("--C", a.C, "structured margins: density C > 0");
}

BarvinokParams resolve_params(const MarginArgs& a) {
    if (!a.n_given)
        throw DomainError("this operation needs structured margins: pass --n (with --delta/--B/--C)");
    BarvinokParams p{a.n, a.delta, a.B, a.C};
    validate_params(p);
    return p;
}

MarginPair resolve_margins(const MarginArgs& a) {
    const bool inline_given = !a.rows.empty() || !a.cols.empty();
    const int sources = int(inline_given) + int(!a.margins_file.empty()) + int(a.n_given);
    if (sources > 1)
        throw InvalidMargins("give margins one way only: --rows/--cols, --margins-file, or --n");
    if (!a.margins_file.empty()) return load_margins_file(a.margins_file);
    if (inline_given) {
        if (a.rows.empty() || a.cols.empty())
            throw InvalidMargins("--rows and --cols must be given together");
        return validate(a.rows, a.cols);
    }
    if (a.n_given) return barvinok_margins(resolve_params(a));
    throw InvalidMargins("no margins given: use --rows/--cols, --margins-file, or --n");
}

// Runs tasks with at most `jobs` in flight; results keep task order.
template <typename T>
std::vector<T> run_batched(int jobs, std::vector<std::function<T()>>& tasks) {
    std::vector<T> out(tasks.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = tasks[i]();
        return out;
    }
    std::size_t i = 0;
    while (i < tasks.size()) {
        const std::size_t batch = std::min<std::size_t>(jobs, tasks.size() - i);
        std::vector<std::future<T>> futs;
        futs.reserve(batch);
        for (std::size_t k = 0; k < batch; ++k)
            futs.push_back(std::async(std::launch::async, tasks[i + k]));
        for (std::size_t k = 0; k < batch; ++k) out[i + k] = futs[k].get();
        i += batch;
    }
    return out;
}

// 6-significant-digit scientific notation for an arbitrarily large count,
// driven by its (natural) log so the integer never has to fit in a double.
std::string scientific6(double log_value) {
    const double log10v = log_value / std::log(10.0);
    double expo = std::floor(log10v);
    double mant = std::pow(10.0, log10v - expo);
    if (mant >= 9.999995) {  // rounding would carry into a new digit
        mant /= 10.0;
        expo += 1.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5fe%+03d", mant, static_cast<int>(expo));
    return buf;
}

std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

// ---------------------------------------------------------------------------
// count

struct CountArgs {
    MarginArgs margins;
    CommonArgs common;
    std::size_t max_states = CountOptions{}.max_states;
    bool log2_out = false;
};

int cmd_count(const CountArgs& a) {
    const MarginPair mp = resolve_margins(a.margins);
    CountOptions opts;
    opts.max_states = a.max_states;
    const TableCount tc = count_tables(mp, opts);
    const double lg = log_count(tc);
    const std::string exact = tc.value.str();
    const std::string sci = scientific6(lg);

    std::string payload;
    if (a.common.format == "text") {
        payload = exact + "\n" + sci + "\n";
        if (a.log2_out) payload += "log2 = " + fmt(lg / kLn2, a.common) + "\n";
    } else if (a.common.format == "json") {
        json j;
        j["rows"] = mp.rows;
        j["cols"] = mp.cols;
        j["count"] = exact;
        j["scientific"] = sci;
        j["log_count"] = with_digits(lg, a.common.digits);
        if (a.log2_out) j["log2_count"] = with_digits(lg / kLn2, a.common.digits);
        payload = j.dump() + "\n";
    } else {  // csv
        payload = "count,scientific,log_count\n" + exact + "," + sci + "," + fmt(lg, a.common) + "\n";
    }
    emit(a.common, payload);
    return 0;
}

// ---------------------------------------------------------------------------
// heuristic

struct HeuristicArgs {
    MarginArgs margins;
    CommonArgs common;
    bool exact = false;
    bool with_count = false;
    bool log2_out = false;
    std::size_t max_states = CountOptions{}.max_states;
};

int cmd_heuristic(const HeuristicArgs& a) {
    const MarginPair mp = resolve_margins(a.margins);
    std::optional<BarvinokParams> params;
    if (a.margins.n_given) params = resolve_params(a.margins);

    double log_G;
    std::optional<std::string> exact_str;
    if (a.exact) {
        const HeuristicValue hv = independence_heuristic(mp, HeuristicMode::Exact);
        log_G = hv.log_value;
        exact_str = hv.exact->str();
    } else if (params && !a.with_count) {
        log_G = barvinok_log_heuristic(*params);
    } else {
        log_G = independence_heuristic(mp, HeuristicMode::Log).log_value;
    }

    std::optional<CorrelationReport> rep;
    if (a.with_count) {
        CountOptions copts;
        copts.max_states = a.max_states;
        const double log_T = log_count(mp, copts);
        CorrelationReport r;
        r.log_T = log_T;
        r.log_G = log_G;
        r.log_ratio = log_T - log_G;
        if (params)
            r.normalized = r.log_ratio /
                           std::pow(static_cast<double>(params->n), 1.0 + params->delta);
        rep = r;
    }

    std::string payload;
    if (a.common.format == "json") {
        json j;
        j["log_G"] = with_digits(log_G, a.common.digits);
        if (exact_str) j["exact"] = *exact_str;
        if (a.log2_out) j["log2_G"] = with_digits(log_G / kLn2, a.common.digits);
        if (rep) {
            j["log_T"] = with_digits(rep->log_T, a.common.digits);
            j["log_ratio"] = with_digits(rep->log_ratio, a.common.digits);
            if (rep->normalized) j["normalized"] = with_digits(*rep->normalized, a.common.digits);
        }
        payload = j.dump() + "\n";
    } else {  // csv
        payload = "log_G,log_T,log_ratio,normalized\n";
        payload += fmt(log_G, a.common);
        payload += ",";
        if (rep) payload += fmt(rep->log_T, a.common);
        payload += ",";
        if (rep) payload += fmt(rep->log_ratio, a.common);
        payload += ",";
        if (rep && rep->normalized) payload += fmt(*rep->normalized, a.common);
        payload += "\n";
    }
    emit(a.common, payload);
    return 0;
}

// ---------------------------------------------------------------------------
// typical / bounds

struct TypicalArgs {
    MarginArgs margins;
    CommonArgs common;
    SolveOptions opts;
    bool block = false;
};

// Full-matrix solves materialize an (m x n) table; refuse sizes where that
// stops being a desk-scale object.
constexpr std::size_t kMaxFullSide = 4000;

int cmd_typical(const TypicalArgs& a) {
    std::string payload;
    if (a.block) {
        const BarvinokParams p = resolve_params(a.margins);
        const BlockTypicalResult r = solve_block_typical(p);
        if (a.common.format == "json") {
            json j;
            j["z_blocks"] = {{"big_big", with_digits(r.z_big_big, a.common.digits)},
                             {"big_small", with_digits(r.z_big_small, a.common.digits)},
                             {"small_small", with_digits(r.z_small_small, a.common.digits)}};
            j["g_value"] = with_digits(r.g_value, a.common.digits);
            j["n"] = p.n;
            j["delta"] = p.delta;
            j["B"] = p.B;
            j["C"] = p.C;
            payload = j.dump() + "\n";
        } else {
            payload = "z_big_big,z_big_small,z_small_small,g_value\n" +
                      fmt(r.z_big_big, a.common) + "," + fmt(r.z_big_small, a.common) + "," +
                      fmt(r.z_small_small, a.common) + "," + fmt(r.g_value, a.common) + "\n";
        }
        emit(a.common, payload);
        return 0;
    }

    const MarginPair mp = resolve_margins(a.margins);
    if (mp.m() > kMaxFullSide || mp.n() > kMaxFullSide)
        throw ResourceLimit("full-matrix typical solve beyond " +
                            std::to_string(kMaxFullSide) + " rows/cols; use --block");
    const TypicalTableResult r = solve_typical(mp, a.opts);
    if (a.common.format == "json") {
        json j;
        j["g_value"] = with_digits(r.g_value, a.common.digits);
        j["iterations"] = r.iterations;
        j["residual"] = with_digits(r.residual, a.common.digits);
        j["stationarity"] = with_digits(r.stationarity, a.common.digits);
        j["row_duals"] = json::array();
        for (double v : r.row_duals) j["row_duals"].push_back(with_digits(v, a.common.digits));
        j["col_duals"] = json::array();
        for (double v : r.col_duals) j["col_duals"].push_back(with_digits(v, a.common.digits));
        json rowsj = json::array();
        for (std::size_t i = 0; i < r.Z.m; ++i) {
            json rowj = json::array();
            for (std::size_t jx = 0; jx < r.Z.n; ++jx)
                rowj.push_back(with_digits(r.Z.at(i, jx), a.common.digits));
            rowsj.push_back(std::move(rowj));
        }
        j["matrix"] = std::move(rowsj);
        payload = j.dump() + "\n";
    } else {  // csv: the matrix itself
        std::string s;
        for (std::size_t i = 0; i < r.Z.m; ++i) {
            for (std::size_t jx = 0; jx < r.Z.n; ++jx) {
                if (jx) s += ",";
                s += fmt(r.Z.at(i, jx), a.common);
            }
            s += "\n";
        }
        payload = std::move(s);
    }
    emit(a.common, payload);
    return 0;
}

struct BoundsArgs {
    MarginArgs margins;
    CommonArgs common;
    SolveOptions opts;
    double gamma = 1.0;
};

int cmd_bounds(const BoundsArgs& a) {
    const MarginPair mp = resolve_margins(a.margins);
    if (mp.m() > kMaxFullSide || mp.n() > kMaxFullSide)
        throw ResourceLimit("bounds need a full-matrix solve; margins too large");
    const BarvinokBounds b = barvinok_bounds(mp, a.gamma, a.opts);
    std::string payload;
    if (a.common.format == "json") {
        json j;
        j["lower"] = with_digits(b.lower, a.common.digits);
        j["upper"] = with_digits(b.upper, a.common.digits);
        j["gamma"] = a.gamma;
        payload = j.dump() + "\n";
    } else {
        payload = "lower,upper,gamma\n" + fmt(b.lower, a.common) + "," + fmt(b.upper, a.common) +
                  "," + fmt(a.gamma, a.common) + "\n";
    }
    emit(a.common, payload);
    return 0;
}

// ---------------------------------------------------------------------------
// scan / figure

struct ScanArgs {
    CommonArgs common;
    double C = 1.0, delta = 0.5;
    double B_min = 1.0, B_max = 4.0;
    int B_steps = 31;
    std::vector<std::int64_t> n_list{1000};
    SolveOptions opts;
};

// Uniform grid over [lo, hi] with the exact critical B spliced in (the
// second-difference locator in the figure tests needs the kink to be a grid
// point; a uniform grid can miss it by nearly a full step).
std::vector<double> b_grid_with_critical(double lo, double hi, int steps, double bc) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k < steps; ++k)
        grid.push_back(lo + (hi - lo) * static_cast<double>(k) / (steps - 1));
    if (bc > lo && bc < hi) {
        bool present = false;
        for (double b : grid)
            if (std::abs(b - bc) <= 1e-12) present = true;
        if (!present) {
            grid.push_back(bc);
            std::sort(grid.begin(), grid.end());
        }
    }
    return grid;
}

struct ScanRow {
    double B = 0.0;
    Regime regime = Regime::Subcritical;
    double lambda = 0.0;
    std::vector<double> surrogates;  // aligned with n_list
    std::string error;
};

int cmd_scan(const ScanArgs& a) {
    if (a.B_min <= 0 || a.B_max <= a.B_min) throw DomainError("scan needs 0 < B-min < B-max");
    if (a.B_steps < 2) throw DomainError("scan needs --B-steps >= 2");
    if (a.C <= 0) throw DomainError("scan needs C > 0");
    if (a.delta < 0 || a.delta >= 1) throw DomainError("scan needs delta in [0,1)");
    if (a.n_list.empty() || a.n_list.front() < 1)
        throw DomainError("--n-list entries must be >= 1");
    for (std::size_t i = 0; i + 1 < a.n_list.size(); ++i)
        if (a.n_list[i] >= a.n_list[i + 1])
            throw DomainError("--n-list must be strictly increasing");

    const double bc = critical_b(a.C);
    const std::vector<double> grid = b_grid_with_critical(a.B_min, a.B_max, a.B_steps, bc);

    std::vector<std::function<ScanRow()>> tasks;
    tasks.reserve(grid.size());
    for (double B : grid) {
        tasks.push_back([B, &a]() {
            ScanRow row;
            row.B = B;
            row.surrogates.assign(a.n_list.size(), std::nan(""));
            try {
                row.regime = classify_phase(B, a.C).regime;
                row.lambda = correlation_exponent(B, a.C);
                for (std::size_t i = 0; i < a.n_list.size(); ++i) {
                    const BarvinokParams p{a.n_list[i], a.delta, B, a.C};
                    validate_params(p);
                    const double g = (p.n > 500)
                        ? solve_block_typical(p).g_value
                        : solve_typical(barvinok_margins(p), a.opts).g_value;
                    const double log_G = barvinok_log_heuristic(p);
                    row.surrogates[i] =
                        (g - log_G) / std::pow(static_cast<double>(p.n), 1.0 + p.delta);
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        });
    }
    std::vector<ScanRow> rows = run_batched(a.common.jobs, tasks);

    std::string payload;
    if (a.common.format == "csv") {
        std::string s = "B,is_critical,regime,lambda";
        for (std::int64_t n : a.n_list) s += ",surrogate_n" + std::to_string(n);
        s += ",error\n";
        for (const ScanRow& r : rows) {
            s += fmt(r.B, a.common);
            s += r.regime == Regime::Critical ? ",1," : ",0,";
            s += regime_name(r.regime);
            s += "," + fmt(r.lambda, a.common);
            for (double v : r.surrogates) s += "," + fmt(v, a.common);
            s += "," + csv_safe(r.error) + "\n";
        }
        payload = std::move(s);
    } else {  // json
        json j;
        j["C"] = a.C;
        j["delta"] = a.delta;
        j["B_c"] = bc;
        json arr = json::array();
        for (const ScanRow& r : rows) {
            json row;
            row["B"] = r.B;
            row["is_critical"] = r.regime == Regime::Critical;
            row["regime"] = regime_name(r.regime);
            row["lambda"] = with_digits(r.lambda, a.common.digits);
            json surr = json::object();
            for (std::size_t i = 0; i < a.n_list.size(); ++i)
                surr[std::to_string(a.n_list[i])] = with_digits(r.surrogates[i], a.common.digits);
            row["surrogates"] = std::move(surr);
            if (!r.error.empty()) row["error"] = r.error;
            arr.push_back(std::move(row));
        }
        j["rows"] = std::move(arr);
        payload = j.dump() + "\n";
    }
    emit(a.common, payload);
    return 0;
}

struct FigureArgs {
    CommonArgs common;
    std::vector<double> C_list{0.5, 1.0, 2.0};
    double B_min = 1.0, B_max = 4.0;
    int B_steps = 301;
};

int cmd_figure(const FigureArgs& a) {
    if (a.B_min <= 0 || a.B_max <= a.B_min) throw DomainError("figure needs 0 < B-min < B-max");
    if (a.B_steps < 2) throw DomainError("figure needs --B-steps >= 2");
    if (a.C_list.empty()) throw DomainError("figure needs at least one C");

    std::string csv = "C,B,lambda\n";
    json arr = json::array();
    for (double C : a.C_list) {
        if (C <= 0) throw DomainError("figure needs C > 0");
        const double bc = critical_b(C);
        for (double B : b_grid_with_critical(a.B_min, a.B_max, a.B_steps, bc)) {
            const double lam = correlation_exponent(B, C);
            if (a.common.format == "csv") {
                csv += fmt(C, a.common) + "," + fmt(B, a.common) + "," + fmt(lam, a.common) + "\n";
            } else {
                json row;
                row["C"] = C;
                row["B"] = B;
                row["lambda"] = with_digits(lam, a.common.digits);
                arr.push_back(std::move(row));
            }
        }
    }
    if (a.common.format == "csv") {
        emit(a.common, csv);
    } else {
        json j;
        j["rows"] = std::move(arr);
        emit(a.common, j.dump() + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    CommonArgs common;
    std::string suite = "all";
    std::uint32_t seed = 12345;
    SolveOptions opts;
    std::size_t max_states = CountOptions{}.max_states;
    bool as_printed = false;
};

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

using CheckFn = std::function<std::string()>;  // "" = pass, otherwise failure detail

// Random margins with m,n <= 8 and every margin in [1, 50]: sample a table
// with entries in [0, floor(50/max(m,n))] and read off its margins, so the
// pair is feasible by construction; resample if any line is empty.
MarginPair random_margins(std::mt19937& rng) {
    std::uniform_int_distribution<int> dim(1, 8);
    for (;;) {
        const int m = dim(rng), n = dim(rng);
        const int cap = std::max(1, 50 / std::max(m, n));
        std::uniform_int_distribution<int> entry(0, cap);
        std::vector<std::int64_t> rows(m, 0), cols(n, 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const int v = entry(rng);
                rows[i] += v;
                cols[j] += v;
            }
        bool degenerate = false;
        for (std::int64_t r : rows) degenerate |= (r == 0);
        for (std::int64_t c : cols) degenerate |= (c == 0);
        if (!degenerate) return validate(rows, cols);
    }
}

std::string check_near(double got, double want, double tol, const std::string& what) {
    if (std::abs(got - want) <= tol) return "";
    return what + ": got " + format_double(got, 17) + ", want " + format_double(want, 17) +
           " (tol " + format_double(tol, 3) + ")";
}

std::string check_le(double lhs, double rhs, const std::string& what) {
    if (lhs <= rhs) return "";
    return what + ": " + format_double(lhs, 17) + " > " + format_double(rhs, 17);
}

void counting_checks(std::vector<std::pair<std::string, CheckFn>>& checks,
                     const VerifyArgs& a) {
    CountOptions copts;
    copts.max_states = a.max_states;

    checks.emplace_back("counting: dp matches enumeration exhaustively (m,n<=3, N<=6)",
                        [copts]() -> std::string {
        // all margin pairs with sides up to 3 and total up to 6, zeros included
        std::vector<std::vector<std::int64_t>> by_total[7];
        for (int m = 1; m <= 3; ++m) {
            std::vector<std::int64_t> v(m, 0);
            const std::function<void(int, int)> rec = [&](int idx, int left) {
                if (idx == m - 1) {
                    v[idx] = left;
                    by_total[std::accumulate(v.begin(), v.end(), std::int64_t{0})].push_back(v);
                    return;
                }
                for (int t = 0; t <= left; ++t) {
                    v[idx] = t;
                    rec(idx + 1, left - t);
                }
            };
            for (int total = 0; total <= 6; ++total) rec(0, total);
        }
        long pairs = 0;
        for (int total = 0; total <= 6; ++total) {
            for (const auto& rows : by_total[total])
                for (const auto& cols : by_total[total]) {
                    const MarginPair mp = validate(rows, cols);
                    std::uint64_t brute = 0;
                    enumerate_tables(mp, UINT64_MAX, [&](const Table&) {
                        ++brute;
                        return true;
                    });
                    const TableCount tc = count_tables(mp, copts);
                    if (tc.value != brute)
                        return "mismatch at " + margins_to_record(mp) + ": dp " +
                               tc.value.str() + " vs brute " + std::to_string(brute);
                    ++pairs;
                }
        }
        return pairs > 2000 ? "" : "suspiciously few pairs enumerated";
    });

    checks.emplace_back("counting: known values (2, 1, 21)", [copts]() -> std::string {
        if (count_tables(validate({1, 1}, {1, 1}), copts).value != 2) return "T((1,1),(1,1)) != 2";
        if (count_tables(validate({592}, {592}), copts).value != 1) return "T((592),(592)) != 1";
        if (count_tables(validate({2, 2, 2}, {2, 2, 2}), copts).value != 21)
            return "T((2,2,2),(2,2,2)) != 21";
        return "";
    });

    checks.emplace_back("counting: transpose symmetry", [copts]() -> std::string {
        const auto t1 = count_tables(validate({4, 2, 1}, {3, 2, 2}), copts).value;
        const auto t2 = count_tables(validate({3, 2, 2}, {4, 2, 1}), copts).value;
        if (t1 != t2) return "T(a,b) != T(b,a) on ((4,2,1),(3,2,2))";
        const auto t3 = count_tables(validate({10, 5}, {7, 4, 4}), copts).value;
        const auto t4 = count_tables(validate({7, 4, 4}, {10, 5}), copts).value;
        return t3 == t4 ? "" : "T(a,b) != T(b,a) on ((10,5),(7,4,4))";
    });

    checks.emplace_back("counting: margin permutation invariance", [copts]() -> std::string {
        const auto t1 = count_tables(validate({4, 2, 1}, {3, 2, 2}), copts).value;
        const auto t2 = count_tables(validate({1, 4, 2}, {2, 3, 2}), copts).value;
        return t1 == t2 ? "" : "count changed under margin permutation";
    });

    checks.emplace_back("counting: zero-total margins count one empty table",
                        [copts]() -> std::string {
        const auto t = count_tables(validate({0, 0}, {0}), copts).value;
        return t == 1 ? "" : "T((0,0),(0)) != 1";
    });
}

void typical_checks(std::vector<std::pair<std::string, CheckFn>>& checks,
                    const VerifyArgs& a) {
    // The solver runs with the user-supplied tolerances, but the assertions
    // below are the module contracts with their own fixed thresholds — a
    // deliberately corrupted --tol-margin makes this suite fail rather than
    // silently relaxing the contract.
    const SolveOptions opts = a.opts;
    const std::uint32_t seed = a.seed;

    checks.emplace_back("typical: margin residual <= 1e-10 on 20 random instances",
                        [opts, seed]() -> std::string {
        std::mt19937 rng(seed);
        for (int k = 0; k < 20; ++k) {
            const MarginPair mp = random_margins(rng);
            const TypicalTableResult r = solve_typical(mp, opts);
            if (const auto d = check_le(r.residual, 1e-10,
                                        "residual on " + margins_to_record(mp));
                !d.empty())
                return d;
        }
        return "";
    });

    checks.emplace_back("typical: dual stationarity <= 1e-8 on 20 random instances",
                        [opts, seed]() -> std::string {
        std::mt19937 rng(seed);
        for (int k = 0; k < 20; ++k) {
            const MarginPair mp = random_margins(rng);
            const TypicalTableResult r = solve_typical(mp, opts);
            if (const auto d = check_le(r.stationarity, 1e-8,
                                        "stationarity on " + margins_to_record(mp));
                !d.empty())
                return d;
        }
        return "";
    });

    checks.emplace_back("typical: g(Z) >= g(W) and g(W) >= log G - 1e-9",
                        [opts, seed]() -> std::string {
        std::mt19937 rng(seed + 1);
        for (int k = 0; k < 20; ++k) {
            const MarginPair mp = random_margins(rng);
            const TypicalTableResult r = solve_typical(mp, opts);
            const double gW = table_entropy(independence_table(mp));
            const double log_G = independence_heuristic(mp, HeuristicMode::Log).log_value;
            if (const auto d = check_le(gW, r.g_value + 1e-9,
                                        "g(W) <= g(Z) on " + margins_to_record(mp));
                !d.empty())
                return d;
            if (const auto d = check_le(log_G - 1e-9, gW,
                                        "log G <= g(W) on " + margins_to_record(mp));
                !d.empty())
                return d;
        }
        return "";
    });

    checks.emplace_back("typical: entropy sandwich contains log T on a small instance",
                        [opts]() -> std::string {
        const MarginPair mp = validate({4, 2, 1}, {3, 2, 2});
        const double log_T = log_count(mp);
        const BarvinokBounds b = barvinok_bounds(mp, 1.0, opts);
        if (const auto d = check_le(b.lower, log_T + 1e-9, "lower <= log T"); !d.empty())
            return d;
        return check_le(log_T, b.upper + 1e-9, "log T <= upper");
    });

    checks.emplace_back("typical: block and full solver agree (n=50, d=0.5, B=2, C=1)",
                        [opts]() -> std::string {
        const BarvinokParams p{50, 0.5, 2.0, 1.0};
        const BlockTypicalResult blk = solve_block_typical(p);
        const TypicalTableResult full = solve_typical(barvinok_margins(p), opts);
        const std::int64_t n1 = block_count(p);
        const double z11 = full.Z.at(0, 0);
        const double z12 = full.Z.at(0, static_cast<std::size_t>(n1));
        const double z22 = full.Z.at(static_cast<std::size_t>(n1), static_cast<std::size_t>(n1));
        if (const auto d = check_near(z11, blk.z_big_big, 1e-7, "z11"); !d.empty()) return d;
        if (const auto d = check_near(z12, blk.z_big_small, 1e-7, "z12"); !d.empty()) return d;
        if (const auto d = check_near(z22, blk.z_small_small, 1e-7, "z22"); !d.empty()) return d;
        const double rel = std::abs(full.g_value - blk.g_value) /
                           std::max(1.0, std::abs(blk.g_value));
        return check_le(rel, 1e-6, "relative g gap");
    });

    checks.emplace_back("typical: zero margins produce exact zero lines",
                        [opts]() -> std::string {
        const TypicalTableResult r = solve_typical(validate({3, 0, 2}, {0, 4, 1}), opts);
        for (std::size_t j = 0; j < r.Z.n; ++j)
            if (r.Z.at(1, j) != 0.0) return "zero row not exactly zero";
        for (std::size_t i = 0; i < r.Z.m; ++i)
            if (r.Z.at(i, 0) != 0.0) return "zero column not exactly zero";
        return check_le(r.residual, 1e-10, "residual with stripped lines");
    });
}

void asymptotics_checks(std::vector<std::pair<std::string, CheckFn>>& checks,
                        const VerifyArgs& a) {
    checks.emplace_back("asymptotics: lambda vanishes below B_c, grows beyond",
                        []() -> std::string {
        for (double C : {0.5, 1.0, 2.0}) {
            const double bc = critical_b(C);
            for (int k = 1; k <= 10; ++k) {
                const double below = correlation_exponent(bc * k / 10.5, C);
                if (below != 0.0) return "lambda != 0 below B_c";
            }
            double prev = 0.0;
            for (int k = 1; k <= 10; ++k) {
                const double lam = correlation_exponent(bc + 0.3 * k, C);
                if (lam <= prev) return "lambda not strictly increasing past B_c";
                prev = lam;
            }
        }
        return "";
    });

    checks.emplace_back("asymptotics: lambda continuous at B_c", []() -> std::string {
        for (double C : {0.5, 1.0, 2.0}) {
            const double bc = critical_b(C);
            const double just_above = correlation_exponent(bc + 1e-8, C);
            if (const auto d = check_le(just_above, 1e-12, "lambda(B_c + 1e-8)"); !d.empty())
                return d;
        }
        return "";
    });

    checks.emplace_back("asymptotics: closed-form derivative matches finite differences",
                        []() -> std::string {
        for (double C : {0.5, 1.0, 2.0}) {
            const double bc = critical_b(C);
            for (double B : {bc + 0.1, bc + 1.0, 10.0}) {
                const double h = 1e-7;
                const double fd =
                    (correlation_exponent(B + h, C) - correlation_exponent(B - h, C)) / (2 * h);
                const double closed = correlation_exponent_derivatives(B, C).first;
                if (const auto d = check_near(closed, fd, 1e-7, "dlambda/dB"); !d.empty())
                    return d;
            }
        }
        return "";
    });

    checks.emplace_back("asymptotics: second derivative limit at B_c", []() -> std::string {
        for (double C : {0.5, 1.0, 2.0}) {
            const double bc = critical_b(C);
            const double got = correlation_exponent_derivatives(bc + 2e-12, C).second;
            const double want = 2 * C / (bc * (bc * C + 1));
            if (const auto d = check_near(got, want, 1e-10, "d2lambda/dB2 at B_c+"); !d.empty())
                return d;
        }
        return "";
    });

    checks.emplace_back("asymptotics: coefficient gap equals lambda (B=3, C=1)",
                        []() -> std::string {
        const BarvinokParams p{1000, 0.5, 3.0, 1.0};
        const ExpansionReport main_rep = log_count_prediction(p, 1000);
        const ExpansionReport ih_rep = heuristic_prediction(p, 1000);
        const double gap = ih_rep.terms[1].coefficient - main_rep.terms[1].coefficient;
        return check_near(-gap, correlation_exponent(3.0, 1.0), 1e-13, "coefficient gap");
    });

    checks.emplace_back("asymptotics: normalized expansion residuals stay bounded",
                        [as_printed = a.as_printed]() -> std::string {
        const std::vector<std::int64_t> ns{1000, 10000, 100000};
        const ExpansionCheck prop =
            verify_expansion(ExpansionKind::Entropy, BarvinokParams{1000, 0.7, 1.0, 1.0}, ns);
        if (!prop.bounded) return "entropy-expansion ratio " + format_double(prop.ratio, 4);
        // --as-printed swaps in the published variant of the heuristic's
        // n^(1+delta) coefficient; a longer n-grid makes its spurious
        // n^(1+delta) residual growth overrun the allowed spread, so this
        // check goes red by design under that flag
        const std::vector<std::int64_t> ih_ns =
            as_printed ? std::vector<std::int64_t>{1000, 10000, 100000, 1000000, 10000000}
                       : ns;
        const ExpansionCheck ih = verify_expansion(
            ExpansionKind::Heuristic, BarvinokParams{1000, 0.5, 2.0, 1.0}, ih_ns, as_printed);
        if (!ih.bounded) return "heuristic-expansion ratio " + format_double(ih.ratio, 4);
        const ExpansionCheck main_chk =
            verify_expansion(ExpansionKind::LogCount, BarvinokParams{1000, 0.5, 4.0, 1.0}, ns);
        if (!main_chk.bounded) return "count-expansion ratio " + format_double(main_chk.ratio, 4);
        return "";
    });

    checks.emplace_back("asymptotics: critical point classification and guards",
                        []() -> std::string {
        const double bc = critical_b(1.0);
        if (classify_phase(bc, 1.0).regime != Regime::Critical)
            return "B_c not classified critical";
        try {
            subcritical_constants(bc, 1.0);
            return "subcritical_constants accepted the critical point";
        } catch (const CriticalPoint&) {
        }
        try {
            correlation_exponent_derivatives(2.0, 1.0);
            return "derivatives accepted a subcritical B";
        } catch (const DomainError&) {
        }
        return "";
    });

    checks.emplace_back("asymptotics: second-difference kink sits at B_c (C=1)",
                        []() -> std::string {
        const double C = 1.0, bc = critical_b(C);
        const std::vector<double> grid = b_grid_with_critical(1.0, 4.0, 301, bc);
        std::vector<double> lam(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) lam[i] = correlation_exponent(grid[i], C);
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            // divided second difference handles the non-uniform spacing
            const double h1 = grid[i] - grid[i - 1], h2 = grid[i + 1] - grid[i];
            const double d2 = 2.0 * (h1 * lam[i + 1] - (h1 + h2) * lam[i] + h2 * lam[i - 1]) /
                              (h1 * h2 * (h1 + h2));
            if (d2 > best) {
                best = d2;
                best_i = i;
            }
        }
        const double step = 3.0 / 300.0;
        return check_le(std::abs(grid[best_i] - bc), step + 1e-12, "kink offset");
    });
}

int cmd_verify(const VerifyArgs& a) {
    std::vector<std::pair<std::string, CheckFn>> named;
    if (a.suite == "all" || a.suite == "counting") counting_checks(named, a);
    if (a.suite == "all" || a.suite == "typical") typical_checks(named, a);
    if (a.suite == "all" || a.suite == "asymptotics") asymptotics_checks(named, a);
    if (named.empty()) throw DomainError("unknown verify suite: " + a.suite);

    std::vector<std::function<CheckResult()>> tasks;
    tasks.reserve(named.size());
    for (auto& [name, fn] : named) {
        tasks.push_back([name = name, fn = std::move(fn)]() {
            CheckResult r;
            r.name = name;
            try {
                r.detail = fn();
                r.ok = r.detail.empty();
            } catch (const std::exception& e) {
                r.ok = false;
                r.detail = std::string("exception: ") + e.what();
            }
            return r;
        });
    }
    const std::vector<CheckResult> results = run_batched(a.common.jobs, tasks);

    int passed = 0;
    for (const CheckResult& r : results) passed += r.ok;
    const bool all_ok = passed == static_cast<int>(results.size());

    std::string payload;
    if (a.common.format == "tap") {
        std::string s = "1.." + std::to_string(results.size()) + "\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const CheckResult& r = results[i];
            s += (r.ok ? "ok " : "not ok ") + std::to_string(i + 1) + " - " + r.name;
            if (!r.ok) s += " # " + r.detail;
            s += "\n";
        }
        s += "# passed " + std::to_string(passed) + "/" + std::to_string(results.size()) + "\n";
        payload = std::move(s);
    } else if (a.common.format == "json") {
        json j;
        j["suite"] = a.suite;
        j["total"] = results.size();
        j["passed"] = passed;
        json arr = json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            json c;
            c["id"] = i + 1;
            c["name"] = results[i].name;
            c["ok"] = results[i].ok;
            if (!results[i].ok) c["detail"] = results[i].detail;
            arr.push_back(std::move(c));
        }
        j["checks"] = std::move(arr);
        payload = j.dump() + "\n";
    } else {  // csv
        std::string s = "id,name,ok,detail\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            s += std::to_string(i + 1) + "," + csv_safe(results[i].name) + "," +
                 (results[i].ok ? "1" : "0") + "," + csv_safe(results[i].detail) + "\n";
        payload = std::move(s);
    }
    emit(a.common, payload);
    return all_ok ? 0 : 4;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
    CLI::App app{"contingency-table toolkit: exact counts, independence heuristic, "
                 "typical tables, and phase-transition scans"};
    app.require_subcommand(1);

    CountArgs count_args;
    auto* count_cmd = app.add_subcommand("count", "exact number of tables with given margins");
    add_margin_flags(count_cmd, count_args.margins);
    add_common(count_cmd, count_args.common, "text", {"text", "json", "csv"});
    count_cmd->add_option("--max-states", count_args.max_states, "live-state cap for the DP");
    count_cmd->add_flag("--log2", count_args.log2_out, "also report the base-2 log");

    HeuristicArgs heur_args;
    auto* heur_cmd = app.add_subcommand("heuristic", "independence heuristic G(a,b)");
    add_margin_flags(heur_cmd, heur_args.margins);
    add_common(heur_cmd, heur_args.common, "json", {"json", "csv"});
    heur_cmd->add_flag("--exact", heur_args.exact, "carry the exact rational value");
    heur_cmd->add_flag("--count", heur_args.with_count,
                       "also count tables exactly and report the correlation ratio");
    heur_cmd->add_option("--max-states", heur_args.max_states, "live-state cap for --count");
    heur_cmd->add_flag("--log2", heur_args.log2_out, "also report the base-2 log");

    TypicalArgs typ_args;
    auto* typ_cmd = app.add_subcommand("typical", "entropy-maximizing real table Z");
    add_margin_flags(typ_cmd, typ_args.margins);
    add_common(typ_cmd, typ_args.common, "json", {"json", "csv"});
    typ_cmd->add_flag("--block", typ_args.block,
                      "symmetry-reduced three-block solve (structured margins only)");
    typ_cmd->add_option("--tol-margin", typ_args.opts.tol_margin, "margin residual tolerance");
    typ_cmd->add_option("--tol-dual", typ_args.opts.tol_dual, "stationarity tolerance");
    typ_cmd->add_option("--max-iter", typ_args.opts.max_iter, "max dual sweeps");

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "entropy sandwich for log T");
    add_margin_flags(bounds_cmd, bounds_args.margins);
    add_common(bounds_cmd, bounds_args.common, "json", {"json", "csv"});
    bounds_cmd->add_option("--gamma", bounds_args.gamma, "penalty factor gamma in the lower bound");
    bounds_cmd->add_option("--tol-margin", bounds_args.opts.tol_margin, "margin residual tolerance");
    bounds_cmd->add_option("--tol-dual", bounds_args.opts.tol_dual, "stationarity tolerance");
    bounds_cmd->add_option("--max-iter", bounds_args.opts.max_iter, "max dual sweeps");

    ScanArgs scan_args;
    auto* scan_cmd = app.add_subcommand("scan", "sweep B: closed-form lambda and finite-n surrogates");
    add_common(scan_cmd, scan_args.common, "csv", {"csv", "json"});
    scan_cmd->add_option("--C", scan_args.C, "density C > 0");
    scan_cmd->add_option("--delta", scan_args.delta, "exponent delta in [0,1)");
    scan_cmd->add_option("--B-min", scan_args.B_min, "left end of the B grid");
    scan_cmd->add_option("--B-max", scan_args.B_max, "right end of the B grid");
    scan_cmd->add_option("--B-steps", scan_args.B_steps, "grid points (B_c is spliced in)");
    scan_cmd->add_option("--n-list", scan_args.n_list, "sizes n for the surrogates")
        ->delimiter(',');
    scan_cmd->add_option("--tol-margin", scan_args.opts.tol_margin,
                         "margin tolerance for full solves (n <= 500)");
    scan_cmd->add_option("--max-iter", scan_args.opts.max_iter, "max dual sweeps");

    FigureArgs fig_args;
    auto* fig_cmd = app.add_subcommand("figure", "long-format lambda curves for plotting");
    add_common(fig_cmd, fig_args.common, "csv", {"csv", "json"});
    fig_cmd->add_option("--C-list", fig_args.C_list, "densities, one curve each")->delimiter(',');
    fig_cmd->add_option("--B-min", fig_args.B_min, "left end of the B grid");
    fig_cmd->add_option("--B-max", fig_args.B_max, "right end of the B grid");
    fig_cmd->add_option("--B-steps", fig_args.B_steps, "grid points per curve (B_c spliced in)");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites (TAP output)");
    add_common(verify_cmd, verify_args.common, "tap", {"tap", "json", "csv"});
    verify_cmd->add_option("suite", verify_args.suite, "all|counting|typical|asymptotics")
        ->check(CLI::IsMember({"all", "counting", "typical", "asymptotics"}));
    verify_cmd->add_option("--seed", verify_args.seed, "seed for random fixtures");
    verify_cmd->add_option("--tol-margin", verify_args.opts.tol_margin,
                           "solver margin tolerance (assertions keep fixed thresholds)");
    verify_cmd->add_option("--tol-dual", verify_args.opts.tol_dual, "solver stationarity tolerance");
    verify_cmd->add_option("--max-iter", verify_args.opts.max_iter, "max dual sweeps");
    verify_cmd->add_option("--max-states", verify_args.max_states, "live-state cap for counting");
    verify_cmd->add_flag("--as-printed", verify_args.as_printed,
                         "use the as-printed heuristic coefficient over an extended n-grid; its "
                         "normalized residuals grow without bound, so the expansion check fails by design");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return 1;     // uniform "invalid input" code
    }

    if (count_cmd->parsed()) return cmd_count(count_args);
    if (heur_cmd->parsed()) return cmd_heuristic(heur_args);
    if (typ_cmd->parsed()) return cmd_typical(typ_args);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_args);
    if (scan_cmd->parsed()) return cmd_scan(scan_args);
    if (fig_cmd->parsed()) return cmd_figure(fig_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ResourceLimit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ExactOverflow& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InfeasibleBlock& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
