#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#ifndef CONTAB_CLI_PATH
#error "CONTAB_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI with the given arguments, capturing stdout (stderr is left
// alone so failures stay visible in the test log).
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CONTAB_CLI_PATH) + " " + args;
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("count: text output is the exact integer plus scientific form") {
    const RunResult r = run_cli("count --rows 2,2,2 --cols 2,2,2");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "21\n2.10000e+01\n");
}

TEST_CASE("count: json carries the count as a decimal string") {
    const RunResult r = run_cli("count --rows 4,3 --cols 2,2,2,1 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"count\":\"13\"") != std::string::npos);
    CHECK(r.out.find("\"scientific\":\"1.30000e+01\"") != std::string::npos);
}

TEST_CASE("heuristic: exact mode prints a rational") {
    const RunResult r = run_cli("heuristic --rows 1,1 --cols 1,1 --exact");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"exact\":\"8/5\"") != std::string::npos);
}

TEST_CASE("heuristic: --digits rounds the presentation only") {
    const RunResult full = run_cli("heuristic --rows 220,215,93,64 --cols 108,286,71,127");
    const RunResult four = run_cli(
        "heuristic --rows 220,215,93,64 --cols 108,286,71,127 --digits 4");
    CHECK(full.exit_code == 0);
    CHECK(four.exit_code == 0);
    CHECK(full.out.find("34.73037248966726") != std::string::npos);
    CHECK(four.out.find("\"log_G\":34.73") != std::string::npos);
}

TEST_CASE("exit codes: invalid input is 1") {
    CHECK(run_cli("count --rows 2,1 --cols 1,1 2>/dev/null").exit_code == 1);
    CHECK(run_cli("count --rows 1,1 2>/dev/null").exit_code == 1);
    CHECK(run_cli("nonsense 2>/dev/null").exit_code == 1);
    CHECK(run_cli("typical --rows 1,1 --cols 1,1 --n 5 2>/dev/null").exit_code == 1);
}

TEST_CASE("exit codes: help is 0") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("count --help").exit_code == 0);
}

TEST_CASE("exit codes: resource cap is 2") {
    const RunResult r =
        run_cli("count --rows 20,18,17,15 --cols 19,18,17,16 --max-states 10 2>/dev/null");
    CHECK(r.exit_code == 2);
}

TEST_CASE("exit codes: non-convergence is 3") {
    const RunResult r =
        run_cli("typical --rows 50,1,1 --cols 1,1,50 --max-iter 1 2>/dev/null");
    CHECK(r.exit_code == 3);
}

TEST_CASE("verify: passing suite exits 0, fault injection exits 4") {
    const RunResult ok = run_cli("verify counting");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("not ok") == std::string::npos);
    CHECK(ok.out.rfind("1..", 0) == 0);  // TAP plan line first

    const RunResult bad = run_cli("verify typical --tol-margin 10 --max-iter 3");
    CHECK(bad.exit_code == 4);
    CHECK(bad.out.find("not ok") != std::string::npos);
}

TEST_CASE("verify: --as-printed coefficient fails the expansion check by design") {
    const RunResult r = run_cli("verify asymptotics --as-printed");
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("not ok") != std::string::npos);
    CHECK(r.out.find("heuristic-expansion ratio") != std::string::npos);
}

TEST_CASE("typical: json shape and zero-margin null duals") {
    const RunResult r = run_cli("typical --rows 2,0 --cols 1,1 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"g_value\":") != std::string::npos);
    CHECK(r.out.find("\"matrix\":") != std::string::npos);
    CHECK(r.out.find("\"row_duals\":") != std::string::npos);
    CHECK(r.out.find("null") != std::string::npos);  // stripped row dual
}

TEST_CASE("typical: block mode reports the three block values") {
    const RunResult r = run_cli("typical --n 100 --B 2 --C 1 --delta 0.5 --block");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"big_big\":") != std::string::npos);
    CHECK(r.out.find("\"big_small\":") != std::string::npos);
    CHECK(r.out.find("\"small_small\":") != std::string::npos);
}

TEST_CASE("bounds: sandwich endpoints appear in json") {
    const RunResult r = run_cli("bounds --rows 4,2,1 --cols 3,2,2 --gamma 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"lower\":-1.348025868") != std::string::npos);
    CHECK(r.out.find("\"upper\":10.32743502") != std::string::npos);
}

TEST_CASE("figure: csv header, spliced critical rows, zero-then-rising curves") {
    const RunResult r = run_cli("figure --C-list 1 --B-min 1 --B-max 4 --B-steps 31");
    CHECK(r.exit_code == 0);
    const std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "C,B,lambda");
    // 31 grid points plus the inserted critical point
    CHECK(lines.size() == 33);
    bool seen_bc = false;
    double prev_lambda = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        double C, B, lam;
        REQUIRE(std::sscanf(lines[i].c_str(), "%lf,%lf,%lf", &C, &B, &lam) == 3);
        if (std::abs(B - 2.4142135623730951) < 1e-12) seen_bc = true;
        if (B <= 2.4142135623730951) CHECK(lam == 0.0);
        if (B > 2.5) CHECK(lam > prev_lambda);
        prev_lambda = lam;
    }
    CHECK(seen_bc);
}

TEST_CASE("scan: deterministic csv, critical row marked") {
    const std::string args =
        "scan --C 1 --delta 0.5 --B-min 2 --B-max 3 --B-steps 5 --n-list 50,100";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);  // bit-stable across runs
    const std::vector<std::string> lines = lines_of(a.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "B,is_critical,regime,lambda,surrogate_n50,surrogate_n100,error");
    bool any_critical = false;
    for (const std::string& line : lines)
        if (line.find(",1,critical,") != std::string::npos) any_critical = true;
    CHECK(any_critical);
}

TEST_CASE("count: --out writes the same bytes to a file") {
    const std::string path = "cli_out_test.tmp";
    std::remove(path.c_str());
    const RunResult direct = run_cli("count --rows 1,1 --cols 1,1");
    const RunResult filed =
        run_cli("count --rows 1,1 --cols 1,1 --out " + path);
    CHECK(filed.exit_code == 0);
    CHECK(filed.out.empty());
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == direct.out);
    std::remove(path.c_str());
}

TEST_CASE("margins can come from a json file") {
    const std::string path = "cli_margins_test.json";
    {
        std::ofstream out(path);
        out << "{\"rows\":[2,2,2],\"cols\":[2,2,2]}\n";
    }
    const RunResult r = run_cli("count --margins-file " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "21\n2.10000e+01\n");
    std::remove(path.c_str());
}

TEST_CASE("log2 display divides by log 2 at the presentation layer") {
    const RunResult nat = run_cli("count --rows 2,2,2 --cols 2,2,2 --format json");
    const RunResult bin = run_cli("count --rows 2,2,2 --cols 2,2,2 --format json --log2");
    CHECK(nat.out.find("\"log_count\":3.044522437723423") != std::string::npos);
    CHECK(bin.out.find("\"log2_count\":4.392317422778761") != std::string::npos);
}
