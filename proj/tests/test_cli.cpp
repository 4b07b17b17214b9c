// Drives the installed command-line binary through std::system and checks
// exit codes, output shapes, config handling, and byte-level determinism.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(TFA_CLI_PATH) + " " + args + " 2>/dev/null";
    int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "tfa_cli_test" / name;
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("symbol table grids and the singular-line filter") {
    auto d = fresh_dir("sym");
    CHECK(run("symbol-table --out " + d.string() +
              " --steps1 3 --steps2 1 --steps3 1") == 0);
    std::string csv = slurp(d / "symbol_table.csv");
    CHECK(line_count(csv) == 4);  // header plus three points
    CHECK(csv.substr(0, csv.find('\n')) == "xi1,xi2,xi3,m_plus,m_sgn");

    // the 3x1x1 grid over [-1,1] has one row on xi1 = 0; with xi2 = xi3 = -1
    // and beta = 2 that row is not singular, so pin the singular line instead
    auto d2 = fresh_dir("sym2");
    CHECK(run("symbol-table --out " + d2.string() +
              " --steps1 3 --steps2 1 --steps3 1 --grid-min 0 --grid-max 0 "
              "--exclude-singular 1") == 0);
    std::string filtered = slurp(d2 / "symbol_table.csv");
    CHECK(line_count(filtered) == 1);  // every point sits on the excluded line

    CHECK(run("symbol-table --out " + d.string() + " --steps1 0") == 1);
    CHECK(run("symbol-table --out " + d.string() + " --beta 1") == 1);
}

TEST_CASE("empty inputs are validation errors") {
    auto d = fresh_dir("empty");
    CHECK(run("maximal-test --out " + d.string() + " --n-list ,") == 1);
    CHECK(run("maximal-test --out " + d.string() +
              " --domain-lo 2 --domain-hi 2") == 1);
    CHECK(run("coeff-decay --out " + d.string() + " --cases ,") == 1);
    CHECK(run("identity-check --out " + d.string() + " --widths ,") == 1);
    CHECK(run("rwt --out " + d.string() + " --tile-count 0") == 1);
    CHECK(run("tilenorm-test --out " + d.string() + " --tile-count 0") == 1);
    CHECK(run("norm-sweep --out " + d.string() + " --trials 0") == 1);
}

TEST_CASE("exponent gate rejection surfaces as a validation error") {
    auto d = fresh_dir("gate");
    CHECK(run("norm-sweep --out " + d.string() +
              " --p1 2 --p2 1.3333333333333333 --p3 1.3333333333333333") == 1);
}

TEST_CASE("norm sweep emits rows and holds dilation invariance") {
    auto d = fresh_dir("sweep");
    CHECK(run("norm-sweep --out " + d.string() +
              " --trials 3 --kmax 4 --grid-n 128 --dilate 2") == 0);
    std::string csv = slurp(d / "norm_sweep.csv");
    CHECK(line_count(csv) == 4);
    CHECK(csv.substr(0, 5) == "trial");
}

TEST_CASE("maximal battery passes its covering check and reruns identically") {
    auto a = fresh_dir("mxa");
    auto b = fresh_dir("mxb");
    std::string flags = " --grid-J 4 --domain-hi 2 --n-list 1,3,8 --seed 42";
    CHECK(run("maximal-test --out " + a.string() + flags) == 0);
    CHECK(run("maximal-test --out " + b.string() + flags) == 0);
    CHECK(slurp(a / "maximal_test.csv") == slurp(b / "maximal_test.csv"));
    auto ma = nlohmann::json::parse(slurp(a / "maximal-test_manifest.json"));
    auto mb = nlohmann::json::parse(slurp(b / "maximal-test_manifest.json"));
    CHECK(ma["config_hash"] == mb["config_hash"]);
    CHECK(ma["seed"] == 42);
    CHECK(ma["outputs"] == nlohmann::json::array({"maximal_test.csv"}));
}

TEST_CASE("config file values load and flags override them") {
    auto d = fresh_dir("cfg");
    fs::create_directories(d);
    {
        std::ofstream f(d / "run.cfg");
        f << "# comment\nsteps1 = 5\nsteps2=1\nsteps3=1\n";
    }
    CHECK(run("symbol-table --out " + d.string() + " --config " +
              (d / "run.cfg").string()) == 0);
    CHECK(line_count(slurp(d / "symbol_table.csv")) == 6);

    CHECK(run("symbol-table --out " + d.string() + " --config " +
              (d / "run.cfg").string() + " --steps1 2") == 0);
    CHECK(line_count(slurp(d / "symbol_table.csv")) == 3);

    {
        std::ofstream f(d / "run.json");
        f << "{\"steps1\": 4, \"steps2\": 1, \"steps3\": 1}\n";
    }
    CHECK(run("symbol-table --out " + d.string() + " --config " +
              (d / "run.json").string()) == 0);
    CHECK(line_count(slurp(d / "symbol_table.csv")) == 5);

    {
        std::ofstream f(d / "bad.cfg");
        f << "no_such_key=1\n";
    }
    CHECK(run("symbol-table --out " + d.string() + " --config " +
              (d / "bad.cfg").string()) == 1);
    CHECK(run("symbol-table --out " + d.string() + " --format xml") == 1);
}

TEST_CASE("restricted weak type run reports and reruns identically") {
    auto a = fresh_dir("rwta");
    auto b = fresh_dir("rwtb");
    std::string flags = " --format json --seed 7 --tile-count 8";
    CHECK(run("rwt --out " + a.string() + flags) == 0);
    CHECK(run("rwt --out " + b.string() + flags) == 0);
    std::string ja = slurp(a / "rwt.json");
    CHECK(ja == slurp(b / "rwt.json"));
    auto parsed = nlohmann::json::parse(ja);
    CHECK(parsed["e4_prime_measure"].get<double>() >=
          0.5 * parsed["e4_measure"].get<double>());
    CHECK(parsed["recombine_error"].get<double>() <= 1e-10);
}

TEST_CASE("stratification run writes a parsable report") {
    auto d = fresh_dir("tn");
    CHECK(run("tilenorm-test --out " + d.string() +
              " --tile-count 24 --seed 5") == 0);
    auto j = nlohmann::json::parse(slurp(d / "tilenorm_test.json"));
    CHECK(j.contains("strata"));
    CHECK(j["total_size"].get<double>() >= 0);
}
