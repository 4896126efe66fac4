#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hedgepde/commands.hpp"
#include "hedgepde/config.hpp"
#include "hedgepde/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace hedgepde;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hedgepde_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

int run(const std::string& command, const fs::path& config, const fs::path& out, int threads = 1) {
    const std::string line = "HEDGEPDE_THREADS=" + std::to_string(threads) + " '" + HEDGEPDE_BINARY + "' " + command +
                             " --config '" + config.string() + "' --out '" + out.string() + "' >/dev/null 2>&1";
    const int status = std::system(line.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string value_of(const std::string& text, const std::string& key) {
    const auto pos = text.find("\n" + key + "=");
    REQUIRE(pos != std::string::npos);
    const auto start = pos + key.size() + 2;
    return text.substr(start, text.find('\n', start) - start);
}

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.params == ModelParams{});
    CHECK(std::holds_alternative<CallPayoff>(c.payoff));
    CHECK(std::get<CallPayoff>(c.payoff).strike == 1.0);
    CHECK(c.sigma_obs == c.params.sigma1);
    CHECK(c.p_obs == 1.0);
    CHECK(c.n_x == 101);
    CHECK(c.n_z == 101);
    CHECK(c.n_steps == 200);
    CHECK(c.sim.n_paths == 100000);
    CHECK(c.sweep_rhos == kDefaultSweepRhos);
}

TEST_CASE("explicit parameter list matches the defaults exactly") {
    const RunConfig c = parse_config("k = 0.4\ndelta = 2\nsigma1 = 0.153\nmu = 0.7\nsigma0 = 0.01");
    CHECK(c.params == ModelParams{});
    CHECK(c.hash() == parse_config("").hash());
    CHECK(c.hash() == parse_config("# only a comment\n\n   \nk=0.4   # trailing\n").hash());
}

TEST_CASE("config errors carry line numbers") {
    try {
        parse_config("k = 0.4\nrho = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("[-1, 1]") != std::string::npos);
    }
    CHECK(error_line("\n\nfoo = 1") == 3);
    CHECK(error_line("n_x = 10.5") == 1);
    CHECK(error_line("mu = abc") == 1);
    CHECK(error_line("mu 0.5") == 1);
    CHECK(error_line("mu =") == 1);
    CHECK(error_line("n_paths = 99") == 1);
    CHECK(error_line("strategy = greedy") == 1);
    CHECK(error_line("sweep_rhos = 0, 2") == 1);
    CHECK(error_line("mu = 0.1\nx_max = 0.1") == 2);
    CHECK(error_line("p_obs = 100") == 1);
    CHECK(error_line("payoff = tabulated") == 1);
}

TEST_CASE("effective config and hash track every setting") {
    const RunConfig a = parse_config("rho = 0.5\nstrategy = none\nsweep_rhos = 0.25, -0.25");
    CHECK(a.params.rho == 0.5);
    CHECK(a.sim.strategy == HedgeStrategy::None);
    CHECK(a.sweep_rhos == std::vector<double>{0.25, -0.25});
    CHECK(a.effective_text().find("rho = 0.5\n") != std::string::npos);
    CHECK(a.hash() != parse_config("rho = 0.5").hash());
    CHECK(a.hash().size() == 16);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("tabulated payoff from a table file") {
    const fs::path dir = scratch_dir("table");
    std::ofstream(dir / "table.csv") << "sigma,0.001,1,100\n0,0,0.5,1\n2,2,2.5,3\n";
    const RunConfig c = parse_config("payoff = tabulated\npayoff_table = table.csv\n", dir);
    REQUIRE(std::holds_alternative<TabulatedPayoff>(c.payoff));
    CHECK(eval_payoff(c.payoff, 1.0, 1.0) == doctest::Approx(1.5));
    std::ofstream(dir / "narrow.csv") << "sigma,0.5,1\n0,0,0\n2,0,0\n";
    CHECK(error_line("payoff = tabulated\npayoff_table = " + (dir / "narrow.csv").string()) == 2);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch_dir("codes");
    CHECK(run("solve", write_config(dir, "rho = 1.5\n"), dir / "out") == kExitConfigError);
    CHECK(run("solve", dir / "missing.cfg", dir / "out") == kExitConfigError);
    CHECK(run("bogus", write_config(dir, ""), dir / "out") == kExitConfigError);
    // Coarse steps at rho = -1 exceed the Picard iteration budget.
    CHECK(run("solve", write_config(dir, "rho = -1\nn_steps = 10\nn_x = 101\nn_z = 11\n"), dir / "out") ==
          kExitSolverFailure);
}

TEST_CASE("solve at rho = 1 reports eps_star = 0") {
    const fs::path dir = scratch_dir("solve_rho1");
    REQUIRE(run("solve", write_config(dir, "rho = 1\nn_x = 41\nn_z = 41\nn_steps = 200\n"), dir / "out") == 0);
    const std::string summary = slurp(dir / "out" / "summary.txt");
    CHECK(value_of(summary, "eps_star") == "0");
    CHECK(value_of(summary, "clamp_flag") == "false");
    for (const char* f : {"config.effective", "summary.txt", "u1.csv", "a0.csv", "u2.csv", "u3.csv", "theta0.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir / "out" / f).rfind("# hedgepde config_hash=", 0) == 0);
    }
}

TEST_CASE("sweep-rho with mu = 0 gives unit columns") {
    const fs::path dir = scratch_dir("sweep_mu0");
    REQUIRE(run("sweep-rho", write_config(dir, "mu = 0\nn_steps = 20\n"), dir / "out") == 0);
    std::istringstream csv(slurp(dir / "out" / "sweep_rho.csv"));
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    CHECK(line == "sigma,a_rho=-1,a_rho=-0.5,a_rho=0,a_rho=0.5,a_rho=1");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        CHECK(line.substr(line.find(',')) == ",1,1,1,1,1");
    }
    CHECK(rows == 101);
}

TEST_CASE("repeated runs are byte-identical across thread counts") {
    const fs::path dir = scratch_dir("determinism");
    const fs::path cfg = write_config(dir, "n_x = 41\nn_z = 41\nn_steps = 100\nn_paths = 2000\nmc_steps = 50\n"
                                           "write_paths = true\n");
    for (const char* command : {"sweep-rho", "mc-verify"}) {
        REQUIRE(run(command, cfg, dir / "a", 1) == 0);
        REQUIRE(run(command, cfg, dir / "b", 3) == 0);
    }
    for (const char* f : {"sweep_rho.csv", "verification.txt", "paths.csv", "config.effective"}) {
        CAPTURE(f);
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK(!slurp(dir / "a" / f).empty());
    }
}

TEST_CASE("pinned sweep fixture") {
    const fs::path dir = scratch_dir("fixture");
    REQUIRE(run("sweep-rho", fs::path(HEDGEPDE_FIXTURE_DIR) / "defaults.cfg", dir) == 0);
    CHECK(slurp(dir / "sweep_rho.csv") == slurp(fs::path(HEDGEPDE_FIXTURE_DIR) / "sweep_rho_defaults.csv"));
}
