#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "simma/config.hpp"
#include "simma/errors.hpp"

using namespace simma;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// scratch directory that cleans itself up after the test case
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("simma_cli_" + std::to_string(::getpid()) + "_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// run the real executable; env is a shell prefix like "SIMMA_THREADS=8 "
RunResult run_cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
    const fs::path out_file = dir.path / "stdout.txt";
    const fs::path err_file = dir.path / "stderr.txt";
    const std::string cmd = env + std::string(SIMMA_CLI_PATH) + " " + args + " > '" +
                            out_file.string() + "' 2> '" + err_file.string() + "'";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

// data rows of a CSV document: no '#' lines, no header
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(f));
    }
    return rows;
}

const char* kCheckSm = "[driver]\n"
                       "family = tempered_stable\n"
                       "alpha = 1.5\n"
                       "lambda = 1\n"
                       "\n"
                       "[kernel]\n"
                       "family = fractional\n"
                       "gamma = 0.4\n";

const char* kCheckNotSm = "[driver]\n"
                          "family = stable\n"
                          "alpha = 1.5\n"
                          "\n"
                          "[kernel]\n"
                          "family = fractional\n"
                          "gamma = 0.3\n";

const char* kCheckCp = "[driver]\n"
                       "family = compound_poisson\n"
                       "atoms = -1:0.5, 1:0.5\n"
                       "\n"
                       "[kernel]\n"
                       "family = step\n";

const char* kSimulate = "[driver]\n"
                        "family = stable\n"
                        "alpha = 1.5\n"
                        "\n"
                        "[kernel]\n"
                        "family = step\n"
                        "\n"
                        "[simulation]\n"
                        "n_terms = 150\n"
                        "grid = 32\n"
                        "seed = 7\n"
                        "paths = 2\n";

} // namespace

TEST_CASE("verdict goldens drive the exit code") {
    TempDir dir("check");
    write_file(dir.path / "sm.cfg", kCheckSm);
    write_file(dir.path / "no.cfg", kCheckNotSm);
    write_file(dir.path / "cp.cfg", kCheckCp);

    const RunResult sm = run_cli(dir, "check --config '" + (dir.path / "sm.cfg").string() +
                                          "' --quiet");
    CHECK(sm.exit_code == 0);
    CHECK(sm.out.find("Semimartingale") != std::string::npos);

    const RunResult no = run_cli(dir, "check --config '" + (dir.path / "no.cfg").string() +
                                          "' --quiet");
    CHECK(no.exit_code == 1);
    CHECK(no.out.find("NotSemimartingale") != std::string::npos);

    // the finite-variation special case decides the step compound-Poisson pair
    const RunResult cp = run_cli(dir, "check --config '" + (dir.path / "cp.cfg").string() +
                                          "' --quiet");
    CHECK(cp.exit_code == 0);
    CHECK(cp.out.find("closed_form") != std::string::npos);
    CHECK(cp.out.find("finite_variation") != std::string::npos);

    // stdout mode marks which file the document would be
    CHECK(sm.out.rfind("# file: check.csv\n", 0) == 0);

    // the echoed header re-parses to the loaded config
    CHECK(parse_echo(sm.out) == parse_config(kCheckSm));
}

TEST_CASE("usage failures exit 64 and help exits 0") {
    TempDir dir("usage");
    write_file(dir.path / "sm.cfg", kCheckSm);
    const std::string cfg = " --config '" + (dir.path / "sm.cfg").string() + "'";

    CHECK(run_cli(dir, "").exit_code == 64);
    CHECK(run_cli(dir, "frobnicate").exit_code == 64);
    CHECK(run_cli(dir, "check").exit_code == 64);           // --config required
    CHECK(run_cli(dir, "check" + cfg + " --bogus").exit_code == 64);
    CHECK(run_cli(dir, "check" + cfg + " --seed notanumber").exit_code == 64);
    CHECK(run_cli(dir, "check" + cfg + " --paths 0").exit_code == 64);
    CHECK(run_cli(dir, "demo --config x.cfg").exit_code == 64); // demo takes no config
    CHECK(run_cli(dir, "--help").exit_code == 0);

    // config parse errors name the offending key and exit 64
    write_file(dir.path / "bad.cfg", "[driver]\nfamily = stable\nalphaa = 1\n");
    const RunResult bad =
        run_cli(dir, "check --config '" + (dir.path / "bad.cfg").string() + "'");
    CHECK(bad.exit_code == 64);
    CHECK(bad.err.find("line 3") != std::string::npos);
    CHECK(bad.err.find("driver.alphaa") != std::string::npos);
}

TEST_CASE("simulate writes deterministic bundles and honors overrides") {
    TempDir dir("simulate");
    const fs::path cfg = dir.path / "sim.cfg";
    write_file(cfg, kSimulate);
    const std::string base = "simulate --config '" + cfg.string() + "' --quiet --out ";

    CHECK(run_cli(dir, base + "'" + (dir.path / "a").string() + "'").exit_code == 0);
    CHECK(run_cli(dir, base + "'" + (dir.path / "b").string() + "'").exit_code == 0);
    CHECK(run_cli(dir, base + "'" + (dir.path / "t1").string() + "'", "SIMMA_THREADS=1 ")
              .exit_code == 0);
    CHECK(run_cli(dir, base + "'" + (dir.path / "t8").string() + "'", "SIMMA_THREADS=8 ")
              .exit_code == 0);

    for (const char* name : {"path_0.csv", "path_1.csv", "ensemble_0.csv", "ensemble_1.csv"}) {
        const std::string a = slurp(dir.path / "a" / name);
        REQUIRE(!a.empty());
        CHECK(a == slurp(dir.path / "b" / name));  // rerun
        CHECK(a == slurp(dir.path / "t1" / name)); // one worker
        CHECK(a == slurp(dir.path / "t8" / name)); // eight workers
    }

    // x = x0 + m + a holds row by row in the emitted CSV
    const auto rows = csv_rows(slurp(dir.path / "a" / "path_0.csv"));
    REQUIRE(rows.size() == 33); // grid cells + 1
    for (const auto& r : rows) {
        REQUIRE(r.size() == 4);
        const double x = std::stod(r[1]), m = std::stod(r[2]), a = std::stod(r[3]);
        const double x0 = std::stod(rows.front()[1]);
        CHECK(x == doctest::Approx(x0 + m + a).epsilon(1e-12));
    }

    // --seed changes the sample, --paths and --grid change the layout
    CHECK(run_cli(dir, base + "'" + (dir.path / "s9").string() + "' --seed 9").exit_code == 0);
    CHECK(slurp(dir.path / "s9" / "path_0.csv") != slurp(dir.path / "a" / "path_0.csv"));

    CHECK(run_cli(dir, base + "'" + (dir.path / "p1").string() + "' --paths 1 --grid 8")
              .exit_code == 0);
    CHECK(fs::exists(dir.path / "p1" / "path_0.csv"));
    CHECK_FALSE(fs::exists(dir.path / "p1" / "path_1.csv"));
    CHECK(csv_rows(slurp(dir.path / "p1" / "path_0.csv")).size() == 9);

    // the echo header carries the effective (overridden) config
    InstanceConfig expected = parse_config(kSimulate);
    expected.simulation.seed = 9;
    CHECK(parse_echo(slurp(dir.path / "s9" / "path_0.csv")) == expected);
}

TEST_CASE("simulate rejects what the series cannot represent") {
    TempDir dir("reject");
    write_file(dir.path / "nt0.cfg",
               std::string(kSimulate).replace(std::string(kSimulate).find("n_terms = 150"),
                                              13, "n_terms = 0  "));
    const RunResult nt0 =
        run_cli(dir, "simulate --config '" + (dir.path / "nt0.cfg").string() + "'");
    CHECK(nt0.exit_code == 64);
    CHECK(nt0.err.find("n_terms") != std::string::npos);

    write_file(dir.path / "gauss.cfg", "[driver]\nfamily = stable\nsigma2 = 1\n\n"
                                       "[kernel]\nfamily = step\n\n"
                                       "[simulation]\nn_terms = 10\ngrid = 4\n");
    CHECK(run_cli(dir, "simulate --config '" + (dir.path / "gauss.cfg").string() + "'")
              .exit_code == 65);

    write_file(dir.path / "nosim.cfg", kCheckSm);
    const RunResult nosim =
        run_cli(dir, "simulate --config '" + (dir.path / "nosim.cfg").string() + "'");
    CHECK(nosim.exit_code == 64);
    CHECK(nosim.err.find("[simulation]") != std::string::npos);
}

TEST_CASE("table sweeps reproduce the phase sheets") {
    TempDir dir("table");

    // stable sheet: everything in (1,2) x (0,1/2) fails to be a semimartingale
    write_file(dir.path / "st.cfg", "[driver]\nfamily = stable\n\n"
                                    "[kernel]\nfamily = fractional\n\n"
                                    "[table]\nalphas = 1.2, 1.5, 1.8\n"
                                    "gammas = 0.1, 0.2, 0.3, 0.4, 0.45\n");
    const RunResult st =
        run_cli(dir, "table --config '" + (dir.path / "st.cfg").string() + "' --quiet");
    CHECK(st.exit_code == 0);
    const auto st_rows = csv_rows(st.out);
    REQUIRE(st_rows.size() == 15);
    for (const auto& r : st_rows) {
        REQUIRE(r.size() >= 5);
        CHECK(r[3] == "NotSemimartingale");
    }

    // tempered sheet: the verdict flips across gamma = 1 - 1/alpha
    write_file(dir.path / "ts.cfg", "[driver]\nfamily = tempered_stable\n\n"
                                    "[kernel]\nfamily = fractional\n\n"
                                    "[table]\nalphas = 1.5\n"
                                    "gammas = 0.25, 0.3, 0.35, 0.4\nlambdas = 1\n");
    const RunResult ts =
        run_cli(dir, "table --config '" + (dir.path / "ts.cfg").string() + "' --quiet");
    CHECK(ts.exit_code == 0);
    const auto ts_rows = csv_rows(ts.out);
    REQUIRE(ts_rows.size() == 4);
    CHECK(ts_rows[0][3] == "NotSemimartingale"); // gamma 0.25 < 1/3
    CHECK(ts_rows[1][3] == "NotSemimartingale"); // gamma 0.30 < 1/3
    CHECK(ts_rows[2][3] == "Semimartingale");    // gamma 0.35 > 1/3
    CHECK(ts_rows[3][3] == "Semimartingale");    // gamma 0.40 > 1/3

    // empty range: header only, success
    write_file(dir.path / "empty.cfg", "[driver]\nfamily = stable\n\n"
                                       "[kernel]\nfamily = fractional\n\n"
                                       "[table]\nalphas =\ngammas = 0.2\n");
    const RunResult empty =
        run_cli(dir, "table --config '" + (dir.path / "empty.cfg").string() + "' --quiet");
    CHECK(empty.exit_code == 0);
    CHECK(csv_rows(empty.out).empty());
    CHECK(empty.out.find("alpha,gamma,lambda,verdict,basis") != std::string::npos);

    // a config without ranges cannot be swept
    write_file(dir.path / "norange.cfg", kCheckSm);
    const RunResult norange =
        run_cli(dir, "table --config '" + (dir.path / "norange.cfg").string() + "'");
    CHECK(norange.exit_code == 64);
    CHECK(norange.err.find("[table]") != std::string::npos);
}

TEST_CASE("stats reports jump bookkeeping on a step-kernel bundle") {
    TempDir dir("stats");
    write_file(dir.path / "stats.cfg", "[driver]\nfamily = stable\nalpha = 1.5\n\n"
                                       "[kernel]\nfamily = step\n\n"
                                       "[simulation]\nn_terms = 400\nseed = 11\npaths = 3\n\n"
                                       "[analysis]\ngrids = 256, 512, 1024\n"
                                       "tests = variation, jumps\nk_jumps = 10\n");
    const fs::path out = dir.path / "out";
    const RunResult st = run_cli(dir, "stats --config '" + (dir.path / "stats.cfg").string() +
                                          "' --quiet --out '" + out.string() + "'");
    CHECK(st.exit_code == 0);
    REQUIRE(fs::exists(out / "summary.csv"));
    REQUIRE(fs::exists(out / "variation.csv"));
    REQUIRE(fs::exists(out / "jumps.csv"));

    // step kernel: realized quadratic variation is the jump bookkeeping up to
    // cell collisions on the finest grid
    const auto rows = csv_rows(slurp(out / "summary.csv"));
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        REQUIRE(r.size() == 4);
        const double qv = std::stod(r[1]), sum_r2 = std::stod(r[3]);
        CHECK(qv > 0.0);
        CHECK(std::abs(qv - sum_r2) < 0.15 * sum_r2);
    }

    // jump matching improves (weakly) under refinement for the step kernel
    const auto jd = csv_rows(slurp(out / "jumps.csv"));
    std::vector<double> errs;
    for (const auto& r : jd)
        if (r.size() == 4 && r[2] == "max_rel_error") errs.push_back(std::stod(r[3]));
    REQUIRE(errs.size() == 3);
    CHECK(errs[2] <= errs[0] * (1.0 + 1e-12));

    const RunResult missing = run_cli(dir, "stats --config '/nonexistent/x.cfg'");
    CHECK(missing.exit_code == 66);
}

TEST_CASE("demo emits the example tables") {
    TempDir dir("demo");
    const fs::path out = dir.path / "out";
    const RunResult demo = run_cli(dir, "demo --quiet --out '" + out.string() + "'");
    CHECK(demo.exit_code == 0);

    const auto cm = csv_rows(slurp(out / "demo_conditional_mean.csv"));
    REQUIRE(cm.size() == 49); // y = -6 .. 6 in steps of 0.25
    CHECK(cm.front()[0] == "-6");
    CHECK(cm.back()[0] == "6");
    const double left = std::stod(cm.front()[1]), right = std::stod(cm.back()[1]);
    CHECK(left < -0.95);
    CHECK(left > -1.0);
    CHECK(right > 0.95);
    CHECK(right < 1.0);
    CHECK(std::stod(cm[24][1]) == 0.0); // y = 0

    const auto gaps = csv_rows(slurp(out / "demo_factorization.csv"));
    REQUIRE(gaps.size() == 49); // 7 x 7 grid in theta and u
    bool found22 = false;
    for (const auto& r : gaps) {
        REQUIRE(r.size() == 8);
        if (r[0] == "0" || r[1] == "0") CHECK(r[4] == "0"); // degenerate factorization
        if (r[0] == "2" && r[1] == "2") {
            found22 = true;
            CHECK(std::stod(r[4]) == doctest::Approx(0.19727614070631091).epsilon(1e-12));
        }
    }
    CHECK(found22);
}
