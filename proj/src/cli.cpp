#include "simma/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "simma/config.hpp"
#include "simma/counterexamples.hpp"
#include "simma/criteria.hpp"
#include "simma/errors.hpp"
#include "simma/numeric.hpp"
#include "simma/parallel.hpp"
#include "simma/path_stats.hpp"
#include "simma/rng.hpp"
#include "simma/series_sim.hpp"

namespace simma {

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
    std::optional<int> grid;
    bool quiet = false;
};

void info(const CliOptions& opt, const std::string& msg) {
    if (!opt.quiet) std::fprintf(stderr, "%s\n", msg.c_str());
}

// one named CSV document, to --out/name or to stdout behind a "# file:" marker
void emit(const CliOptions& opt, const std::string& name, const std::string& text) {
    if (opt.out_dir.empty()) {
        std::fputs(("# file: " + name + "\n").c_str(), stdout);
        std::fputs(text.c_str(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + opt.out_dir + "': " + ec.message());
    const std::string path = (fs::path(opt.out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write '" + path + "'");
    info(opt, "wrote " + path);
}

// NaN -> empty cell, matching the report serializers
std::string fmt_value(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    return fmt_double(v);
}

InstanceConfig load_effective(const CliOptions& opt) {
    InstanceConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.simulation.seed = *opt.seed;
    if (opt.paths) cfg.simulation.paths = *opt.paths;
    if (opt.grid) cfg.simulation.grid = *opt.grid;
    return cfg;
}

int verdict_exit(CriteriaReport::Verdict v) {
    switch (v) {
        case CriteriaReport::Verdict::Semimartingale: return 0;
        case CriteriaReport::Verdict::NotSemimartingale: return 1;
        default: return 2;
    }
}

// uniform grid with n cells, endpoints exact
std::vector<double> uniform_grid(double horizon, std::size_t n) {
    std::vector<double> g;
    g.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g.push_back(horizon * (static_cast<double>(i) / static_cast<double>(n)));
    return g;
}

int cmd_check(const InstanceConfig& cfg, const CliOptions& opt) {
    const RandomMeasure spec = build_random_measure(cfg);
    const KernelSpec kernel = build_kernel(cfg);
    const CriteriaReport rep = verdict(spec, kernel);

    std::string csv = config_echo(cfg);
    csv += rep.csv_header() + "\n" + rep.csv_row() + "\n";
    emit(opt, "check.csv", csv);
    info(opt, std::string("verdict: ") + to_string(rep.verdict) + " (" + to_string(rep.basis) +
                  ")");
    return verdict_exit(rep.verdict);
}

int cmd_simulate(const InstanceConfig& cfg, const CliOptions& opt) {
    const RandomMeasure spec = build_random_measure(cfg);
    const KernelSpec kernel = build_kernel(cfg);
    const SeriesConfig base = build_series(cfg);
    validate_simulable(spec, kernel);

    const std::size_t n_paths = static_cast<std::size_t>(cfg.simulation.paths);
    std::vector<SeriesConfig> per(n_paths, base);
    std::vector<ShotNoiseEnsemble> ens(n_paths);
    std::vector<PathBundle> bundles(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        per[i].seed = path_seed(base.seed, i);
        ens[i] = sample_ensemble(per[i], spec);
        bundles[i].x = path_x(ens[i], per[i], spec, kernel);
        bundles[i].m = path_m(ens[i], per[i], spec, kernel);
        bundles[i].a = path_a(bundles[i].x, bundles[i].m);
    });

    const std::string echo = config_echo(cfg);
    for (std::size_t i = 0; i < n_paths; ++i) {
        emit(opt, "path_" + std::to_string(i) + ".csv", echo + bundle_csv(bundles[i], per[i]));
        emit(opt, "ensemble_" + std::to_string(i) + ".csv",
             echo + ensemble_csv(ens[i], per[i]));
    }
    return 0;
}

int cmd_table(const InstanceConfig& cfg, const CliOptions& opt) {
    if (!cfg.has_table) throw ConfigError("config: missing required block [table]");
    if (!cfg.has_driver || !cfg.has_kernel || cfg.kernel.family != "fractional" ||
        cfg.driver.family == "compound_poisson")
        throw ConfigError("config: table sweeps need a fractional kernel over a stable or "
                          "tempered_stable driver");

    const bool tempered = cfg.driver.family == "tempered_stable";
    const F0Mode mode = cfg.kernel.f0 == "zero" ? F0Mode::Zero : F0Mode::SameAsF;
    static const char* kIntegralColumns[] = {"jump_energy", "truncated_jump_energy",
                                             "derivative_energy", "fv_driver", "fv_shift"};

    std::string csv = config_echo(cfg);
    csv += "alpha,gamma,lambda,verdict,basis";
    for (const char* name : kIntegralColumns) csv += std::string(",") + name;
    csv += "\n";

    const std::vector<double> lambdas = tempered ? cfg.table.lambdas : std::vector<double>{0.0};
    for (double alpha : cfg.table.alphas) {
        for (double gamma : cfg.table.gammas) {
            for (double lambda : lambdas) {
                LevyMeasure rho =
                    tempered
                        ? LevyMeasure::symmetric_tempered_stable(alpha, lambda,
                                                                 cfg.driver.scale)
                        : LevyMeasure::symmetric_stable(alpha, cfg.driver.scale);
                const RandomMeasure spec = RandomMeasure::single(
                    cfg.marks.value, std::move(rho), cfg.driver.drift, cfg.driver.sigma2);
                const CriteriaReport rep = verdict(spec, KernelSpec::fractional(gamma, mode));

                csv += fmt_double(alpha) + "," + fmt_double(gamma) + ",";
                if (tempered) csv += fmt_double(lambda);
                csv += ",";
                csv += to_string(rep.verdict);
                csv += ",";
                csv += to_string(rep.basis);
                for (const char* name : kIntegralColumns)
                    csv += "," + fmt_value(rep.value_of(name));
                csv += "\n";
            }
        }
    }
    emit(opt, "table.csv", csv);
    return 0;
}

int cmd_stats(const InstanceConfig& cfg, const CliOptions& opt) {
    const RandomMeasure spec = build_random_measure(cfg);
    const KernelSpec kernel = build_kernel(cfg);
    const SeriesConfig base = build_series(cfg);
    validate_simulable(spec, kernel);

    const AnalysisConfig& an = cfg.analysis;
    if (an.grids.empty())
        throw ConfigError("config: key 'analysis.grids' must list at least one level");

    // statistics run on the analysis grid ladder; simulate its finest level
    SeriesConfig stat_cfg = base;
    stat_cfg.grid = uniform_grid(base.horizon, an.grids.back());
    stat_cfg.validate();

    const std::size_t n_paths = static_cast<std::size_t>(cfg.simulation.paths);
    std::vector<SeriesConfig> per(n_paths, stat_cfg);
    std::vector<ShotNoiseEnsemble> ens(n_paths);
    std::vector<std::vector<double>> xs(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        per[i].seed = path_seed(stat_cfg.seed, i);
        ens[i] = sample_ensemble(per[i], spec);
        xs[i] = path_x(ens[i], per[i], spec, kernel);
    });

    const std::string echo = config_echo(cfg);
    const std::string instance = cfg.name.empty() ? "instance" : cfg.name;
    auto want = [&](const char* test) {
        return std::find(an.tests.begin(), an.tests.end(), test) != an.tests.end();
    };

    // headline numbers: realized variations vs the jump bookkeeping of each path
    std::string summary = echo + "path,qv,tv,sum_r2\n";
    for (std::size_t i = 0; i < n_paths; ++i) {
        double sum_r2 = 0.0;
        for (std::size_t j = 0; j < ens[i].size(); ++j)
            if (ens[i].t1[j] > 0.0 && ens[i].t1[j] <= stat_cfg.horizon)
                sum_r2 += ens[i].r[j] * ens[i].r[j];
        summary += std::to_string(i) + "," + fmt_double(quadratic_variation(xs[i])) + "," +
                   fmt_double(total_variation(xs[i])) + "," + fmt_double(sum_r2) + "\n";
    }
    emit(opt, "summary.csv", summary);

    if (want("variation"))
        emit(opt, "variation.csv",
             echo + variation_csv(variation_report(xs[0], an.grids), instance));
    if (want("jumps"))
        emit(opt, "jumps.csv",
             echo + jump_match_csv(
                        jump_match(ens[0], per[0], spec, kernel, an.grids, an.k_jumps),
                        instance));
    if (want("independence")) {
        const std::size_t n = an.grids.back();
        if (n < 3)
            throw ConfigError("config: key 'analysis.grids' finest level must have at least 3 "
                              "cells for the independence test");
        const std::size_t b1 = n / 3, b2 = 2 * n / 3;
        const std::vector<IntervalPair> pairs = {
            {0, b1, b1, b2}, {b1, b2, b2, n}, {0, b1, b2, n}};
        emit(opt, "independence.csv",
             echo + independence_csv(independence_test(xs, pairs), instance));
    }
    return 0;
}

int cmd_demo(const CliOptions& opt) {
    // posterior mean of the uniform-sign component given the sum: odd, bounded
    // by 1 in absolute value, saturating as |y| grows
    std::string cm = "y,conditional_mean\n";
    for (int i = -24; i <= 24; ++i) {
        const double y = 0.25 * i;
        cm += fmt_double(y) + "," + fmt_double(conditional_mean(y)) + "\n";
    }
    emit(opt, "demo_conditional_mean.csv", cm);

    // the Poisson-mixture counterexample: characteristic function of the
    // increment pair vs the product of the marginals, plus the scalar identity
    // whose failure separates them
    std::string gap = "theta,u,joint_cf,product_cf,cf_gap,identity_lhs,identity_rhs,"
                      "identity_gap\n";
    for (int a = 0; a <= 6; ++a) {
        for (int b = 0; b <= 6; ++b) {
            const double theta = 0.5 * a, u = 0.5 * b;
            const FactorizationTerms t = factorization_terms(theta, u);
            gap += fmt_double(theta) + "," + fmt_double(u) + "," + fmt_double(t.joint_cf) +
                   "," + fmt_double(t.product_cf) + "," +
                   fmt_double(poisson_brownian_factorization_gap(theta, u)) + "," +
                   fmt_double(t.pair_cf) + "," + fmt_double(t.pair_sum) + "," +
                   fmt_double(t.pair_cf - t.pair_sum) + "\n";
        }
    }
    emit(opt, "demo_factorization.csv", gap);
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CliOptions opt;
    CLI::App app{"semimartingale analysis and shot-noise simulation for infinitely divisible "
                 "moving averages"};
    app.name("simma");
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool with_config) {
        if (with_config)
            sub->add_option("--config", opt.config_path, "instance description file")
                ->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: stdout)");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { opt.seed = v; }, "override simulation.seed");
        sub->add_option_function<int>(
               "--paths", [&](int v) { opt.paths = v; }, "override simulation.paths")
            ->check(CLI::PositiveNumber);
        sub->add_option_function<int>(
               "--grid", [&](int v) { opt.grid = v; }, "override simulation.grid")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opt.quiet, "suppress progress messages");
    };

    add_common(app.add_subcommand("check", "decide the semimartingale property"), true);
    add_common(app.add_subcommand("simulate",
                                  "sample shot-noise paths with their decomposition"),
               true);
    add_common(app.add_subcommand("table", "sweep parameter ranges into a verdict table"),
               true);
    add_common(app.add_subcommand("stats", "path statistics over a simulated ensemble"), true);
    add_common(app.add_subcommand(
                   "demo", "example tables: dependent increments and the conditional mean"),
               false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (app.got_subcommand("demo")) return cmd_demo(opt);
        const InstanceConfig cfg = load_effective(opt);
        if (app.got_subcommand("check")) return cmd_check(cfg, opt);
        if (app.got_subcommand("simulate")) return cmd_simulate(cfg, opt);
        if (app.got_subcommand("table")) return cmd_table(cfg, opt);
        return cmd_stats(cfg, opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "simma: %s\n", e.what());
        return 64;
    } catch (const IoError& e) {
        std::fprintf(stderr, "simma: %s\n", e.what());
        return 66;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "simma: %s\n", e.what());
        return 65;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simma: internal error: %s\n", e.what());
        return 70;
    }
}

} // namespace simma
