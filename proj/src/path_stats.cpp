#include "simma/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "simma/errors.hpp"
#include "simma/numeric.hpp"
#include "simma/parallel.hpp"

namespace simma {

namespace {

// Recursive-halving sum of f(i) over [lo, hi): a fixed association order, so
// the result is bit-identical for every thread count and grows rounding error
// only logarithmically in the range length.
template <class F>
double pairwise_sum(std::size_t lo, std::size_t hi, const F& f) {
    const std::size_t n = hi - lo;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

double increment(const std::vector<double>& path, std::size_t stride, std::size_t cell) {
    return path[(cell + 1) * stride] - path[cell * stride];
}

} // namespace

std::string to_string(FvVerdict v) {
    switch (v) {
        case FvVerdict::Stabilizing: return "stabilizing";
        case FvVerdict::Diverging: return "diverging";
        case FvVerdict::Inconclusive: break;
    }
    return "inconclusive";
}

double quadratic_variation(const std::vector<double>& path) {
    if (path.size() < 2) return 0.0;
    return pairwise_sum(0, path.size() - 1, [&](std::size_t i) {
        const double d = path[i + 1] - path[i];
        return d * d;
    });
}

double total_variation(const std::vector<double>& path) {
    if (path.size() < 2) return 0.0;
    return pairwise_sum(0, path.size() - 1,
                        [&](std::size_t i) { return std::abs(path[i + 1] - path[i]); });
}

VariationReport variation_report(const std::vector<double>& finest_path,
                                 const std::vector<std::size_t>& grid_sizes) {
    if (grid_sizes.empty()) throw ConfigError("variation report needs at least one grid level");
    for (std::size_t l = 0; l < grid_sizes.size(); ++l) {
        if (grid_sizes[l] == 0) throw ConfigError("variation grid levels must be positive");
        if (l > 0 && grid_sizes[l] <= grid_sizes[l - 1])
            throw ConfigError("variation grid levels must be strictly increasing");
    }
    const std::size_t finest = grid_sizes.back();
    if (finest_path.size() != finest + 1)
        throw ConfigError("path length must be the finest interval count plus one");
    for (std::size_t n : grid_sizes)
        if (finest % n != 0)
            throw ConfigError("every variation grid level must divide the finest one");

    VariationReport rep;
    rep.grid_sizes = grid_sizes;
    rep.qv.resize(grid_sizes.size());
    rep.tv.resize(grid_sizes.size());
    for (std::size_t l = 0; l < grid_sizes.size(); ++l) {
        const std::size_t n = grid_sizes[l];
        const std::size_t stride = finest / n;
        rep.qv[l] = pairwise_sum(0, n, [&](std::size_t i) {
            const double d = increment(finest_path, stride, i);
            return d * d;
        });
        rep.tv[l] = pairwise_sum(
            0, n, [&](std::size_t i) { return std::abs(increment(finest_path, stride, i)); });
    }

    rep.verdict_fv = FvVerdict::Inconclusive;
    if (grid_sizes.size() >= 3) {
        const double tv_prev = rep.tv[rep.tv.size() - 2];
        const double tv_last = rep.tv.back();
        if (tv_prev == 0.0 && tv_last == 0.0) {
            rep.verdict_fv = FvVerdict::Stabilizing;
        } else if (tv_prev > 0.0) {
            const double ratio = tv_last / tv_prev;
            if (ratio >= 0.99 && ratio <= 1.05) {
                rep.verdict_fv = FvVerdict::Stabilizing;
            } else if (ratio > 1.05) {
                bool sustained = true;
                for (std::size_t l = 0; l + 1 < rep.tv.size(); ++l) {
                    if (rep.tv[l] <= 0.0 || rep.tv[l + 1] / rep.tv[l] <= 1.05) {
                        sustained = false;
                        break;
                    }
                }
                if (sustained) rep.verdict_fv = FvVerdict::Diverging;
            }
        }
    }
    return rep;
}

IndependenceReport independence_test(const std::vector<std::vector<double>>& paths,
                                     const std::vector<IntervalPair>& pairs) {
    if (paths.size() < 1000)
        throw InsufficientPaths("independence test needs at least 1000 paths");
    if (pairs.empty()) throw ConfigError("independence test needs at least one interval pair");
    const std::size_t len = paths.front().size();
    if (len < 2) throw ConfigError("paths must carry at least two grid values");
    for (const auto& p : paths)
        if (p.size() != len) throw ConfigError("all paths must share one grid");
    for (const auto& pr : pairs) {
        if (pr.first_lo >= pr.first_hi || pr.second_lo >= pr.second_hi)
            throw ConfigError("interval windows must run forward");
        if (pr.first_hi >= len || pr.second_hi >= len)
            throw ConfigError("interval window exceeds the path grid");
        const bool disjoint = pr.first_hi <= pr.second_lo || pr.second_hi <= pr.first_lo;
        if (!disjoint) throw ConfigError("the two windows of an interval pair must be disjoint");
    }

    const std::size_t n = paths.size();
    IndependenceReport rep;
    rep.n_paths = n;
    bool pass = true;

    std::vector<double> a(n), b(n);
    // cosine/sine tables of theta*a and u*b per grid value; filled per path
    // (own-slot writes), reduced pairwise
    std::vector<std::vector<double>> ca(6), sa(6), cb(6), sb(6);

    for (const auto& pr : pairs) {
        parallel_for(n, [&](std::size_t j) {
            a[j] = paths[j][pr.first_hi] - paths[j][pr.first_lo];
            b[j] = paths[j][pr.second_hi] - paths[j][pr.second_lo];
        });

        // sample correlation with a self-normalized standard error: under
        // independent symmetric signs Var(S_ab) = sum ((a-am)(b-bm))^2, which
        // stays meaningful for infinite-variance increments
        const double am = pairwise_sum(0, n, [&](std::size_t j) { return a[j]; }) / double(n);
        const double bm = pairwise_sum(0, n, [&](std::size_t j) { return b[j]; }) / double(n);
        const double s_aa =
            pairwise_sum(0, n, [&](std::size_t j) { return (a[j] - am) * (a[j] - am); });
        const double s_bb =
            pairwise_sum(0, n, [&](std::size_t j) { return (b[j] - bm) * (b[j] - bm); });
        if (s_aa <= 0.0 || s_bb <= 0.0) {
            rep.correlation.push_back(0.0);
            rep.correlation_se.push_back(0.0);
        } else {
            const double s_ab =
                pairwise_sum(0, n, [&](std::size_t j) { return (a[j] - am) * (b[j] - bm); });
            const double s_ab2 = pairwise_sum(0, n, [&](std::size_t j) {
                const double t = (a[j] - am) * (b[j] - bm);
                return t * t;
            });
            const double denom = std::sqrt(s_aa) * std::sqrt(s_bb);
            const double corr = s_ab / denom;
            const double se = std::sqrt(s_ab2) / denom;
            rep.correlation.push_back(corr);
            rep.correlation_se.push_back(se);
            if (std::abs(corr) > 3.0 * se) pass = false;
        }

        for (int t = 0; t < 6; ++t) {
            ca[t].assign(n, 0.0);
            sa[t].assign(n, 0.0);
            cb[t].assign(n, 0.0);
            sb[t].assign(n, 0.0);
        }
        parallel_for(n, [&](std::size_t j) {
            for (int t = 0; t < 6; ++t) {
                ca[t][j] = std::cos(kCfGrid[t] * a[j]);
                sa[t][j] = std::sin(kCfGrid[t] * a[j]);
                cb[t][j] = std::cos(kCfGrid[t] * b[j]);
                sb[t][j] = std::sin(kCfGrid[t] * b[j]);
            }
        });

        double m1c[6], m1s[6], m2c[6], m2s[6];
        for (int t = 0; t < 6; ++t) {
            m1c[t] = pairwise_sum(0, n, [&](std::size_t j) { return ca[t][j]; }) / double(n);
            m1s[t] = pairwise_sum(0, n, [&](std::size_t j) { return sa[t][j]; }) / double(n);
            m2c[t] = pairwise_sum(0, n, [&](std::size_t j) { return cb[t][j]; }) / double(n);
            m2s[t] = pairwise_sum(0, n, [&](std::size_t j) { return sb[t][j]; }) / double(n);
        }

        double gap = -1.0, gap_se = 0.0;
        for (int t = 0; t < 6; ++t) {
            for (int u = 0; u < 6; ++u) {
                // joint empirical cf by the angle-addition identity, so no
                // extra trigonometry enters and the reduction stays fixed
                const double mj_re = pairwise_sum(0, n, [&](std::size_t j) {
                                         return ca[t][j] * cb[u][j] - sa[t][j] * sb[u][j];
                                     }) /
                                     double(n);
                const double mj_im = pairwise_sum(0, n, [&](std::size_t j) {
                                         return sa[t][j] * cb[u][j] + ca[t][j] * sb[u][j];
                                     }) /
                                     double(n);
                const double d_re = mj_re - (m1c[t] * m2c[u] - m1s[t] * m2s[u]);
                const double d_im = mj_im - (m1c[t] * m2s[u] + m1s[t] * m2c[u]);
                const double dist = std::hypot(d_re, d_im);

                // influence function of the gap estimator; its empirical
                // second moment gives the Monte Carlo SE of the gap
                const double var2 = pairwise_sum(0, n, [&](std::size_t j) {
                    const double jc = ca[t][j] * cb[u][j] - sa[t][j] * sb[u][j];
                    const double js = sa[t][j] * cb[u][j] + ca[t][j] * sb[u][j];
                    const double da_re = ca[t][j] - m1c[t];
                    const double da_im = sa[t][j] - m1s[t];
                    const double db_re = cb[u][j] - m2c[u];
                    const double db_im = sb[u][j] - m2s[u];
                    const double p_re = (jc - mj_re) - (m2c[u] * da_re - m2s[u] * da_im) -
                                        (m1c[t] * db_re - m1s[t] * db_im);
                    const double p_im = (js - mj_im) - (m2c[u] * da_im + m2s[u] * da_re) -
                                        (m1c[t] * db_im + m1s[t] * db_re);
                    return p_re * p_re + p_im * p_im;
                });
                const double se = std::sqrt(var2) / double(n);
                if (dist > 3.0 * se) pass = false;
                if (dist > gap) {
                    gap = dist;
                    gap_se = se;
                }
            }
        }
        rep.cf_gap.push_back(gap);
        rep.cf_gap_se.push_back(gap_se);
    }

    rep.pass = pass;
    return rep;
}

JumpMatchReport jump_match(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel,
                           const std::vector<std::size_t>& grid_sizes, std::size_t k) {
    if (grid_sizes.empty()) throw ConfigError("jump matching needs at least one grid level");
    for (std::size_t l = 0; l < grid_sizes.size(); ++l) {
        if (grid_sizes[l] == 0) throw ConfigError("jump-match grid levels must be positive");
        if (l > 0 && grid_sizes[l] <= grid_sizes[l - 1])
            throw ConfigError("jump-match grid levels must be strictly increasing");
    }
    if (k == 0) throw ConfigError("jump matching needs k >= 1 tracked jumps");

    // the k largest nonzero |r| arriving inside (0, horizon]; ties break by
    // term index so the selection is deterministic
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < ens.size(); ++i)
        if (ens.t1[i] > 0.0 && ens.t1[i] <= cfg.horizon && ens.r[i] != 0.0)
            candidates.push_back(i);
    if (candidates.empty())
        throw DomainError("no nonzero jump arrives inside the observation window");
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t i, std::size_t j) {
        return std::abs(ens.r[i]) > std::abs(ens.r[j]);
    });
    if (candidates.size() > k) candidates.resize(k);

    JumpMatchReport rep;
    rep.grid_sizes = grid_sizes;
    double scale = 0.0, raw_scale = 0.0;
    for (std::size_t i : candidates) {
        const double pred = ens.r[i] * kernel.f(0.0, ens.t2[i]);
        rep.arrival.push_back(ens.t1[i]);
        rep.predicted.push_back(pred);
        scale = std::max(scale, std::abs(pred));
        raw_scale = std::max(raw_scale, std::abs(ens.r[i]));
    }
    if (scale == 0.0) scale = raw_scale;

    for (std::size_t n : grid_sizes) {
        SeriesConfig level_cfg = cfg;
        level_cfg.grid.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            level_cfg.grid[i] = (i == n) ? cfg.horizon
                                         : cfg.horizon * (static_cast<double>(i) / double(n));
        const std::vector<double> x = path_x(ens, level_cfg, spec, kernel);

        const double h = cfg.horizon / double(n);
        std::vector<double> measured(candidates.size());
        double worst = 0.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            std::size_t idx = static_cast<std::size_t>(std::ceil(rep.arrival[c] / h));
            if (idx < 1) idx = 1;
            if (idx > n) idx = n;
            measured[c] = x[idx] - x[idx - 1];
            worst = std::max(worst, std::abs(measured[c] - rep.predicted[c]) / scale);
        }
        rep.measured.push_back(std::move(measured));
        rep.max_rel_error.push_back(worst);
    }

    rep.pass = true;
    for (std::size_t l = 0; l + 1 < rep.max_rel_error.size(); ++l)
        if (rep.max_rel_error[l + 1] >
            rep.max_rel_error[l] + 1e-15 * (1.0 + rep.max_rel_error[l]))
            rep.pass = false;
    return rep;
}

std::string variation_csv(const VariationReport& rep, const std::string& instance) {
    std::string out = "# verdict_fv=" + to_string(rep.verdict_fv) + "\n";
    out += "instance,grid,statistic,value\n";
    for (std::size_t l = 0; l < rep.grid_sizes.size(); ++l) {
        const std::string grid = std::to_string(rep.grid_sizes[l]);
        out += instance + "," + grid + ",qv," + fmt_double(rep.qv[l]) + "\n";
        out += instance + "," + grid + ",tv," + fmt_double(rep.tv[l]) + "\n";
    }
    return out;
}

std::string independence_csv(const IndependenceReport& rep, const std::string& instance) {
    std::string out = "# n_paths=" + std::to_string(rep.n_paths) +
                      " pass=" + (rep.pass ? std::string("1") : std::string("0")) + "\n";
    out += "instance,grid,statistic,value\n";
    for (std::size_t p = 0; p < rep.correlation.size(); ++p) {
        const std::string grid = "pair" + std::to_string(p + 1);
        out += instance + "," + grid + ",correlation," + fmt_double(rep.correlation[p]) + "\n";
        out += instance + "," + grid + ",correlation_se," + fmt_double(rep.correlation_se[p]) +
               "\n";
        out += instance + "," + grid + ",cf_gap," + fmt_double(rep.cf_gap[p]) + "\n";
        out += instance + "," + grid + ",cf_gap_se," + fmt_double(rep.cf_gap_se[p]) + "\n";
    }
    return out;
}

std::string jump_match_csv(const JumpMatchReport& rep, const std::string& instance) {
    std::string out = "# k=" + std::to_string(rep.predicted.size()) +
                      " pass=" + (rep.pass ? std::string("1") : std::string("0")) + "\n";
    out += "instance,grid,statistic,value\n";
    for (std::size_t l = 0; l < rep.grid_sizes.size(); ++l)
        out += instance + "," + std::to_string(rep.grid_sizes[l]) + ",max_rel_error," +
               fmt_double(rep.max_rel_error[l]) + "\n";
    return out;
}

} // namespace simma
