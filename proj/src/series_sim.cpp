#include "simma/series_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "simma/errors.hpp"
#include "simma/quadrature.hpp"
#include "simma/rng.hpp"

namespace simma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// integrand weight of one shot: f(t - s, v) - f0(-s, v)
double phi_weight(const KernelSpec& kernel, double t, double s, double v) {
    return kernel.f(t - s, v) - kernel.f0(-s, v);
}

void check_symmetry_flag(const SeriesConfig& cfg, const RandomMeasure& spec) {
    if (cfg.symmetric && !spec.symmetric())
        throw ConfigError("config declares a symmetric driver but the measure has drift or asymmetry");
}

// ---- density-mark sampling --------------------------------------------------
//
// Inverse-CDF table in w = -v over (wlo, whi). The middle of the support is
// covered by a geometric grid with trapezoid cell masses and in-cell linear
// inversion; the endpoint at 0 and an unbounded tail use the declared powers,
// mirroring how the total mass was computed at construction.
class DensityTable {
  public:
    explicit DensityTable(const DensityMarks& dm) {
        const double wlo = -dm.hi;
        const double whi = -dm.lo;
        auto d = [&dm](double w) { return std::max(dm.density(-w), 0.0); };
        const bool open_tail = std::isinf(whi);
        const double a = (wlo > 0.0) ? wlo : kOriginEdge;
        const double b = open_tail ? std::max(kTailEdge, 8.0 * a) : whi;

        if (wlo == 0.0) {
            origin_edge_ = a;
            origin_power_ = dm.exp_near_zero + 1.0; // > 0 by construction
            origin_mass_ = d(a) * a / origin_power_;
        }

        knots_.resize(kCells + 1);
        dens_.resize(kCells + 1);
        const double ratio = std::log(b / a) / kCells;
        for (int i = 0; i <= kCells; ++i) knots_[i] = a * std::exp(ratio * i);
        knots_.front() = a;
        knots_.back() = b;
        for (int i = 0; i <= kCells; ++i) dens_[i] = d(knots_[i]);
        cum_.assign(kCells + 1, 0.0);
        for (int i = 0; i < kCells; ++i) {
            const double cell = 0.5 * (dens_[i] + dens_[i + 1]) * (knots_[i + 1] - knots_[i]);
            cum_[i + 1] = cum_[i] + cell;
        }

        if (open_tail) {
            tail_edge_ = b;
            tail_power_ = dm.exp_at_infinity + 1.0; // < 0 by construction
            tail_mass_ = d(b) * b / (-tail_power_);
        }
        total_ = origin_mass_ + cum_.back() + tail_mass_;
        if (!(total_ > 0.0) || !std::isfinite(total_))
            throw UnnormalizableMarks("mark density carries no usable mass on its support");
    }

    // u in [0, 1) -> mark v < 0
    double quantile(double u) const {
        double target = u * total_;
        if (origin_mass_ > 0.0 && target < origin_mass_) {
            const double w = origin_edge_ * std::pow(target / origin_mass_, 1.0 / origin_power_);
            return -std::max(w, 1e-300);
        }
        target -= origin_mass_;
        if (target < cum_.back()) {
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            const std::size_t k = static_cast<std::size_t>(it - cum_.begin()) - 1;
            return -invert_cell(k, target - cum_[k]);
        }
        target -= cum_.back();
        if (tail_mass_ > 0.0) {
            const double frac = std::min(target / tail_mass_, 1.0 - 1e-16);
            const double w = tail_edge_ * std::pow(1.0 - frac, 1.0 / tail_power_);
            return -std::min(w, 1e300);
        }
        return -knots_.back();
    }

  private:
    double invert_cell(std::size_t k, double theta) const {
        const double w0 = knots_[k], w1 = knots_[k + 1];
        const double d0 = dens_[k], d1 = dens_[k + 1];
        const double width = w1 - w0;
        const double slope = (d1 - d0) / width;
        double delta;
        if (std::abs(slope) * width > 1e-14 * (d0 + d1)) {
            const double disc = std::max(d0 * d0 + 2.0 * slope * theta, 0.0);
            delta = (std::sqrt(disc) - d0) / slope;
        } else {
            delta = d0 > 0.0 ? theta / d0 : 0.0;
        }
        return w0 + std::clamp(delta, 0.0, width);
    }

    static constexpr int kCells = 2048;
    static constexpr double kOriginEdge = 1e-9;
    static constexpr double kTailEdge = 1e6;

    std::vector<double> knots_, dens_, cum_;
    double origin_edge_ = 0.0, origin_power_ = 1.0, origin_mass_ = 0.0;
    double tail_edge_ = kInf, tail_power_ = -1.0, tail_mass_ = 0.0;
    double total_ = 0.0;
};

// ---- centering quadrature ---------------------------------------------------
//
// alpha_j(t) = int_{Gamma_{j-1}}^{Gamma_j} E tr(R(eps r h) w(s, v)) dr where the
// expectation runs over the fair sign, the uniform time and the normalized
// marks. The same machinery serves the martingale correction with the weight
// f(0, v) 1{0 < s <= t} and the drift functional beta.
struct CenteringJob {
    const SeriesConfig& cfg;
    const RandomMeasure& spec;
    std::function<double(double, double)> weight; // (s, v)
    double time_kink = 0.0;                       // interior breakpoint besides 0
};

double segmented_time_integral(const std::function<double(double)>& f, double lo, double hi,
                               double cut_a, double cut_b, const quad::Options& opt) {
    double cuts[4] = {lo, std::clamp(cut_a, lo, hi), std::clamp(cut_b, lo, hi), hi};
    std::sort(std::begin(cuts), std::end(cuts));
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        if (cuts[i + 1] > cuts[i]) acc += quad::integrate(f, cuts[i], cuts[i + 1], opt).value;
    return acc;
}

// mean of tr(R(eps r h) weight(s, v)) over (eps, s, v) at fixed radius r
double centering_mean(const CenteringJob& job, double r, double h) {
    const double S = job.cfg.window, T = job.cfg.horizon;
    quad::Options opt;
    opt.abs_tol = 1e-12;
    double acc = 0.0;
    const double mass = job.spec.total_mark_mass();
    for (std::size_t i = 0; i < job.spec.n_atoms(); ++i) {
        const MarkAtom& atom = job.spec.atom(i);
        const LevyMeasure& rho = job.spec.levy(i);
        double eps_sum = 0.0;
        for (int e : {1, -1}) {
            const double jump = rho.tail_inverse(e * r * h);
            if (jump == 0.0) continue;
            auto f = [&](double s) { return truncate(jump * job.weight(s, atom.v)); };
            eps_sum += segmented_time_integral(f, -S, T, 0.0, job.time_kink, opt);
        }
        acc += 0.5 * (atom.weight / mass) * eps_sum / (S + T);
    }
    return acc;
}

// radii where a compound-Poisson inverse jumps, so the outer quadrature can be
// split at its discontinuities
void collect_radius_breaks(const RandomMeasure& spec, double h, double lo, double hi,
                           std::vector<double>& cuts) {
    for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
        const LevyMeasure& rho = spec.levy(i);
        if (rho.family() != LevyMeasure::Family::CompoundPoisson) continue;
        for (int side = 0; side < 2; ++side) {
            std::vector<Atom> part;
            for (const Atom& a : rho.atoms())
                if ((side == 0) == (a.x > 0.0)) part.push_back(a);
            std::sort(part.begin(), part.end(),
                      [](const Atom& a, const Atom& b) { return std::abs(a.x) > std::abs(b.x); });
            double s = 0.0;
            for (const Atom& a : part) {
                s += a.w;
                const double r = s / h;
                if (r > lo && r < hi) cuts.push_back(r);
            }
        }
    }
}

double centering_integral(const CenteringJob& job, double lo, double hi, double h) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts{lo, hi};
    collect_radius_breaks(job.spec, h, lo, hi, cuts);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    quad::Options opt;
    opt.abs_tol = 1e-11;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += quad::integrate([&](double r) { return centering_mean(job, r, h); }, cuts[i],
                               cuts[i + 1], opt)
                   .value;
    return acc;
}

void require_discrete_centering(const RandomMeasure& spec) {
    if (!spec.discrete_marks())
        throw CenteringNotImplemented(
            "quadrature centering is implemented for finitely many marks only");
}

// centering weight of the martingale part: f(0, v) on (0, t]
double martingale_correction(const ShotNoiseEnsemble& ens, std::size_t j, double t,
                             const SeriesConfig& cfg, const RandomMeasure& spec,
                             const KernelSpec& kernel) {
    const double lo = (j == 1) ? 0.0 : ens.gamma[j - 2];
    const double hi = ens.gamma[j - 1];
    CenteringJob job{cfg, spec,
                     [&kernel, t](double s, double v) {
                         return (s > 0.0 && s <= t) ? kernel.f(0.0, v) : 0.0;
                     },
                     t};
    return centering_integral(job, lo, hi, ens.h);
}

// compensator slope of the martingale jumps: sum_v m({v}) B(f(0,v), v)
double martingale_drift_rate(const RandomMeasure& spec, const KernelSpec& kernel) {
    double rate = 0.0;
    for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
        const MarkAtom& atom = spec.atom(i);
        const double x = kernel.f(0.0, atom.v);
        const double term = char_b(x, spec.drift(i), spec.levy(i));
        if (!std::isfinite(term))
            throw NonIntegrable("drift characteristic of the jump weight is not finite");
        rate += atom.weight * term;
    }
    return rate;
}

std::size_t centering_terms(const SeriesConfig& cfg, std::size_t n) {
    return std::min(static_cast<std::size_t>(cfg.n_centering), n);
}

bool needs_centering(const SeriesConfig& cfg, const RandomMeasure& spec) {
    if (spec.symmetric()) return false;
    if (cfg.n_centering <= 0)
        throw CenteringNotImplemented(
            "drivers with drift or one-sided jumps need n_centering > 0 correction terms");
    return true;
}

}  // namespace

void SeriesConfig::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError("horizon must be positive and finite");
    if (!(window >= horizon) || !std::isfinite(window))
        throw ConfigError("window must be finite and at least the horizon");
    if (n_terms < 1) throw ConfigError("n_terms must be at least 1");
    if (n_centering < 0) throw ConfigError("n_centering must be nonnegative");
    if (grid.empty()) throw ConfigError("grid must not be empty");
    if (grid.front() != 0.0) throw ConfigError("grid must start at 0");
    if (grid.back() != horizon) throw ConfigError("grid must end at the horizon");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) throw ConfigError("grid must be strictly increasing");
    for (double t : grid)
        if (!std::isfinite(t)) throw ConfigError("grid points must be finite");
}

void validate_simulable(const RandomMeasure& spec, const KernelSpec& kernel) {
    const std::size_t n = spec.discrete_marks() ? spec.n_atoms() : 1;
    for (std::size_t i = 0; i < n; ++i)
        if (spec.gaussian(i) > 0.0)
            throw DomainError(
                "the shot-noise series represents pure-jump drivers; remove the Gaussian part");

    if (kernel.family() == KernelSpec::Family::ExponentialOU && spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i)
            if (!(spec.atom(i).v < 0.0))
                throw DomainError("the exponential kernel needs strictly negative marks");
    }

    if (kernel.family() == KernelSpec::Family::Fractional) {
        // pairs of (kernel exponent, driver) whose series tail must be square
        // summable; continuum marks are probed at a geometric sample
        std::vector<std::pair<double, const LevyMeasure*>> probes;
        if (spec.discrete_marks()) {
            for (std::size_t i = 0; i < spec.n_atoms(); ++i)
                probes.emplace_back(kernel.gamma(spec.atom(i).v), &spec.levy(i));
        } else if (kernel.mark_invariant()) {
            probes.emplace_back(kernel.gamma(-1.0), &spec.shared_levy());
        } else {
            const DensityMarks& dm = spec.density_marks();
            const double wlo = std::max(-dm.hi, 1e-6);
            const double whi = std::isinf(dm.lo) ? 1e6 : -dm.lo;
            for (int k = 0; k < 9; ++k) {
                const double w = wlo * std::pow(whi / wlo, k / 8.0);
                probes.emplace_back(kernel.gamma(-w), &spec.shared_levy());
            }
        }
        for (const auto& [g, rho] : probes) {
            if (g >= 0.5)
                throw WellDefinednessViolation(
                    "kernel exponent at least one half: the series tail is not square summable");
            if (rho->family() == LevyMeasure::Family::SymmetricStable &&
                g >= 1.0 - 1.0 / rho->alpha())
                throw WellDefinednessViolation(
                    "stable driver needs a kernel exponent below 1 - 1/alpha");
        }
    }
}

ShotNoiseEnsemble sample_ensemble(const SeriesConfig& cfg, const RandomMeasure& spec) {
    cfg.validate();
    const double mass = spec.total_mark_mass();
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw UnnormalizableMarks("total mark mass must be positive and finite");

    const double S = cfg.window, T = cfg.horizon;
    const std::size_t n = static_cast<std::size_t>(cfg.n_terms);
    ShotNoiseEnsemble ens;
    ens.h = 1.0 / (2.0 * (S + T) * mass);
    ens.gamma.reserve(n);
    ens.eps.reserve(n);
    ens.t1.reserve(n);
    ens.t2.reserve(n);
    ens.r.reserve(n);

    std::vector<double> cum;
    std::unique_ptr<DensityTable> table;
    if (spec.discrete_marks()) {
        cum.reserve(spec.n_atoms());
        double acc = 0.0;
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            acc += spec.atom(i).weight;
            cum.push_back(acc);
        }
    } else {
        table = std::make_unique<DensityTable>(spec.density_marks());
    }

    RngStream rng(cfg.seed);
    double level = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        level += rng.exponential();
        const int e = rng.sign();
        const double t1 = rng.uniform(-S, T);
        double v;
        const LevyMeasure* rho;
        if (table) {
            v = table->quantile(rng.uniform01());
            rho = &spec.shared_levy();
        } else {
            const std::size_t idx = rng.categorical(cum);
            v = spec.atom(idx).v;
            rho = &spec.levy(idx);
        }
        ens.gamma.push_back(level);
        ens.eps.push_back(e);
        ens.t1.push_back(t1);
        ens.t2.push_back(v);
        ens.r.push_back(rho->tail_inverse(e * level * ens.h));
    }
    ens.gamma_level = level;
    return ens;
}

std::vector<double> path_x(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel) {
    cfg.validate();
    check_symmetry_flag(cfg, spec);
    const std::size_t G = cfg.grid.size();
    std::vector<double> x(G, 0.0);
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const double r = ens.r[j];
        if (r == 0.0) continue;
        for (std::size_t k = 0; k < G; ++k)
            x[k] += r * phi_weight(kernel, cfg.grid[k], ens.t1[j], ens.t2[j]);
    }
    if (needs_centering(cfg, spec)) {
        require_discrete_centering(spec);
        for (std::size_t k = 0; k < G; ++k) x[k] += drift_beta(cfg.grid[k], cfg, spec, kernel);
        const std::size_t nc = centering_terms(cfg, ens.size());
        for (std::size_t j = 1; j <= nc; ++j)
            for (std::size_t k = 0; k < G; ++k)
                x[k] -= centering_alpha(ens, j, cfg.grid[k], cfg, spec, kernel);
    }
    return x;
}

std::vector<double> path_m(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel) {
    cfg.validate();
    check_symmetry_flag(cfg, spec);
    const std::size_t G = cfg.grid.size();
    std::vector<double> m(G, 0.0);
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const double w = ens.r[j] * kernel.f(0.0, ens.t2[j]);
        if (w == 0.0 || !(ens.t1[j] > 0.0)) continue;
        for (std::size_t k = 0; k < G; ++k)
            if (ens.t1[j] <= cfg.grid[k]) m[k] += w;
    }
    if (needs_centering(cfg, spec)) {
        require_discrete_centering(spec);
        const double rate = martingale_drift_rate(spec, kernel);
        for (std::size_t k = 0; k < G; ++k) m[k] += rate * cfg.grid[k];
        const std::size_t nc = centering_terms(cfg, ens.size());
        for (std::size_t j = 1; j <= nc; ++j)
            for (std::size_t k = 0; k < G; ++k)
                m[k] -= martingale_correction(ens, j, cfg.grid[k], cfg, spec, kernel);
    }
    return m;
}

std::vector<double> path_a(const std::vector<double>& x, const std::vector<double>& m) {
    if (x.size() != m.size() || x.empty())
        throw ConfigError("decomposition needs x and m sampled on one common grid");
    std::vector<double> a(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) a[k] = x[k] - x[0] - m[k];
    return a;
}

std::vector<double> path_a_direct(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                                  const RandomMeasure& spec, const KernelSpec& kernel) {
    cfg.validate();
    check_symmetry_flag(cfg, spec);
    if (!spec.symmetric())
        throw CenteringNotImplemented(
            "the direct finite-variation series is provided for symmetric drivers");
    const std::size_t G = cfg.grid.size();
    std::vector<double> a(G, 0.0);
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const double r = ens.r[j];
        if (r == 0.0) continue;
        for (std::size_t k = 0; k < G; ++k)
            a[k] += r * (kernel.g(cfg.grid[k] - ens.t1[j], ens.t2[j]) -
                         kernel.g(-ens.t1[j], ens.t2[j]));
    }
    return a;
}

PathBundle sample_bundle(const SeriesConfig& cfg, const RandomMeasure& spec,
                         const KernelSpec& kernel) {
    cfg.validate();
    check_symmetry_flag(cfg, spec);
    validate_simulable(spec, kernel);
    const ShotNoiseEnsemble ens = sample_ensemble(cfg, spec);
    PathBundle bundle;
    bundle.x = path_x(ens, cfg, spec, kernel);
    bundle.m = path_m(ens, cfg, spec, kernel);
    bundle.a = path_a(bundle.x, bundle.m);
    return bundle;
}

double centering_alpha(const ShotNoiseEnsemble& ens, std::size_t j, double t,
                       const SeriesConfig& cfg, const RandomMeasure& spec,
                       const KernelSpec& kernel) {
    if (j == 0 || j > ens.size()) throw DomainError("centering term index out of range");
    if (!(t >= 0.0)) throw DomainError("centering time must be nonnegative");
    if (spec.symmetric()) return 0.0;
    require_discrete_centering(spec);
    const double lo = (j == 1) ? 0.0 : ens.gamma[j - 2];
    const double hi = ens.gamma[j - 1];
    CenteringJob job{cfg, spec,
                     [&kernel, t](double s, double v) { return phi_weight(kernel, t, s, v); }, t};
    return centering_integral(job, lo, hi, ens.h);
}

double drift_beta(double t, const SeriesConfig& cfg, const RandomMeasure& spec,
                  const KernelSpec& kernel) {
    if (!(t >= 0.0) || t > cfg.horizon)
        throw DomainError("drift is evaluated for times in [0, horizon]");
    if (spec.symmetric()) return 0.0;
    require_discrete_centering(spec);
    const double S = cfg.window, T = cfg.horizon;
    quad::Options opt;
    opt.abs_tol = 1e-12;
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
        const MarkAtom& atom = spec.atom(i);
        const double b = spec.drift(i);
        const LevyMeasure& rho = spec.levy(i);
        auto f = [&](double s) {
            return char_b(phi_weight(kernel, t, s, atom.v), b, rho);
        };
        const double part = segmented_time_integral(f, -S, T, 0.0, t, opt);
        if (!std::isfinite(part))
            throw NonIntegrable("drift functional does not integrate over the window");
        acc += atom.weight * part;
    }
    return acc;
}

std::string bundle_csv(const PathBundle& bundle, const SeriesConfig& cfg) {
    std::string out = "# horizon=" + fmt_g(cfg.horizon) + " window=" + fmt_g(cfg.window) +
                      " n_terms=" + std::to_string(cfg.n_terms) +
                      " seed=" + std::to_string(cfg.seed) +
                      " symmetric=" + (cfg.symmetric ? "1" : "0") +
                      " n_centering=" + std::to_string(cfg.n_centering) + "\n";
    out += "t,x,m,a\n";
    for (std::size_t k = 0; k < bundle.x.size(); ++k)
        out += fmt_g(cfg.grid[k]) + "," + fmt_g(bundle.x[k]) + "," + fmt_g(bundle.m[k]) + "," +
               fmt_g(bundle.a[k]) + "\n";
    return out;
}

std::string ensemble_csv(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg) {
    std::string out = "# horizon=" + fmt_g(cfg.horizon) + " window=" + fmt_g(cfg.window) +
                      " n_terms=" + std::to_string(cfg.n_terms) +
                      " seed=" + std::to_string(cfg.seed) +
                      " symmetric=" + (cfg.symmetric ? "1" : "0") +
                      " n_centering=" + std::to_string(cfg.n_centering) + "\n";
    out += "# h=" + fmt_g(ens.h) + " gamma_level=" + fmt_g(ens.gamma_level) + "\n";
    out += "i,gamma,eps,t1,t2,r\n";
    for (std::size_t j = 0; j < ens.size(); ++j)
        out += std::to_string(j + 1) + "," + fmt_g(ens.gamma[j]) + "," +
               std::to_string(ens.eps[j]) + "," + fmt_g(ens.t1[j]) + "," + fmt_g(ens.t2[j]) +
               "," + fmt_g(ens.r[j]) + "\n";
    return out;
}

}  // namespace simma
