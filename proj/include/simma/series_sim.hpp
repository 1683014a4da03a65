#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simma/kernels.hpp"
#include "simma/levy_measure.hpp"

namespace simma {

// Window, truncation, and grid for one shot-noise path. The driver's points
// are proposed uniformly in time on [-window, horizon] (the moving-average
// past is cut at -window) and from the normalized mark measure in the mark
// coordinate.
struct SeriesConfig {
    double horizon = 1.0;          // simulate t in [0, horizon]
    double window = 1.0;           // proposal time interval [-window, horizon]
    int n_terms = 1000;            // series truncation
    std::vector<double> grid;      // strictly increasing, grid[0]=0, back()=horizon
    std::uint64_t seed = 0;
    bool symmetric = true;         // all centering terms vanish identically
    int n_centering = 0;           // asymmetric drivers: centering depth (experimental)

    // throws ConfigError on violated invariants
    void validate() const;
};

// One path's ordered shot-noise terms: Gamma partial sums of unit exponentials,
// fair signs, proposal points (t1 = time, t2 = mark), and jump sizes r obtained
// from the driver's tail inverse at level eps * gamma * h.
struct ShotNoiseEnsemble {
    std::vector<double> gamma;
    std::vector<int> eps;
    std::vector<double> t1;
    std::vector<double> t2;
    std::vector<double> r;
    double h = 0.0;           // constant proposal half-density d(kappa~)/d(kappa)/2
    double gamma_level = 0.0; // final partial sum (converts term count to level)

    std::size_t size() const { return gamma.size(); }
};

// Grid values of the path and its decomposition; x[k] = x[0] + m[k] + a[k]
// holds exactly by construction, with m[0] = a[0] = 0.
struct PathBundle {
    std::vector<double> x;
    std::vector<double> m;
    std::vector<double> a;
};

// rejects configurations the simulator cannot represent faithfully: Gaussian
// components, exponential kernels with nonnegative marks, and kernel exponents
// for which the shot-noise series does not converge
void validate_simulable(const RandomMeasure& spec, const KernelSpec& kernel);

// deterministic given (cfg, spec); throws UnnormalizableMarks when the mark
// measure has no finite positive mass to normalize
ShotNoiseEnsemble sample_ensemble(const SeriesConfig& cfg, const RandomMeasure& spec);

// X on the grid: beta(t) + sum_j [ r_j phi(t, T_j) - alpha_j(t) ] with
// phi(t,(s,v)) = f(t-s,v) - f0(-s,v); for symmetric drivers beta and alpha
// vanish exactly. Throws CenteringNotImplemented when cfg.symmetric is false
// and n_centering == 0.
std::vector<double> path_x(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel);

// M on the grid: sum_j r_j f(0, T_j^2) 1{0 < T_j^1 <= t} plus the drift-type
// corrections for asymmetric drivers; piecewise constant between arrivals
std::vector<double> path_m(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel);

// A = X - X_0 - M, exact by construction
std::vector<double> path_a(const std::vector<double>& x, const std::vector<double>& m);

// the same component summed directly through the recentered kernel
// g(s,v) = f(s,v) - f(0,v) 1{s>=0}; agrees with path_a to roundoff for
// symmetric drivers (the only mode it supports)
std::vector<double> path_a_direct(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                                  const RandomMeasure& spec, const KernelSpec& kernel);

// convenience: ensemble + x, m, a in one call (validates everything first)
PathBundle sample_bundle(const SeriesConfig& cfg, const RandomMeasure& spec,
                         const KernelSpec& kernel);

// j-th centering term (1-based): the integral over r in [gamma_{j-1}, gamma_j]
// of the truncated mean of R(eps r h, T) phi(t, T) under fair signs and the
// proposal law of T
double centering_alpha(const ShotNoiseEnsemble& ens, std::size_t j, double t,
                       const SeriesConfig& cfg, const RandomMeasure& spec,
                       const KernelSpec& kernel);

// drift functional beta(t): integral of B(phi(t,(s,v)), v) over the proposal
// window; identically 0 for symmetric drivers
double drift_beta(double t, const SeriesConfig& cfg, const RandomMeasure& spec,
                  const KernelSpec& kernel);

// CSV emission; config echoed in '#' comment lines, then a header row
std::string bundle_csv(const PathBundle& bundle, const SeriesConfig& cfg);
std::string ensemble_csv(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg);

} // namespace simma
