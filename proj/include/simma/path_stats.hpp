#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simma/kernels.hpp"
#include "simma/levy_measure.hpp"
#include "simma/series_sim.hpp"

namespace simma {

// Empirical finite-variation diagnostic. Finitely many grids can never prove
// finite variation, so the verdict is a stabilization heuristic and is
// reported as a diagnostic only, never as ground truth.
enum class FvVerdict { Stabilizing, Diverging, Inconclusive };

std::string to_string(FvVerdict v);

// Quadratic and total variation of one path across nested grid refinements.
// Coarser levels are subsamples of the finest grid, so the total-variation
// column is non-decreasing in the level (triangle inequality, exact even in
// floating point when the sampled values subtract exactly).
struct VariationReport {
    std::vector<std::size_t> grid_sizes; // interval counts, increasing, each dividing the finest
    std::vector<double> qv;              // sum of squared increments per level
    std::vector<double> tv;              // sum of absolute increments per level
    FvVerdict verdict_fv = FvVerdict::Inconclusive;
};

// sum over consecutive sampled values of (x[i] - x[i-1])^2; pairwise reduction
double quadratic_variation(const std::vector<double>& path);

// sum over consecutive sampled values of |x[i] - x[i-1]|; pairwise reduction
double total_variation(const std::vector<double>& path);

// finest_path carries grid_sizes.back() + 1 values on a uniform grid; every
// coarser level must divide the finest interval count so its grid is the
// nested subsample. Verdict rule: with at least 3 levels, the ratio
// tv[last]/tv[last-1] inside [0.99, 1.05] reads Stabilizing; ratios above
// 1.05 on every adjacent pair read Diverging; anything else, or fewer than 3
// levels, is Inconclusive. Throws ConfigError on malformed levels.
VariationReport variation_report(const std::vector<double>& finest_path,
                                 const std::vector<std::size_t>& grid_sizes);

// Half-open index windows into a sampled path: the tested increments are
// path[first_hi] - path[first_lo] and path[second_hi] - path[second_lo].
// The two windows must not overlap (sharing an endpoint is fine).
struct IntervalPair {
    std::size_t first_lo = 0;
    std::size_t first_hi = 0;
    std::size_t second_lo = 0;
    std::size_t second_hi = 0;
};

// theta/u grid of the characteristic-function factorization check; small and
// fixed so reports are reproducible across runs and machines
inline constexpr double kCfGrid[6] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

// Evidence for or against independent increments, one entry per interval
// pair: the sample correlation with a self-normalized standard error (finite
// even for infinite-variance increments), and the factorization gap
// sup_{theta,u} |phi_joint - phi_1 * phi_2| of the empirical characteristic
// functions with the influence-function standard error at the maximizing grid
// point. pass requires every correlation and every grid point of every pair
// to sit within 3 standard errors of zero.
struct IndependenceReport {
    std::size_t n_paths = 0;
    std::vector<double> correlation;
    std::vector<double> correlation_se;
    std::vector<double> cf_gap;
    std::vector<double> cf_gap_se;
    bool pass = false;
};

// paths must share one grid; throws InsufficientPaths below 1000 paths and
// ConfigError for empty, overlapping, reversed, or out-of-range windows
IndependenceReport independence_test(const std::vector<std::vector<double>>& paths,
                                     const std::vector<IntervalPair>& pairs);

// Measured one-sided grid differences at the arrival cells of the k largest
// jumps, against the predicted jump r * f(0, mark), across grid refinements.
// Errors are relative to the largest predicted jump magnitude (falling back
// to the largest |r| when the kernel maps every jump to zero, e.g. the
// fractional family). pass means the per-level worst error never grows under
// refinement.
struct JumpMatchReport {
    std::vector<std::size_t> grid_sizes;        // interval counts per refinement level
    std::vector<double> arrival;                // jump times, inside (0, horizon]
    std::vector<double> predicted;              // r * f(0, mark) per tracked jump
    std::vector<std::vector<double>> measured;  // [level][jump] one-sided difference
    std::vector<double> max_rel_error;          // per level
    bool pass = false;
};

// Re-evaluates the path of ens on uniform grids with the given interval
// counts and compares the measured differences at the arrival cells of the k
// largest |r| with arrival time in (0, horizon]. Throws ConfigError on
// malformed levels and DomainError when no nonzero jump lands in the window.
JumpMatchReport jump_match(const ShotNoiseEnsemble& ens, const SeriesConfig& cfg,
                           const RandomMeasure& spec, const KernelSpec& kernel,
                           const std::vector<std::size_t>& grid_sizes,
                           std::size_t k = 20);

// CSV with one row per (instance, grid, statistic); metadata rides in '#'
// comment lines ahead of the header row
std::string variation_csv(const VariationReport& rep, const std::string& instance);
std::string independence_csv(const IndependenceReport& rep, const std::string& instance);
std::string jump_match_csv(const JumpMatchReport& rep, const std::string& instance);

} // namespace simma
