#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simma/kernels.hpp"
#include "simma/levy_measure.hpp"

namespace simma {

// One evaluated integral or hypothesis. "Finite" is always exponent-certified;
// quadrature supplies the numeric value only after certification, so a Yes
// carries a trustworthy value and a No carries +inf with the divergent
// endpoint named in detail.
struct ConditionResult {
    Cert status = Cert::Unknown; // Yes: holds / finite, No: fails / infinite
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string method; // "closed_form" or "exponent+quadrature"
    std::string detail; // divergent endpoint, sampling caveat, or gap note
};

struct NamedCondition {
    std::string name;
    ConditionResult result;
};

enum class NecessityOutcome { Satisfied, Violated, NotApplicable, Unknown };

// Result of the necessity battery. NotApplicable means the driver-activity
// hypothesis (infinite small-jump variation or a Gaussian part, for almost
// every mark) fails, so none of the necessary conditions can be invoked.
struct NecessityResult {
    NecessityOutcome outcome = NecessityOutcome::Unknown;
    std::string violated; // condition name when outcome == Violated
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
    Cert driver_activity = Cert::Unknown;
    Cert ratio_large = Cert::Unknown; // tail/denominator ratio bounded, large u
    Cert ratio_all = Cert::Unknown;   // ... uniformly over u > 0 and marks
    std::vector<NamedCondition> integrals; // everything evaluated on the way
};

// Full semimartingale report: the verdict, which route produced it, every
// integral evaluated, and the certified hypotheses. Serializes to a flat CSV
// row with one column per named integral.
struct CriteriaReport {
    enum class Verdict { Semimartingale, NotSemimartingale, Inconclusive };
    enum class Basis { SufficientConditions, NecessityViolation, ClosedForm, Undecidable };

    Verdict verdict = Verdict::Inconclusive;
    Basis basis = Basis::Undecidable;
    std::string closed_form; // which special case decided (basis == ClosedForm)
    std::string violated;    // which necessary condition failed
    std::string detail;      // blocking gap / assumptions / caveats

    std::vector<NamedCondition> integrals;

    Cert drift_ok = Cert::Unknown;
    Cert driver_activity = Cert::Unknown;
    Cert ratio_large = Cert::Unknown;
    Cert ratio_all = Cert::Unknown;
    bool kernel_ac = false;

    const NamedCondition* find(const std::string& name) const;
    double value_of(const std::string& name) const; // NaN when absent

    std::string csv_header() const;
    std::string csv_row() const;
};

const char* to_string(CriteriaReport::Verdict v);
const char* to_string(CriteriaReport::Basis b);
const char* to_string(Cert c);

// ---- general route: integral conditions on a (kernel, driver) pair ----------

// size of the drift functional: the mark integral of |B(f(0,v), v)|;
// identically 0 for symmetric drivers
ConditionResult check_drift(const RandomMeasure& spec, const KernelSpec& kernel);

// Gaussian energy: mark integral of sigma^2(v) int |fdot(s,v)|^2 ds. A Gaussian
// part together with a kernel that is not absolutely continuous fails outright.
ConditionResult check_gaussian(const RandomMeasure& spec, const KernelSpec& kernel);

// jump energy: the triple integral of |x fdot| ^ |x fdot|^2 against
// rho_v(dx) ds m(dv); finite together with drift + gaussian certifies the
// semimartingale property
ConditionResult check_sufficient(const RandomMeasure& spec, const KernelSpec& kernel);

// necessity battery under the driver-activity hypothesis: absolute continuity
// of the kernel, Gaussian energy, the per-mark jump energy (when the large-u
// ratio condition certifies and marks are discrete), the full jump energy
// (when the uniform ratio condition certifies), and the truncated jump energy
NecessityResult check_necessary(const RandomMeasure& spec, const KernelSpec& kernel);

// combined decision: sufficiency first, then necessity, then the
// finite-variation certificate; Inconclusive names the blocking gap
CriteriaReport verdict(const RandomMeasure& spec, const KernelSpec& kernel);

// ---- closed-form special cases ----------------------------------------------

// fractional kernel t^gamma with a single symmetric driver: semimartingale iff
// sigma^2 = 0, gamma in (0, 1/2), and int |x|^{1/(1-gamma)} rho(dx) < inf.
// Also evaluates the comparison constant gamma^{1/(1-gamma)} (1/gamma + 1/(1-2 gamma)).
CriteriaReport closed_form_fractional(const LevyMeasure& rho, double gaussian_var, double gamma);

// symmetric stable driver, index in (1,2): semimartingale iff the kernel is
// absolutely continuous with int |fdot(s, mark)|^alpha ds < inf
CriteriaReport closed_form_stable(const KernelSpec& kernel, double alpha, double c,
                                  double mark = -1.0);

// symmetric tempered stable driver, index in [1,2): semimartingale iff
// int (|fdot|^alpha ^ |fdot|^2) ds < inf
CriteriaReport closed_form_tempered(const KernelSpec& kernel, double alpha, double lambda,
                                    double c, double mark = -1.0);

// superposition of exponential kernels over marks v < 0 with a shared driver:
// semimartingale iff int psi_rho(|v|) |v|^{-1} m(dv) < inf (plus the Gaussian
// leg when gaussian_var > 0). The divergence direction additionally needs the
// driver's tail and origin regular-variation assumptions, recorded in the
// report. Throws WellDefinednessViolation when int |v|^{-1} m(dv) = inf and
// NonDeterministic when there is neither a jump part nor a Gaussian part.
CriteriaReport closed_form_supou(const std::variant<DiscreteMarks, DensityMarks>& marks,
                                 const std::optional<LevyMeasure>& rho,
                                 double gaussian_var = 0.0);

// stable drivers with a mark-dependent index alpha(v) bounded inside (1,2):
// semimartingale iff sum_i w_i (2-alpha(v_i))^{-1} int |fdot(s,v_i)|^{alpha(v_i)} ds
// converges. Marks come from a generator so countable sequences can be fed in:
// with n_terms the sum is evaluated exactly; without it partial sums are
// accumulated until they stabilize or provably exceed a divergence bound.
CriteriaReport closed_form_multistable(const KernelSpec& kernel,
                                       const std::function<double(double)>& alpha, double c,
                                       const std::function<MarkAtom(std::size_t)>& mark_seq,
                                       std::optional<std::size_t> n_terms);
CriteriaReport closed_form_multistable(const KernelSpec& kernel,
                                       const std::function<double(double)>& alpha, double c,
                                       const DiscreteMarks& marks);

// superposition of fractional kernels t^{gamma(v)} with per-mark drivers:
// semimartingale when gamma < 1/2 m-a.e., sigma^2 = 0, and the weighted moment
// series sum w_v (1/2 - gamma(v))^{-1} int |x|^{1/(1-gamma(v))} rho_v(dx)
// converges; not a semimartingale when the driver activity hypothesis holds
// and a necessary piece fails (or the exponent reaches 1/2 on positive mass)
CriteriaReport closed_form_supflp(const std::function<double(double)>& gamma,
                                  const RandomMeasure& spec);

// finite-variation certificate independent of the necessity route: the driver
// has finite-variation paths (no Gaussian part, finite small-jump first
// moment) and the recentered kernel drift satisfies
// int int (1 ^ |x gdot(s,v)|) rho_v(dx) ds m(dv) < inf
struct FvResult {
    bool finite_variation = false;
    ConditionResult driver; // path variation of the driving measure
    ConditionResult shift;  // the recentered-kernel comparison integral
};
FvResult closed_form_fv(const KernelSpec& kernel, const RandomMeasure& spec);

} // namespace simma
