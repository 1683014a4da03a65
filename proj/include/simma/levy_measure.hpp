#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace simma {

// three-valued certificate produced by exponent arithmetic; Unknown means the
// declared data cannot decide and the caller must degrade to Inconclusive
enum class Cert { Yes, No, Unknown };

enum class Side { Positive, Negative };

// centered truncation x / max(|x|, 1)
double truncate(double x);

struct Atom {
    double x; // jump size, nonzero
    double w; // weight, positive

    bool operator==(const Atom&) const = default;
};

// One-dimensional Levy measure. Finiteness questions are answered exactly from
// the family parameters; declared exponents make the tabulated family exact as
// well because the density is extended by those power laws beyond the grid.
class LevyMeasure {
  public:
    enum class Family { SymmetricStable, SymmetricTemperedStable, CompoundPoisson, TabulatedDensity };

    // density c |x|^{-alpha-1}, alpha in (0,2), c > 0
    static LevyMeasure symmetric_stable(double alpha, double c);
    // density c |x|^{-alpha-1} e^{-lambda |x|}
    static LevyMeasure symmetric_tempered_stable(double alpha, double lambda, double c);
    static LevyMeasure compound_poisson(std::vector<Atom> atoms);
    // symmetric density sampled on a positive grid; declared exponents (density
    // power at 0, tail-mass power at infinity) extend it beyond the grid.
    // Without a declaration the measure is zero beyond that end of the grid and
    // the corresponding finiteness certificates degrade to Unknown.
    static LevyMeasure tabulated(std::vector<double> x, std::vector<double> density,
                                 std::optional<double> origin_exponent,
                                 std::optional<double> tail_exponent);

    Family family() const { return family_; }
    bool symmetric() const;
    double alpha() const;
    double lambda() const;
    double c() const;
    const std::vector<Atom>& atoms() const;

    // density power p0 at the origin (rho(dx) ~ |x|^{p0} dx); +inf when there is
    // no mass near 0 (compound Poisson)
    double origin_exponent() const;
    bool origin_exponent_known() const;
    // power index of rho((x, inf)) as x -> inf; -inf for lighter-than-power tails
    double tail_exponent() const;
    bool tail_exponent_known() const;

    // pointwise density; throws DomainError for compound Poisson
    double density(double x) const;

    // total mass rho(R \ {0}); +inf for infinite-activity families
    double total_mass() const;

    // is int_{|x|<=1} |x|^q rho(dx) finite?
    Cert origin_moment_finite(double q) const;
    // is int_{|x|>1} |x|^q rho(dx) finite?
    Cert tail_moment_finite(double q) const;

    // rho((x, inf)) or rho((-inf, -x)) for x > 0
    double tail_mass(double x, Side side) const;

    // generalized tail inverse: for s > 0 the smallest x > 0 with
    // rho((x,inf)) <= s (0 if the whole tail already is), mirrored for s < 0
    double tail_inverse(double s) const;

    // int |x|^q rho(dx) over both sides; +inf when a certified endpoint
    // diverges, best-effort grid value for undeclared tabulated data
    double absolute_moment(double q) const;

    // psi(u) = int (|xu| ^ |xu|^2 ... pointwise min) rho(dx); +inf when the
    // first-moment tail diverges
    double psi(double u) const;
    // same against (1 ^ x^{-2}) rho(dx); always finite
    double psi_truncated(double u) const;

    // exact growth exponents of psi: psi(u) ~ u^{a} modulo logs.
    // a_inf governs u -> inf, a_zero governs u -> 0.
    struct PsiProfile {
        Cert finite;        // psi(u) < inf for u != 0?
        double a_inf;       // in [1, 2)
        bool a_inf_log;     // boundary case with a log factor
        bool a_inf_known;   // false when the origin exponent is undeclared
        double a_zero;      // in (1, 2]
        bool a_zero_log;
        bool a_zero_known;  // false when the tail exponent is undeclared
    };
    PsiProfile psi_profile() const;
    PsiProfile psi_truncated_profile() const;

    // int (1 ^ |xu|) rho(dx): the comparison integral behind finite-variation
    // checks; +inf when the small jumps have infinite first moment
    double clip_integral(double u) const;
    // growth exponents of clip_integral: a_inf in [0, 1), a_zero in (0, 1]
    PsiProfile clip_profile() const;

    bool operator==(const LevyMeasure& other) const;

  private:
    LevyMeasure() = default;

    // integral over (0, inf) of g(x) density(x) dx for the continuous families.
    // g must behave like x^{g_origin_power} near 0 and x^{g_tail_power} near inf;
    // a +inf / -inf power declares that g vanishes identically below the first /
    // above the last kink. Returns +inf when exponent arithmetic proves divergence.
    double side_weighted_integral(const std::function<double(double)>& g, double g_origin_power,
                                  double g_tail_power, std::vector<double> kinks) const;
    double tab_density_pos(double x) const;

    Family family_ = Family::SymmetricStable;
    double alpha_ = 0.0, lambda_ = 0.0, c_ = 0.0;
    std::vector<Atom> atoms_;
    // cached per-side tails for compound Poisson: x ascending, suffix weight sums
    std::vector<double> pos_x_, pos_suffix_, neg_x_, neg_suffix_;
    // tabulated: positive half-grid with densities, plus cached segment masses
    std::vector<double> tab_x_, tab_d_, tab_suffix_;
    bool has_origin_ = true, has_tail_ = true;
    double origin_exp_ = 0.0, tail_exp_ = 0.0;
};

// B(x, v) = x b + int (tr(xy) - x tr(y)) rho(dy); exact for symmetric measures
// and atom sums, quadrature otherwise
double char_b(double x, double drift_b, const LevyMeasure& rho);
// jump-free variants (sigma^2 / drift only)
double char_b(double x, double drift_b);
double char_k(double x, double gaussian_var);
// the integral part of B evaluated by quadrature regardless of symmetry
// shortcuts (diagnostic / cross-check path)
double char_b_quadrature(double x, const LevyMeasure& rho);

// K(x, v) = x^2 sigma^2 + int tr(xy)^2 rho(dy)
double char_k(double x, double gaussian_var, const LevyMeasure& rho);
double char_k_quadrature(double x, const LevyMeasure& rho);

// int (|xu| ^ |xu|^2) rho(dx)
double psi_integral(double u, const LevyMeasure& rho);

// ratio checks behind the necessity certificates: the tail-vs-denominator
// ratio stays bounded as u -> inf (ratio_large_u) or uniformly over u > 0 (ratio_all_u)
struct RatioWitness {
    double u;
    double ratio;
};
struct RatioCheck {
    Cert status = Cert::Unknown;
    std::string reason;
    std::vector<RatioWitness> witness;
    double witness_max = 0.0;
};
RatioCheck ratio_large_u(const LevyMeasure& rho);

// ---- marks -----------------------------------------------------------------

struct MarkAtom {
    double v;
    double weight;

    bool operator==(const MarkAtom&) const = default;
};

struct DiscreteMarks {
    std::vector<MarkAtom> atoms;
};

// density w.r.t. Lebesgue on (lo, hi) with power behavior |v|^{exp_near_zero}
// at the endpoint closest to zero and |v|^{exp_at_infinity} when lo = -inf
struct DensityMarks {
    double lo = -1.0;
    double hi = 0.0;
    std::function<double(double)> density;
    double exp_near_zero = 0.0;
    double exp_at_infinity = 0.0;
    double total_mass = 0.0; // filled in by RandomMeasure construction
};

// Independently scattered driver specification: marks plus per-mark
// characteristics (drift b(v), Gaussian variance sigma^2(v), Levy measure rho_v).
class RandomMeasure {
  public:
    static RandomMeasure single(double v, LevyMeasure rho, double drift_b = 0.0,
                                double gaussian_var = 0.0);
    static RandomMeasure discrete(std::vector<MarkAtom> atoms, std::vector<LevyMeasure> rho_per_atom,
                                  std::vector<double> drift_per_atom = {},
                                  std::vector<double> gaussian_per_atom = {});
    static RandomMeasure with_density_marks(DensityMarks marks, LevyMeasure shared_rho,
                                            double drift_b = 0.0, double gaussian_var = 0.0);

    bool discrete_marks() const { return std::holds_alternative<DiscreteMarks>(marks_); }
    std::size_t n_atoms() const;
    const MarkAtom& atom(std::size_t i) const;
    const DensityMarks& density_marks() const;

    const LevyMeasure& levy(std::size_t i) const;     // per discrete atom
    const LevyMeasure& shared_levy() const;           // density marks / constant rho
    double drift(std::size_t i) const;
    double gaussian(std::size_t i) const;

    double total_mark_mass() const;
    bool symmetric() const;      // every rho_v symmetric and every b(v) = 0
    bool constant_levy() const;  // one rho shared by all marks
    bool constant_stable(double* alpha_out = nullptr) const; // all marks symmetric stable
    bool any_compound_poisson() const;
    // stable alpha range over marks when every rho_v is symmetric stable
    bool stable_alpha_range(double& lo, double& hi) const;

  private:
    std::variant<DiscreteMarks, DensityMarks> marks_;
    std::vector<LevyMeasure> levy_;    // size n_atoms() or 1 (shared)
    std::vector<double> drift_;        // same sizing
    std::vector<double> gaussian_;
};

RatioCheck ratio_all_u(const RandomMeasure& spec);

} // namespace simma
