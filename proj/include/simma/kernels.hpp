#pragma once

#include <functional>
#include <optional>

namespace simma {

// how the anchor kernel f0 relates to f in X_t = int [f(t-s,v) - f0(-s,v)] dLambda
enum class F0Mode {
    SameAsF, // stationary-increment form (needed when f grows, e.g. fractional)
    Zero     // plain moving-average form (f must decay for X to be well defined)
};

// declared behavior of |fdot(t,v)|: ~ t^{origin_power} as t -> 0+ and
// ~ t^{infinity_power} e^{infinity_rate t} as t -> infinity (rate <= 0;
// rate = 0 means a pure power)
struct FdotAsymptotics {
    double origin_power = 0.0;
    double infinity_power = 0.0;
    double infinity_rate = 0.0;
};

// Shift kernel f(t,v) of a stationary mixed moving average, its derivative,
// and the recentered kernel g(s,v) = f(s,v) - f(0,v) 1_{s>=0} that carries the
// finite-variation component. All families vanish on t < 0.
class KernelSpec {
  public:
    enum class Family { Fractional, ExponentialOU, Step, Custom };

    using GammaFn = std::function<double(double)>;
    using KernelFn = std::function<double(double, double)>; // (t, v)
    using AsymFn = std::function<std::optional<FdotAsymptotics>(double)>;

    // f(t,v) = t^{gamma(v)} for t >= 0; gamma(v) > 0
    static KernelSpec fractional(double gamma, F0Mode mode = F0Mode::SameAsF);
    static KernelSpec fractional(GammaFn gamma, F0Mode mode = F0Mode::SameAsF);
    // f(t,v) = e^{v t} for t >= 0; marks must satisfy v < 0
    static KernelSpec exponential_ou(F0Mode mode = F0Mode::Zero);
    // f(t,v) = 1 for t >= 0. Declared non-differentiable: fdot() refuses, but
    // g is identically zero so the recentered derivative is an honest 0.
    static KernelSpec step(F0Mode mode = F0Mode::SameAsF);
    // user closures; a null fdot declares the kernel has no usable derivative,
    // a null asymptotics function leaves integrability undecidable
    static KernelSpec custom(KernelFn f, KernelFn fdot, AsymFn asymptotics, F0Mode mode);

    Family family() const { return family_; }
    F0Mode f0_mode() const { return mode_; }
    // does the family declare a time derivative on [0, infinity)?
    bool absolutely_continuous() const;
    // f(t,v) = f(0,v) for all t >= 0, hence g vanishes identically
    bool g_identically_zero() const;
    // f(t,v) provably independent of the mark v (constant-exponent fractional
    // and step kernels); mark integrals then factor through the total mass
    bool mark_invariant() const { return mark_invariant_; }
    double gamma(double v) const; // Fractional only

    double f(double t, double v) const;
    double f0(double t, double v) const;
    // derivative for t > 0 (right limit at t = 0); 0 for t < 0;
    // throws NotAbsolutelyContinuous when the family declares none
    double fdot(double t, double v) const;
    double g(double s, double v) const;

    // declared endpoint behavior of |fdot(., v)|; nullopt when unavailable
    std::optional<FdotAsymptotics> fdot_asymptotics(double v) const;
    std::optional<double> origin_exponent(double v) const;

  private:
    KernelSpec() = default;

    Family family_ = Family::Step;
    F0Mode mode_ = F0Mode::SameAsF;
    bool mark_invariant_ = false;
    GammaFn gamma_;
    KernelFn f_, fdot_;
    AsymFn asym_;
};

} // namespace simma
