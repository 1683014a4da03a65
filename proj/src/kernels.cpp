#include "simma/kernels.hpp"

#include <cmath>
#include <utility>

#include "simma/errors.hpp"

namespace simma {

KernelSpec KernelSpec::fractional(double gamma, F0Mode mode) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ConfigError("fractional kernel exponent must be positive and finite");
    KernelSpec k = fractional([gamma](double) { return gamma; }, mode);
    k.mark_invariant_ = true;
    return k;
}

KernelSpec KernelSpec::fractional(GammaFn gamma, F0Mode mode) {
    if (!gamma) throw ConfigError("fractional kernel needs an exponent function");
    KernelSpec k;
    k.family_ = Family::Fractional;
    k.mode_ = mode;
    k.gamma_ = std::move(gamma);
    return k;
}

KernelSpec KernelSpec::exponential_ou(F0Mode mode) {
    KernelSpec k;
    k.family_ = Family::ExponentialOU;
    k.mode_ = mode;
    return k;
}

KernelSpec KernelSpec::step(F0Mode mode) {
    KernelSpec k;
    k.family_ = Family::Step;
    k.mode_ = mode;
    k.mark_invariant_ = true;
    return k;
}

KernelSpec KernelSpec::custom(KernelFn f, KernelFn fdot, AsymFn asymptotics, F0Mode mode) {
    if (!f) throw ConfigError("custom kernel needs an evaluation closure");
    KernelSpec k;
    k.family_ = Family::Custom;
    k.mode_ = mode;
    k.f_ = std::move(f);
    k.fdot_ = std::move(fdot);
    k.asym_ = std::move(asymptotics);
    return k;
}

bool KernelSpec::absolutely_continuous() const {
    switch (family_) {
    case Family::Fractional:
    case Family::ExponentialOU: return true;
    case Family::Step: return false;
    case Family::Custom: return static_cast<bool>(fdot_);
    }
    return false;
}

bool KernelSpec::g_identically_zero() const { return family_ == Family::Step; }

double KernelSpec::gamma(double v) const {
    if (family_ != Family::Fractional)
        throw DomainError("kernel family has no fractional exponent");
    const double g = gamma_(v);
    if (!(g > 0.0) || !std::isfinite(g))
        throw DomainError("fractional kernel exponent must be positive and finite");
    return g;
}

namespace {

void require_negative_rate(double v) {
    if (!(v < 0.0)) throw DomainError("exponential kernel needs a negative mixing rate");
}

} // namespace

double KernelSpec::f(double t, double v) const {
    if (t < 0.0) return 0.0;
    switch (family_) {
    case Family::Fractional: return std::pow(t, gamma(v));
    case Family::ExponentialOU:
        require_negative_rate(v);
        return std::exp(v * t);
    case Family::Step: return 1.0;
    case Family::Custom: return f_(t, v);
    }
    return 0.0;
}

double KernelSpec::f0(double t, double v) const {
    return mode_ == F0Mode::SameAsF ? f(t, v) : 0.0;
}

double KernelSpec::fdot(double t, double v) const {
    if (!absolutely_continuous())
        throw NotAbsolutelyContinuous("kernel declares no time derivative");
    if (t < 0.0) return 0.0;
    switch (family_) {
    case Family::Fractional: {
        const double g = gamma(v);
        return g * std::pow(t, g - 1.0);
    }
    case Family::ExponentialOU:
        require_negative_rate(v);
        return v * std::exp(v * t);
    case Family::Step: break; // unreachable: not absolutely continuous
    case Family::Custom: return fdot_(t, v);
    }
    return 0.0;
}

double KernelSpec::g(double s, double v) const {
    if (s < 0.0) return 0.0;
    return f(s, v) - f(0.0, v);
}

std::optional<FdotAsymptotics> KernelSpec::fdot_asymptotics(double v) const {
    switch (family_) {
    case Family::Fractional: {
        const double p = gamma(v) - 1.0;
        return FdotAsymptotics{p, p, 0.0};
    }
    case Family::ExponentialOU:
        require_negative_rate(v);
        return FdotAsymptotics{0.0, 0.0, v};
    case Family::Step: return std::nullopt;
    case Family::Custom:
        if (!asym_) return std::nullopt;
        return asym_(v);
    }
    return std::nullopt;
}

std::optional<double> KernelSpec::origin_exponent(double v) const {
    auto a = fdot_asymptotics(v);
    if (!a) return std::nullopt;
    return a->origin_power;
}

} // namespace simma
