#include "simma/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "simma/errors.hpp"
#include "simma/quadrature.hpp"

namespace simma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kExpQuad = "exponent+quadrature";
const char* kClosed = "closed_form";

std::string fmt(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%g", x);
    return b;
}

std::string fmt_full(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

// growth model of a nonnegative comparison function phi with phi(0) = 0:
// phi(u) ~ u^{a_zero} as u -> 0 and u^{a_inf} as u -> inf, modulo log factors
struct Phi {
    std::function<double(double)> eval; // u >= 0
    Cert finite = Cert::Unknown;        // phi(u) < inf for all u > 0?
    double a_inf = 0.0;
    bool a_inf_known = true;
    double a_zero = 0.0;
    bool a_zero_known = true;
};

Phi from_profile(const LevyMeasure::PsiProfile& pr, std::function<double(double)> eval) {
    Phi p;
    p.eval = std::move(eval);
    p.finite = pr.finite;
    p.a_inf = pr.a_inf;
    p.a_inf_known = pr.a_inf_known;
    p.a_zero = pr.a_zero;
    p.a_zero_known = pr.a_zero_known;
    return p;
}

Phi phi_psi(const LevyMeasure& rho) {
    return from_profile(rho.psi_profile(), [rho](double u) { return rho.psi(u); });
}

Phi phi_psi_truncated(const LevyMeasure& rho) {
    return from_profile(rho.psi_truncated_profile(),
                       [rho](double u) { return rho.psi_truncated(u); });
}

Phi phi_clip(const LevyMeasure& rho) {
    return from_profile(rho.clip_profile(), [rho](double u) { return rho.clip_integral(u); });
}

Phi phi_square(double scale) {
    Phi p;
    p.eval = [scale](double u) { return scale * u * u; };
    p.finite = Cert::Yes;
    p.a_inf = p.a_zero = 2.0;
    return p;
}

Phi phi_power(double a) {
    Phi p;
    p.eval = [a](double u) { return std::pow(u, a); };
    p.finite = Cert::Yes;
    p.a_inf = p.a_zero = a;
    return p;
}

// pointwise min of the power-a and square branches (tempered-stable comparison)
Phi phi_capped_power(double a) {
    Phi p;
    p.eval = [a](double u) { return std::min(std::pow(u, a), u * u); };
    p.finite = Cert::Yes;
    p.a_inf = a;
    p.a_zero = 2.0;
    return p;
}

// int_0^infinity phi(|fdot(s, v)|) ds: finiteness by exponent arithmetic on the
// kernel's declared derivative asymptotics and phi's growth exponents, then the
// numeric value by quadrature
ConditionResult time_integral(const KernelSpec& k, double v, const Phi& phi) {
    ConditionResult r;
    r.method = kExpQuad;
    if (k.g_identically_zero()) {
        r.status = Cert::Yes;
        r.value = 0.0;
        r.method = kClosed;
        r.detail = "recentered kernel derivative vanishes identically";
        return r;
    }
    if (!k.absolutely_continuous()) {
        r.detail = "kernel is not absolutely continuous in time";
        return r;
    }
    if (phi.finite == Cert::No) {
        r.status = Cert::No;
        r.value = kInf;
        r.detail = "comparison function is infinite for every nonzero argument";
        return r;
    }
    if (phi.finite == Cert::Unknown) {
        r.detail = "comparison function finiteness undeclared";
        return r;
    }
    const auto asym = k.fdot_asymptotics(v);
    if (!asym) {
        r.detail = "no declared derivative asymptotics";
        return r;
    }

    const double p = asym->origin_power;
    double e0 = 0.0;
    if (p < 0.0) {
        if (!phi.a_inf_known) {
            r.detail = "large-argument growth of the comparison function undeclared";
            return r;
        }
        e0 = p * phi.a_inf;
        if (e0 <= -1.0) {
            r.status = Cert::No;
            r.value = kInf;
            r.detail = "diverges near time 0";
            return r;
        }
    } else if (p > 0.0 && phi.a_zero_known) {
        e0 = p * phi.a_zero;
    }

    double einf;
    const double q = asym->infinity_power;
    if (asym->infinity_rate < 0.0) {
        einf = -kInf; // exponential decay dominates every power of phi
    } else if (q < 0.0) {
        if (!phi.a_zero_known) {
            r.detail = "small-argument decay of the comparison function undeclared";
            return r;
        }
        einf = q * phi.a_zero;
        if (einf >= -1.0) {
            r.status = Cert::No;
            r.value = kInf;
            r.detail = "diverges at large times";
            return r;
        }
    } else {
        r.status = Cert::No;
        r.value = kInf;
        r.detail = "derivative does not vanish at large times";
        return r;
    }

    r.status = Cert::Yes;
    quad::Options opt;
    if (k.family() == KernelSpec::Family::ExponentialOU) {
        // exact substitution u = |fdot(s,v)| = |v| e^{v s}:
        // integral = (1/|v|) int_0^{|v|} phi(u) / u du
        const double av = std::abs(v);
        auto f = [&phi](double u) { return phi.eval(u) / u; };
        const double ez = (phi.a_zero_known ? phi.a_zero : 1.0) - 1.0;
        r.value = quad::integrate_to_zero(f, av, ez, opt).value / av;
        return r;
    }
    auto h = [&](double s) { return phi.eval(std::abs(k.fdot(s, v))); };
    const double split = 1.0;
    r.value = quad::integrate_to_zero(h, split, e0, opt).value +
              quad::integrate_to_inf(h, split, einf, opt).value;
    return r;
}

// m-integrated time integral: sum / integrate w(v) time_integral(kernel, v, phi)
// over the marks. phi_at(i) supplies the comparison function per discrete atom;
// with density marks only index 0 (the shared driver) is consulted.
ConditionResult aggregate_time_integral(const RandomMeasure& spec, const KernelSpec& kernel,
                                        const std::function<Phi(std::size_t)>& phi_at) {
    ConditionResult out;
    out.method = kExpQuad;
    if (spec.discrete_marks()) {
        double sum = 0.0;
        bool unknown = false;
        std::string unknown_why;
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            const auto& a = spec.atom(i);
            const auto t = time_integral(kernel, a.v, phi_at(i));
            if (t.status == Cert::No) {
                out.status = Cert::No;
                out.value = kInf;
                out.detail = t.detail + " (mark v=" + fmt(a.v) + ")";
                return out;
            }
            if (t.status == Cert::Unknown && !unknown) {
                unknown = true;
                unknown_why = t.detail + " (mark v=" + fmt(a.v) + ")";
            }
            if (t.status == Cert::Yes) sum += a.weight * t.value;
        }
        if (unknown) {
            out.detail = unknown_why;
            return out;
        }
        out.status = Cert::Yes;
        out.value = sum;
        return out;
    }

    const Phi phi = phi_at(0);
    const auto& dm = spec.density_marks();
    if (kernel.mark_invariant()) {
        out = time_integral(kernel, -1.0, phi);
        if (out.status == Cert::Yes) out.value *= spec.total_mark_mass();
        return out;
    }
    if (kernel.family() != KernelSpec::Family::ExponentialOU) {
        out.detail = "mark integral over continuum marks is only certified for exponential "
                     "and mark-invariant kernels";
        return out;
    }
    if (phi.finite == Cert::No) {
        out.status = Cert::No;
        out.value = kInf;
        out.detail = "comparison function is infinite for every nonzero argument";
        return out;
    }
    if (phi.finite == Cert::Unknown) {
        out.detail = "comparison function finiteness undeclared";
        return out;
    }
    // per-mark integral I(v) ~ |v|^{a_zero - 1} near 0 and |v|^{a_inf - 1} at inf
    const double wlo = -dm.hi, whi = -dm.lo;
    double elo = 0.0;
    if (wlo == 0.0) {
        if (!phi.a_zero_known) {
            out.detail = "small-argument decay of the comparison function undeclared";
            return out;
        }
        elo = dm.exp_near_zero + phi.a_zero - 1.0;
        if (elo <= -1.0) {
            out.status = Cert::No;
            out.value = kInf;
            out.detail = "mark integral diverges near v = 0";
            return out;
        }
    }
    double ehi = 0.0;
    if (std::isinf(whi)) {
        if (!phi.a_inf_known) {
            out.detail = "large-argument growth of the comparison function undeclared";
            return out;
        }
        ehi = dm.exp_at_infinity + phi.a_inf - 1.0;
        if (ehi >= -1.0) {
            out.status = Cert::No;
            out.value = kInf;
            out.detail = "mark integral diverges as v -> -inf";
            return out;
        }
    }
    auto F = [&](double w) {
        return dm.density(-w) * time_integral(kernel, -w, phi).value;
    };
    quad::Options opt;
    std::vector<double> anchors;
    if (wlo > 0.0) anchors.push_back(wlo);
    if (1.0 > wlo && 1.0 < whi) anchors.push_back(1.0);
    if (!std::isinf(whi)) anchors.push_back(whi);
    double total = 0.0;
    if (wlo == 0.0) total += quad::integrate_to_zero(F, anchors.front(), elo, opt).value;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i)
        total += quad::integrate(F, anchors[i], anchors[i + 1], opt).value;
    if (std::isinf(whi)) total += quad::integrate_to_inf(F, anchors.back(), ehi, opt).value;
    out.status = Cert::Yes;
    out.value = total;
    return out;
}

// per-mark (not m-integrated) battery: the condition must hold for m-almost
// every mark; reports the largest finite value or the first divergent mark
ConditionResult per_mark_battery(const RandomMeasure& spec, const KernelSpec& kernel,
                                 const std::function<Phi(std::size_t)>& phi_at) {
    ConditionResult out;
    out.method = kExpQuad;
    if (spec.discrete_marks()) {
        double worst = 0.0;
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            const auto& a = spec.atom(i);
            const auto t = time_integral(kernel, a.v, phi_at(i));
            if (t.status == Cert::No) {
                out.status = Cert::No;
                out.value = kInf;
                out.detail = t.detail + " (mark v=" + fmt(a.v) + ")";
                return out;
            }
            if (t.status == Cert::Unknown) {
                out.detail = t.detail + " (mark v=" + fmt(a.v) + ")";
                return out;
            }
            worst = std::max(worst, t.value);
        }
        out.status = Cert::Yes;
        out.value = worst;
        out.detail = "largest value over marks";
        return out;
    }

    const Phi phi = phi_at(0);
    const auto& dm = spec.density_marks();
    if (kernel.mark_invariant()) return time_integral(kernel, -1.0, phi);
    if (kernel.family() != KernelSpec::Family::ExponentialOU) {
        out.detail = "per-mark condition over continuum marks is only certified for "
                     "exponential and mark-invariant kernels";
        return out;
    }
    // exponential kernels: bounded derivative with strictly negative decay rate
    // at every mark v < 0, so the per-mark integral is finite whenever the
    // comparison function is
    if (phi.finite == Cert::No) {
        out.status = Cert::No;
        out.value = kInf;
        out.detail = "comparison function is infinite for every nonzero argument";
        return out;
    }
    if (phi.finite == Cert::Unknown) {
        out.detail = "comparison function finiteness undeclared";
        return out;
    }
    const double wlo = -dm.hi, whi = -dm.lo;
    double wstar = 1.0;
    if (wstar < wlo || wstar > whi)
        wstar = std::isinf(whi) ? 2.0 * std::max(wlo, 1.0) : 0.5 * (wlo + whi);
    out = time_integral(kernel, -wstar, phi);
    out.detail = "finite for every mark; value shown at a representative mark";
    return out;
}

// the necessity hypothesis: every mark carries a Gaussian part or small jumps
// of infinite variation
Cert activity_cert(const RandomMeasure& spec) {
    auto one = [](const LevyMeasure& rho, double s2) {
        if (s2 > 0.0) return Cert::Yes;
        const Cert c = rho.origin_moment_finite(1.0);
        if (c == Cert::No) return Cert::Yes;
        if (c == Cert::Yes) return Cert::No;
        return Cert::Unknown;
    };
    bool unknown = false;
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            const Cert c = one(spec.levy(i), spec.gaussian(i));
            if (c == Cert::No) return Cert::No;
            if (c == Cert::Unknown) unknown = true;
        }
        return unknown ? Cert::Unknown : Cert::Yes;
    }
    return one(spec.shared_levy(), spec.gaussian(0));
}

Cert ratio_large_aggregate(const RandomMeasure& spec) {
    bool unknown = false;
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            const Cert c = ratio_large_u(spec.levy(i)).status;
            if (c == Cert::No) return Cert::No;
            if (c == Cert::Unknown) unknown = true;
        }
        return unknown ? Cert::Unknown : Cert::Yes;
    }
    return ratio_large_u(spec.shared_levy()).status;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' ) c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

// ---- report plumbing ----------------------------------------------------------

const char* to_string(CriteriaReport::Verdict v) {
    switch (v) {
    case CriteriaReport::Verdict::Semimartingale: return "Semimartingale";
    case CriteriaReport::Verdict::NotSemimartingale: return "NotSemimartingale";
    case CriteriaReport::Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

const char* to_string(CriteriaReport::Basis b) {
    switch (b) {
    case CriteriaReport::Basis::SufficientConditions: return "sufficient_conditions";
    case CriteriaReport::Basis::NecessityViolation: return "necessity_violation";
    case CriteriaReport::Basis::ClosedForm: return "closed_form";
    case CriteriaReport::Basis::Undecidable: return "undecidable";
    }
    return "undecidable";
}

const char* to_string(Cert c) {
    switch (c) {
    case Cert::Yes: return "yes";
    case Cert::No: return "no";
    case Cert::Unknown: return "unknown";
    }
    return "unknown";
}

const NamedCondition* CriteriaReport::find(const std::string& name) const {
    for (const auto& e : integrals)
        if (e.name == name) return &e;
    return nullptr;
}

double CriteriaReport::value_of(const std::string& name) const {
    const auto* e = find(name);
    return e ? e->result.value : kNaN;
}

std::string CriteriaReport::csv_header() const {
    std::string h = "verdict,basis,closed_form,violated,driver_activity,ratio_large_u,"
                    "ratio_all_u,kernel_ac";
    for (const auto& e : integrals) h += "," + e.name;
    h += ",detail";
    return h;
}

std::string CriteriaReport::csv_row() const {
    std::string r = to_string(verdict);
    r += ",";
    r += to_string(basis);
    r += "," + sanitize(closed_form) + "," + sanitize(violated);
    r += ",";
    r += to_string(driver_activity);
    r += ",";
    r += to_string(ratio_large);
    r += ",";
    r += to_string(ratio_all);
    r += kernel_ac ? ",yes" : ",no";
    for (const auto& e : integrals) r += "," + fmt_full(e.result.value);
    r += "," + sanitize(detail);
    return r;
}

// ---- general-route conditions ----------------------------------------------------

ConditionResult check_drift(const RandomMeasure& spec, const KernelSpec& kernel) {
    ConditionResult r;
    r.method = kClosed;
    if (spec.symmetric()) {
        r.status = Cert::Yes;
        r.value = 0.0;
        r.detail = "symmetric driver: the drift functional vanishes";
        return r;
    }
    if (spec.discrete_marks()) {
        double s = 0.0;
        for (std::size_t i = 0; i < spec.n_atoms(); ++i) {
            const auto& a = spec.atom(i);
            s += a.weight * std::abs(char_b(kernel.f(0.0, a.v), spec.drift(i), spec.levy(i)));
        }
        r.status = Cert::Yes;
        r.value = s;
        return r;
    }
    // continuum marks: the built-in kernels start at a mark-independent value
    double x0;
    switch (kernel.family()) {
    case KernelSpec::Family::Fractional: x0 = 0.0; break;
    case KernelSpec::Family::ExponentialOU:
    case KernelSpec::Family::Step: x0 = 1.0; break;
    default:
        r.detail = "drift size over continuum marks needs a mark-independent kernel "
                   "start value";
        return r;
    }
    r.status = Cert::Yes;
    r.value = std::abs(char_b(x0, spec.drift(0), spec.shared_levy())) * spec.total_mark_mass();
    return r;
}

ConditionResult check_gaussian(const RandomMeasure& spec, const KernelSpec& kernel) {
    bool any_gauss = false;
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i)
            if (spec.gaussian(i) > 0.0) any_gauss = true;
    } else {
        any_gauss = spec.gaussian(0) > 0.0;
    }
    ConditionResult r;
    if (!any_gauss) {
        r.status = Cert::Yes;
        r.value = 0.0;
        r.method = kClosed;
        r.detail = "no Gaussian part";
        return r;
    }
    if (!kernel.absolutely_continuous()) {
        r.status = Cert::No;
        r.value = kInf;
        r.method = kClosed;
        r.detail = "Gaussian part with a kernel that is not absolutely continuous";
        return r;
    }
    return aggregate_time_integral(spec, kernel,
                                   [&](std::size_t i) { return phi_square(spec.gaussian(i)); });
}

ConditionResult check_sufficient(const RandomMeasure& spec, const KernelSpec& kernel) {
    return aggregate_time_integral(spec, kernel,
                                   [&](std::size_t i) { return phi_psi(spec.levy(i)); });
}

NecessityResult check_necessary(const RandomMeasure& spec, const KernelSpec& kernel) {
    NecessityResult n;
    n.driver_activity = activity_cert(spec);
    if (n.driver_activity == Cert::No) {
        n.outcome = NecessityOutcome::NotApplicable;
        n.detail = "driver small jumps have finite variation and no Gaussian part; the "
                   "necessity conditions do not apply";
        return n;
    }
    if (n.driver_activity == Cert::Unknown) {
        n.outcome = NecessityOutcome::Unknown;
        n.detail = "driver activity hypothesis undecided";
        return n;
    }
    n.ratio_large = ratio_large_aggregate(spec);
    n.ratio_all = ratio_all_u(spec).status;

    if (!kernel.absolutely_continuous()) {
        n.outcome = NecessityOutcome::Violated;
        n.violated = "kernel_absolute_continuity";
        n.detail = "the kernel must be absolutely continuous in time";
        return n;
    }

    bool unknown_seen = false;
    std::string unknown_detail;
    auto note_unknown = [&](const std::string& name, const ConditionResult& c) {
        if (!unknown_seen) {
            unknown_seen = true;
            unknown_detail = name + ": " + c.detail;
        }
    };

    const auto ge = check_gaussian(spec, kernel);
    n.integrals.push_back({"gaussian_energy", ge});
    if (ge.status == Cert::No) {
        n.outcome = NecessityOutcome::Violated;
        n.violated = "gaussian_energy";
        n.value = kInf;
        n.detail = ge.detail;
        return n;
    }
    if (ge.status == Cert::Unknown) note_unknown("gaussian_energy", ge);

    if (n.ratio_large == Cert::Yes && spec.discrete_marks()) {
        const auto mw = per_mark_battery(
            spec, kernel, [&](std::size_t i) { return phi_psi(spec.levy(i)); });
        n.integrals.push_back({"markwise_jump_energy", mw});
        if (mw.status == Cert::No) {
            n.outcome = NecessityOutcome::Violated;
            n.violated = "markwise_jump_energy";
            n.value = kInf;
            n.detail = mw.detail;
            return n;
        }
        if (mw.status == Cert::Unknown) note_unknown("markwise_jump_energy", mw);
    } else {
        ConditionResult skip;
        skip.detail = spec.discrete_marks() ? "large-u ratio condition not certified"
                                            : "needs finitely many marks";
        n.integrals.push_back({"markwise_jump_energy", skip});
    }

    if (n.ratio_all == Cert::Yes) {
        const auto je = check_sufficient(spec, kernel);
        n.integrals.push_back({"jump_energy", je});
        if (je.status == Cert::No) {
            n.outcome = NecessityOutcome::Violated;
            n.violated = "jump_energy";
            n.value = kInf;
            n.detail = je.detail;
            return n;
        }
        if (je.status == Cert::Unknown) note_unknown("jump_energy", je);
    }

    const auto tr = per_mark_battery(
        spec, kernel, [&](std::size_t i) { return phi_psi_truncated(spec.levy(i)); });
    n.integrals.push_back({"truncated_jump_energy", tr});
    if (tr.status == Cert::No) {
        n.outcome = NecessityOutcome::Violated;
        n.violated = "truncated_jump_energy";
        n.value = kInf;
        n.detail = tr.detail;
        return n;
    }
    if (tr.status == Cert::Unknown) note_unknown("truncated_jump_energy", tr);

    if (unknown_seen) {
        n.outcome = NecessityOutcome::Unknown;
        n.detail = unknown_detail;
    } else {
        n.outcome = NecessityOutcome::Satisfied;
        n.detail = "every applicable necessary condition is finite";
    }
    return n;
}

CriteriaReport verdict(const RandomMeasure& spec, const KernelSpec& kernel) {
    CriteriaReport rep;
    rep.kernel_ac = kernel.absolutely_continuous();

    const auto dr = check_drift(spec, kernel);
    const auto ge = check_gaussian(spec, kernel);
    const auto je = check_sufficient(spec, kernel);
    rep.integrals.push_back({"drift", dr});
    rep.integrals.push_back({"gaussian_energy", ge});
    rep.integrals.push_back({"jump_energy", je});
    rep.drift_ok = dr.status;

    const auto nec = check_necessary(spec, kernel);
    rep.driver_activity = nec.driver_activity;
    rep.ratio_large = nec.ratio_large;
    rep.ratio_all = nec.ratio_all;
    for (const auto& e : nec.integrals)
        if (!rep.find(e.name)) rep.integrals.push_back(e);
    for (const char* name : {"markwise_jump_energy", "truncated_jump_energy"}) {
        if (!rep.find(name)) {
            ConditionResult pending;
            pending.detail = "not evaluated";
            rep.integrals.push_back({name, pending});
        }
    }

    const auto fv = closed_form_fv(kernel, spec);
    rep.integrals.push_back({"fv_driver", fv.driver});
    rep.integrals.push_back({"fv_shift", fv.shift});

    if (rep.kernel_ac && dr.status == Cert::Yes && ge.status == Cert::Yes &&
        je.status == Cert::Yes) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::SufficientConditions;
        rep.detail = "drift, Gaussian energy, and jump energy all finite";
        return rep;
    }
    if (nec.outcome == NecessityOutcome::Violated) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::NecessityViolation;
        rep.violated = nec.violated;
        rep.detail = nec.detail;
        return rep;
    }
    if (fv.finite_variation) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.closed_form = "finite_variation";
        rep.detail = nec.outcome == NecessityOutcome::NotApplicable
                         ? "finite-variation driver and shift component (necessity "
                           "conditions not applicable)"
                         : "finite-variation driver and shift component";
        return rep;
    }

    rep.verdict = CriteriaReport::Verdict::Inconclusive;
    rep.basis = CriteriaReport::Basis::Undecidable;
    if (nec.outcome == NecessityOutcome::NotApplicable) {
        rep.detail = "necessity hypothesis fails (finite-variation small jumps, no Gaussian "
                     "part) and no finite-variation certificate";
    } else if (nec.outcome == NecessityOutcome::Unknown) {
        rep.detail = "necessity battery undecided: " + nec.detail;
    } else if (je.status == Cert::No && rep.ratio_all != Cert::Yes &&
               !spec.discrete_marks() && rep.ratio_large == Cert::Yes) {
        rep.detail = "jump energy diverges but only the large-u ratio condition is "
                     "certified and the marks form a continuum";
    } else if (je.status == Cert::No) {
        rep.detail = "jump energy diverges but no ratio condition certifies its necessity";
    } else if (je.status == Cert::Unknown) {
        rep.detail = "jump energy undecided: " + je.detail;
    } else if (ge.status == Cert::Unknown) {
        rep.detail = "Gaussian energy undecided: " + ge.detail;
    } else if (!rep.kernel_ac) {
        rep.detail = "kernel is not absolutely continuous and no closed form applies";
    } else {
        rep.detail = "sufficient conditions failed without a certified necessity violation";
    }
    return rep;
}

// ---- finite-variation certificate -------------------------------------------------

FvResult closed_form_fv(const KernelSpec& kernel, const RandomMeasure& spec) {
    FvResult res;
    Cert drv = Cert::Yes;
    std::string why;
    double worst = 0.0;
    auto leg = [&](const LevyMeasure& rho, double s2) {
        if (s2 > 0.0) {
            drv = Cert::No;
            why = "Gaussian component has infinite variation";
            return;
        }
        const Cert c = rho.origin_moment_finite(1.0);
        if (c == Cert::No) {
            drv = Cert::No;
            why = "small jumps have infinite first moment";
        } else if (c == Cert::Unknown && drv == Cert::Yes) {
            drv = Cert::Unknown;
            why = "small-jump first moment undecided";
        } else if (c == Cert::Yes && drv == Cert::Yes) {
            worst = std::max(worst, rho.clip_integral(1.0));
        }
    };
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms() && drv != Cert::No; ++i)
            leg(spec.levy(i), spec.gaussian(i));
    } else {
        leg(spec.shared_levy(), spec.gaussian(0));
    }
    res.driver.status = drv;
    res.driver.method = kClosed;
    res.driver.detail = why;
    res.driver.value = drv == Cert::Yes ? worst : (drv == Cert::No ? kInf : kNaN);

    res.shift = aggregate_time_integral(spec, kernel,
                                        [&](std::size_t i) { return phi_clip(spec.levy(i)); });
    res.finite_variation = res.driver.status == Cert::Yes && res.shift.status == Cert::Yes;
    return res;
}

// ---- closed forms ------------------------------------------------------------------

CriteriaReport closed_form_fractional(const LevyMeasure& rho, double gaussian_var,
                                      double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw DomainError("fractional kernel exponent must be positive and finite");
    if (gaussian_var < 0.0 || !std::isfinite(gaussian_var))
        throw DomainError("gaussian variance must be nonnegative and finite");
    CriteriaReport rep;
    rep.closed_form = "fractional";
    rep.kernel_ac = true;
    rep.driver_activity = activity_cert(RandomMeasure::single(-1.0, rho, 0.0, gaussian_var));

    ConditionResult cst;
    cst.method = kClosed;
    if (gamma < 0.5) {
        cst.status = Cert::Yes;
        cst.value = std::pow(gamma, 1.0 / (1.0 - gamma)) *
                    (1.0 / gamma + 1.0 / (1.0 - 2.0 * gamma));
    } else {
        cst.status = Cert::No;
        cst.value = kInf;
        cst.detail = "comparison constant diverges at exponent one half";
    }
    rep.integrals.push_back({"kernel_constant", cst});

    ConditionResult mom;
    mom.method = kExpQuad;
    if (gamma < 1.0) {
        const double q = 1.0 / (1.0 - gamma);
        const Cert co = rho.origin_moment_finite(q);
        const Cert ct = rho.tail_moment_finite(q);
        if (co == Cert::No || ct == Cert::No) {
            mom.status = Cert::No;
            mom.value = kInf;
            mom.detail = co == Cert::No ? "moment integral diverges at the origin"
                                        : "moment integral diverges in the tail";
        } else if (co == Cert::Yes && ct == Cert::Yes) {
            mom.status = Cert::Yes;
            mom.value = rho.absolute_moment(q);
        } else {
            mom.detail = "moment integral undecided (undeclared exponent)";
        }
    } else {
        mom.detail = "not evaluated (kernel exponent at least one)";
    }
    rep.integrals.push_back({"moment_integral", mom});

    if (gaussian_var > 0.0) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "gaussian_part";
        rep.detail = "a Gaussian part rules out the fractional-kernel semimartingale "
                     "property";
        return rep;
    }
    if (gamma >= 0.5) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "kernel_exponent";
        rep.detail = "kernel exponent at least one half";
        return rep;
    }
    switch (mom.status) {
    case Cert::Yes:
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.detail = "moment integral of order 1/(1-gamma) finite";
        break;
    case Cert::No:
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "moment_integral";
        rep.detail = mom.detail;
        break;
    case Cert::Unknown:
        rep.verdict = CriteriaReport::Verdict::Inconclusive;
        rep.basis = CriteriaReport::Basis::Undecidable;
        rep.detail = mom.detail;
        break;
    }
    return rep;
}

CriteriaReport closed_form_stable(const KernelSpec& kernel, double alpha, double c,
                                  double mark) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("this criterion needs a stable index in (1,2)");
    if (!(c > 0.0)) throw DomainError("stable scale must be positive");
    CriteriaReport rep;
    rep.closed_form = "stable";
    rep.kernel_ac = kernel.absolutely_continuous();
    rep.driver_activity = Cert::Yes; // index above one: infinite small-jump variation
    rep.ratio_large = Cert::Yes;
    rep.ratio_all = Cert::Yes;

    const double C = 2.0 * c * (1.0 / (2.0 - alpha) + 1.0 / (alpha - 1.0));
    ConditionResult cst;
    cst.status = Cert::Yes;
    cst.value = C;
    cst.method = kClosed;
    rep.integrals.push_back({"kernel_constant", cst});

    const auto T = time_integral(kernel, mark, phi_power(alpha));
    rep.integrals.push_back({"derivative_power_integral", T});
    ConditionResult jeq = T;
    if (T.status == Cert::Yes) jeq.value = C * T.value;
    rep.integrals.push_back({"jump_energy", jeq});

    if (T.status == Cert::Yes) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.detail = "derivative power integral finite";
        return rep;
    }
    if (!rep.kernel_ac) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "kernel_absolute_continuity";
        rep.detail = "the kernel must be absolutely continuous in time";
        return rep;
    }
    if (T.status == Cert::No) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "derivative_power_integral";
        rep.detail = T.detail;
        return rep;
    }
    rep.verdict = CriteriaReport::Verdict::Inconclusive;
    rep.basis = CriteriaReport::Basis::Undecidable;
    rep.detail = T.detail;
    return rep;
}

CriteriaReport closed_form_tempered(const KernelSpec& kernel, double alpha, double lambda,
                                    double c, double mark) {
    if (!(alpha >= 1.0 && alpha < 2.0))
        throw DomainError("this criterion needs a tempered stable index in [1,2)");
    if (!(lambda > 0.0)) throw DomainError("tempering rate must be positive");
    if (!(c > 0.0)) throw DomainError("tempered stable scale must be positive");
    CriteriaReport rep;
    rep.closed_form = "tempered_stable";
    rep.kernel_ac = kernel.absolutely_continuous();
    rep.driver_activity = Cert::Yes; // index at least one: infinite small-jump variation
    rep.ratio_large = Cert::Yes;
    rep.ratio_all = alpha > 1.0 ? Cert::Yes : Cert::Unknown;

    const auto T = time_integral(kernel, mark, phi_capped_power(alpha));
    rep.integrals.push_back({"derivative_energy", T});

    if (T.status == Cert::Yes) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.detail = "capped derivative power integral finite";
        return rep;
    }
    if (!rep.kernel_ac) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "kernel_absolute_continuity";
        rep.detail = "the kernel must be absolutely continuous in time";
        return rep;
    }
    if (T.status == Cert::No) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "derivative_energy";
        rep.detail = T.detail;
        return rep;
    }
    rep.verdict = CriteriaReport::Verdict::Inconclusive;
    rep.basis = CriteriaReport::Basis::Undecidable;
    rep.detail = T.detail;
    return rep;
}

CriteriaReport closed_form_supou(const std::variant<DiscreteMarks, DensityMarks>& marks,
                                 const std::optional<LevyMeasure>& rho, double gaussian_var) {
    if (gaussian_var < 0.0 || !std::isfinite(gaussian_var))
        throw DomainError("gaussian variance must be nonnegative and finite");
    if (!rho && gaussian_var == 0.0)
        throw NonDeterministic("superposition driver needs a jump part or a Gaussian part");

    const DiscreteMarks* dm = std::get_if<DiscreteMarks>(&marks);
    const DensityMarks* cm = std::get_if<DensityMarks>(&marks);
    if (dm) {
        if (dm->atoms.empty()) throw ConfigError("mark measure needs at least one atom");
        for (const auto& a : dm->atoms) {
            if (!(a.v < 0.0) || !std::isfinite(a.v))
                throw DomainError("exponential rates require marks v < 0");
            if (!(a.weight > 0.0) || !std::isfinite(a.weight))
                throw ConfigError("mark weights must be positive and finite");
        }
    } else {
        if (!cm->density) throw ConfigError("density marks need a density closure");
        if (!(cm->lo < cm->hi) || !(cm->hi <= 0.0))
            throw DomainError("density marks must live on an interval (lo, hi) with hi <= 0");
    }

    CriteriaReport rep;
    rep.closed_form = "ou_superposition";
    rep.kernel_ac = true;

    // integrate F(|v|) against the marks; F ~ w^{e_zero} near 0, ~ w^{e_inf} at inf
    auto integrate_marks = [&](const std::function<double(double)>& F, double e_zero,
                               double e_inf) -> std::pair<Cert, double> {
        if (dm) {
            double s = 0.0;
            for (const auto& a : dm->atoms) {
                const double t = F(-a.v);
                if (!std::isfinite(t)) return {Cert::No, kInf};
                s += a.weight * t;
            }
            return {Cert::Yes, s};
        }
        const double wlo = -cm->hi, whi = -cm->lo;
        if (wlo == 0.0 && cm->exp_near_zero + e_zero <= -1.0) return {Cert::No, kInf};
        if (std::isinf(whi) && cm->exp_at_infinity + e_inf >= -1.0) return {Cert::No, kInf};
        auto G = [&](double w) { return cm->density(-w) * F(w); };
        quad::Options opt;
        std::vector<double> anchors;
        if (wlo > 0.0) anchors.push_back(wlo);
        if (1.0 > wlo && 1.0 < whi) anchors.push_back(1.0);
        if (!std::isinf(whi)) anchors.push_back(whi);
        double total = 0.0;
        if (wlo == 0.0)
            total += quad::integrate_to_zero(G, anchors.front(), cm->exp_near_zero + e_zero,
                                             opt)
                         .value;
        for (std::size_t i = 0; i + 1 < anchors.size(); ++i)
            total += quad::integrate(G, anchors[i], anchors[i + 1], opt).value;
        if (std::isinf(whi))
            total += quad::integrate_to_inf(G, anchors.back(), cm->exp_at_infinity + e_inf,
                                            opt)
                         .value;
        return {Cert::Yes, total};
    };

    // well-definedness: the inverse absolute mark moment must be finite
    const auto inv = integrate_marks([](double w) { return 1.0 / w; }, -1.0, -1.0);
    ConditionResult invc;
    invc.status = inv.first;
    invc.value = inv.second;
    invc.method = kExpQuad;
    rep.integrals.push_back({"inverse_mark_moment", invc});
    if (inv.first != Cert::Yes || !std::isfinite(inv.second))
        throw WellDefinednessViolation("the inverse absolute mark moment diverges");

    // driver log-moment (well-definedness) and the regular-variation assumptions
    ConditionResult logm, tail_rv, origin_rv;
    logm.method = kClosed;
    tail_rv.method = kClosed;
    origin_rv.method = kClosed;
    if (rho) {
        logm.status = rho->tail_exponent_known() ? Cert::Yes : Cert::Unknown;
        if (logm.status == Cert::Unknown) logm.detail = "tail exponent undeclared";
        const Cert t2 = rho->tail_moment_finite(2.0);
        if (t2 == Cert::Yes ||
            (rho->tail_exponent_known() && rho->tail_exponent() >= -2.0 &&
             rho->tail_exponent() < -1.0)) {
            tail_rv.status = Cert::Yes;
        } else if (!rho->tail_exponent_known()) {
            tail_rv.status = Cert::Unknown;
            tail_rv.detail = "tail exponent undeclared";
        } else {
            tail_rv.status = Cert::No;
            tail_rv.detail = "tail neither square-integrable nor regularly varying with "
                             "index in [-2,-1)";
        }
        if (rho->origin_exponent_known()) {
            const double idx = rho->origin_exponent() + 1.0;
            origin_rv.status = (idx > -2.0 && idx < -1.0) ? Cert::Yes : Cert::No;
            if (origin_rv.status == Cert::No)
                origin_rv.detail = "origin regular-variation index outside (-2,-1)";
        } else {
            origin_rv.status = Cert::Unknown;
            origin_rv.detail = "origin exponent undeclared";
        }
    } else {
        logm.status = Cert::Yes;
        logm.detail = "no jump part";
        tail_rv.detail = origin_rv.detail = "no jump part";
    }
    rep.integrals.push_back({"driver_log_moment", logm});
    rep.integrals.push_back({"tail_regular_variation", tail_rv});
    rep.integrals.push_back({"origin_regular_variation", origin_rv});
    rep.driver_activity =
        gaussian_var > 0.0
            ? Cert::Yes
            : (rho ? (rho->origin_moment_finite(1.0) == Cert::No
                          ? Cert::Yes
                          : (rho->origin_moment_finite(1.0) == Cert::Yes ? Cert::No
                                                                         : Cert::Unknown))
                   : Cert::No);

    // decision integral: psi_rho(|v|) / |v| against the marks
    ConditionResult jump;
    jump.method = kExpQuad;
    if (rho) {
        const auto pr = rho->psi_profile();
        rep.ratio_large = ratio_large_u(*rho).status;
        if (pr.finite == Cert::No) {
            jump.status = Cert::No;
            jump.value = kInf;
            jump.detail = "driver jump comparison diverges pointwise";
        } else if (pr.finite == Cert::Unknown) {
            jump.detail = "driver jump comparison finiteness undeclared";
        } else if (cm && -cm->hi == 0.0 && !pr.a_zero_known) {
            jump.detail = "small-argument decay undeclared";
        } else if (cm && std::isinf(-cm->lo) && !pr.a_inf_known) {
            jump.detail = "large-argument growth undeclared";
        } else {
            const LevyMeasure r2 = *rho;
            const auto jv = integrate_marks([r2](double w) { return r2.psi(w) / w; },
                                            pr.a_zero - 1.0, pr.a_inf - 1.0);
            jump.status = jv.first;
            jump.value = jv.second;
            if (jump.status == Cert::No) jump.detail = "mark integral diverges";
        }
        rep.integrals.push_back({"mark_integral", jump});
    }

    // Gaussian leg: sigma^2 |v| / 2 against the marks
    ConditionResult gauss;
    gauss.method = kExpQuad;
    if (gaussian_var > 0.0) {
        const auto gv = integrate_marks(
            [gaussian_var](double w) { return gaussian_var * w / 2.0; }, 1.0, 1.0);
        gauss.status = gv.first;
        gauss.value = gv.second;
        if (gauss.status == Cert::No) gauss.detail = "Gaussian mark integral diverges";
    } else {
        gauss.status = Cert::Yes;
        gauss.value = 0.0;
        gauss.method = kClosed;
        gauss.detail = "no Gaussian part";
    }
    rep.integrals.push_back({"gaussian_energy", gauss});

    if (gauss.status == Cert::No) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "gaussian_energy";
        rep.detail = gauss.detail;
        return rep;
    }
    if (rho && jump.status == Cert::No) {
        if (tail_rv.status == Cert::Yes && origin_rv.status == Cert::Yes) {
            rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
            rep.basis = CriteriaReport::Basis::ClosedForm;
            rep.violated = "mark_integral";
            rep.detail = jump.detail;
        } else {
            rep.verdict = CriteriaReport::Verdict::Inconclusive;
            rep.basis = CriteriaReport::Basis::Undecidable;
            rep.detail = "mark integral diverges but the driver's regular-variation "
                         "assumptions are not certified";
        }
        return rep;
    }
    if ((rho && jump.status == Cert::Unknown) || logm.status == Cert::Unknown) {
        rep.verdict = CriteriaReport::Verdict::Inconclusive;
        rep.basis = CriteriaReport::Basis::Undecidable;
        rep.detail = logm.status == Cert::Unknown ? "driver log-moment undecided"
                                                  : "mark integral undecided: " + jump.detail;
        return rep;
    }
    rep.verdict = CriteriaReport::Verdict::Semimartingale;
    rep.basis = CriteriaReport::Basis::ClosedForm;
    rep.detail = "mark integral finite";
    return rep;
}

CriteriaReport closed_form_multistable(const KernelSpec& kernel,
                                       const std::function<double(double)>& alpha, double c,
                                       const std::function<MarkAtom(std::size_t)>& mark_seq,
                                       std::optional<std::size_t> n_terms) {
    if (!alpha) throw ConfigError("multi-stable criterion needs a stability index function");
    if (!mark_seq) throw ConfigError("multi-stable criterion needs a mark generator");
    if (!(c > 0.0)) throw DomainError("stable scale must be positive");
    if (n_terms && *n_terms == 0) throw ConfigError("mark sequence must be nonempty");

    CriteriaReport rep;
    rep.closed_form = "multi_stable";
    rep.kernel_ac = kernel.absolutely_continuous();
    rep.driver_activity = Cert::Yes; // indices above one
    rep.ratio_large = Cert::Yes;
    rep.ratio_all = Cert::Yes;

    // the bound must trigger before 2 - alpha_i underflows double rounding
    // (alpha within one ulp of 2 is no longer distinguishable from 2)
    constexpr double kDivergeBound = 1e7;
    constexpr std::size_t kMaxTerms = 20000;
    constexpr int kTailRun = 30;

    const std::size_t limit = n_terms ? *n_terms : kMaxTerms;
    double sum = 0.0;
    bool diverged = false, converged_tail = false, unknown = false;
    std::string why;
    std::size_t i = 0;
    int negligible_run = 0;
    for (; i < limit; ++i) {
        const MarkAtom a = mark_seq(i);
        if (!std::isfinite(a.v) || !(a.weight > 0.0) || !std::isfinite(a.weight))
            throw ConfigError("mark atoms must have finite positions and positive weights");
        const double al = alpha(a.v);
        if (!(al > 1.0) || !(al < 2.0)) {
            // an out-of-range index on the very first mark is a domain error;
            // later marks can approach the endpoints so closely that rounding
            // collapses them, which leaves the series undecidable, not invalid
            if (i == 0) {
                if (!(al > 1.0))
                    throw DomainError(
                        "stability index function must stay above one over the marks");
                throw DomainError(
                    "stability index function must stay below two over the marks");
            }
            unknown = true;
            why = std::string("stability index numerically indistinguishable from ") +
                  (al >= 2.0 ? "two" : "one") + " at mark v=" + fmt(a.v);
            break;
        }
        const auto T = time_integral(kernel, a.v, phi_power(al));
        if (T.status == Cert::No) {
            diverged = true;
            sum = kInf;
            why = T.detail + " (mark v=" + fmt(a.v) + ")";
            break;
        }
        if (T.status == Cert::Unknown) {
            unknown = true;
            why = T.detail;
            break;
        }
        const double term = a.weight / (2.0 - al) * T.value;
        sum += term;
        if (n_terms) continue;
        if (sum > kDivergeBound) {
            diverged = true;
            sum = kInf;
            why = "partial sums exceed the divergence bound";
            break;
        }
        if (term <= 1e-16 * std::max(sum, 1.0)) {
            if (++negligible_run >= kTailRun) {
                converged_tail = true;
                break;
            }
        } else {
            negligible_run = 0;
        }
    }

    ConditionResult mi;
    mi.method = kExpQuad;
    mi.value = sum;
    std::string terms_note = " (" + fmt(static_cast<double>(i + (i < limit ? 1 : 0))) +
                             " terms examined)";
    if (diverged) {
        mi.status = Cert::No;
        mi.detail = why + terms_note;
    } else if (unknown) {
        mi.status = Cert::Unknown;
        mi.value = kNaN;
        mi.detail = why;
    } else if (n_terms || converged_tail) {
        mi.status = Cert::Yes;
        mi.detail = (n_terms ? "exact finite sum" : "series tail negligible") + terms_note;
    } else {
        mi.status = Cert::Unknown;
        mi.detail = "partial sums neither stabilized nor exceeded the divergence bound" +
                    terms_note;
    }
    rep.integrals.push_back({"mark_integral", mi});

    if (mi.status == Cert::Yes) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.detail = "weighted derivative power series converges";
    } else if (mi.status == Cert::No) {
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "mark_integral";
        rep.detail = mi.detail;
    } else {
        rep.verdict = CriteriaReport::Verdict::Inconclusive;
        rep.basis = CriteriaReport::Basis::Undecidable;
        rep.detail = mi.detail;
    }
    return rep;
}

CriteriaReport closed_form_multistable(const KernelSpec& kernel,
                                       const std::function<double(double)>& alpha, double c,
                                       const DiscreteMarks& marks) {
    if (marks.atoms.empty()) throw ConfigError("mark measure needs at least one atom");
    const auto atoms = marks.atoms;
    return closed_form_multistable(
        kernel, alpha, c, [atoms](std::size_t i) { return atoms.at(i); }, atoms.size());
}

CriteriaReport closed_form_supflp(const std::function<double(double)>& gamma,
                                  const RandomMeasure& spec) {
    if (!gamma) throw ConfigError("fractional superposition needs an exponent function");
    CriteriaReport rep;
    rep.closed_form = "fractional_superposition";
    rep.kernel_ac = true;
    rep.driver_activity = activity_cert(spec);
    rep.ratio_large = ratio_large_aggregate(spec);
    rep.ratio_all = ratio_all_u(spec).status;

    // collect the exponent over the marks
    std::vector<double> gammas;
    bool sampled = false;
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i)
            gammas.push_back(gamma(spec.atom(i).v));
    } else {
        const auto& dmk = spec.density_marks();
        sampled = true;
        const double wlo = -dmk.hi, whi = -dmk.lo;
        const double a = std::max(wlo, std::isinf(whi) ? 1e-3 : wlo);
        const double b = std::isinf(whi) ? std::max(1e3, 10.0 * std::max(a, 1.0)) : whi;
        for (int j = 0; j <= 8; ++j) {
            const double w = a == 0.0
                                 ? b * std::pow(2.0, j - 8)
                                 : a * std::pow(b / a, j / 8.0);
            gammas.push_back(gamma(-w));
        }
    }
    for (double g : gammas)
        if (!(g > 0.0) || !std::isfinite(g))
            throw DomainError("kernel exponent function must be positive and finite");

    const bool any_half = std::any_of(gammas.begin(), gammas.end(),
                                      [](double g) { return g >= 0.5; });
    const bool varying =
        *std::max_element(gammas.begin(), gammas.end()) -
            *std::min_element(gammas.begin(), gammas.end()) >
        1e-12;
    bool any_gauss = false;
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms(); ++i)
            if (spec.gaussian(i) > 0.0) any_gauss = true;
    } else {
        any_gauss = spec.gaussian(0) > 0.0;
    }

    ConditionResult series;
    series.method = kExpQuad;
    series.detail = "not evaluated";

    if (any_half) {
        rep.integrals.push_back({"moment_series", series});
        rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.violated = "kernel_exponent";
        rep.detail = std::string("kernel exponent at least one half on positive mark mass") +
                     (sampled ? " (sampled over continuum marks)" : "");
        return rep;
    }
    if (any_gauss) {
        rep.integrals.push_back({"moment_series", series});
        if (rep.driver_activity == Cert::Yes) {
            rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
            rep.basis = CriteriaReport::Basis::ClosedForm;
            rep.violated = "gaussian_part";
            rep.detail = "a Gaussian part rules out fractional-kernel superpositions";
        } else {
            rep.verdict = CriteriaReport::Verdict::Inconclusive;
            rep.basis = CriteriaReport::Basis::Undecidable;
            rep.detail = "Gaussian part present but the driver activity hypothesis is not "
                         "certified";
        }
        return rep;
    }
    if (sampled && varying) {
        rep.integrals.push_back({"moment_series", series});
        rep.verdict = CriteriaReport::Verdict::Inconclusive;
        rep.basis = CriteriaReport::Basis::Undecidable;
        rep.detail = "varying kernel exponent over continuum marks is not certified";
        return rep;
    }

    // all exponents below one half, no Gaussian part: weighted moment series
    double sum = 0.0;
    Cert status = Cert::Yes;
    std::string why;
    auto one_mark = [&](const LevyMeasure& rho, double g, double weight) {
        const double q = 1.0 / (1.0 - g);
        const Cert co = rho.origin_moment_finite(q);
        const Cert ct = rho.tail_moment_finite(q);
        if (co == Cert::No || ct == Cert::No) {
            status = Cert::No;
            why = co == Cert::No ? "moment integral diverges at the origin"
                                 : "moment integral diverges in the tail";
            return;
        }
        if (co == Cert::Unknown || ct == Cert::Unknown) {
            if (status == Cert::Yes) {
                status = Cert::Unknown;
                why = "moment integral undecided (undeclared exponent)";
            }
            return;
        }
        sum += weight / (0.5 - g) * rho.absolute_moment(q);
    };
    if (spec.discrete_marks()) {
        for (std::size_t i = 0; i < spec.n_atoms() && status != Cert::No; ++i)
            one_mark(spec.levy(i), gammas[i], spec.atom(i).weight);
    } else {
        one_mark(spec.shared_levy(), gammas.front(), spec.total_mark_mass());
    }
    series.status = status;
    series.value = status == Cert::Yes ? sum : (status == Cert::No ? kInf : kNaN);
    series.detail = status == Cert::Yes ? "" : why;
    rep.integrals.push_back({"moment_series", series});

    if (status == Cert::Yes) {
        rep.verdict = CriteriaReport::Verdict::Semimartingale;
        rep.basis = CriteriaReport::Basis::ClosedForm;
        rep.detail = "weighted moment series finite";
    } else if (status == Cert::No) {
        if (rep.driver_activity == Cert::Yes) {
            rep.verdict = CriteriaReport::Verdict::NotSemimartingale;
            rep.basis = CriteriaReport::Basis::ClosedForm;
            rep.violated = "moment_series";
            rep.detail = why;
        } else {
            rep.verdict = CriteriaReport::Verdict::Inconclusive;
            rep.basis = CriteriaReport::Basis::Undecidable;
            rep.detail = "necessary moment diverges but the driver activity hypothesis is "
                         "not certified";
        }
    } else {
        rep.verdict = CriteriaReport::Verdict::Inconclusive;
        rep.basis = CriteriaReport::Basis::Undecidable;
        rep.detail = why;
    }
    return rep;
}

} // namespace simma
