#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "simma/criteria.hpp"
#include "simma/errors.hpp"
#include "simma/kernels.hpp"
#include "simma/levy_measure.hpp"
#include "simma/quadrature.hpp"

using namespace simma;

namespace {

constexpr double kInfV = std::numeric_limits<double>::infinity();

RandomMeasure stable_single(double alpha, double c = 1.0, double v = -1.0,
                            double b = 0.0, double s2 = 0.0) {
    return RandomMeasure::single(v, LevyMeasure::symmetric_stable(alpha, c), b, s2);
}

RandomMeasure tempered_single(double alpha, double lambda, double c, double v = -1.0) {
    return RandomMeasure::single(v, LevyMeasure::symmetric_tempered_stable(alpha, lambda, c));
}

LevyMeasure cp_pair() {
    return LevyMeasure::compound_poisson({{0.8, 1.0}, {2.0, 0.25}});
}

LevyMeasure cp_symmetric() {
    return LevyMeasure::compound_poisson({{0.8, 1.0}, {-0.8, 1.0}});
}

std::size_t count_fields(const std::string& line) {
    std::size_t n = 1;
    for (char c : line)
        if (c == ',') ++n;
    return n;
}

void check_report_integrity(const CriteriaReport& rep) {
    if (rep.verdict == CriteriaReport::Verdict::NotSemimartingale) {
        if (rep.basis == CriteriaReport::Basis::NecessityViolation) {
            CHECK(rep.driver_activity == Cert::Yes);
            CHECK(!rep.violated.empty());
        }
        if (rep.basis == CriteriaReport::Basis::ClosedForm) CHECK(!rep.violated.empty());
    }
    if (rep.verdict == CriteriaReport::Verdict::Semimartingale &&
        rep.basis == CriteriaReport::Basis::SufficientConditions) {
        CHECK(rep.kernel_ac);
        CHECK(rep.find("drift")->result.status == Cert::Yes);
        CHECK(rep.find("gaussian_energy")->result.status == Cert::Yes);
        CHECK(rep.find("jump_energy")->result.status == Cert::Yes);
    }
    const std::string h = rep.csv_header(), r = rep.csv_row();
    CHECK(count_fields(h) == count_fields(r));
    CHECK(h.rfind("verdict,basis,closed_form,violated,", 0) == 0);
    CHECK(r.rfind(to_string(rep.verdict), 0) == 0);
}

} // namespace

TEST_CASE("drift functional") {
    // symmetric drivers have an exactly vanishing drift
    auto r = check_drift(stable_single(1.5), KernelSpec::fractional(0.3));
    CHECK(r.status == Cert::Yes);
    CHECK(r.value == 0.0);

    // fractional kernels start at f(0,v) = 0, so the drift vanishes even for
    // asymmetric drivers with a nonzero translation
    auto asym = RandomMeasure::single(-1.0, cp_pair(), 0.7);
    r = check_drift(asym, KernelSpec::fractional(0.3));
    CHECK(r.status == Cert::Yes);
    CHECK(r.value == doctest::Approx(0.0));

    // step kernels start at 1; a pure translation b passes straight through
    auto shifted = RandomMeasure::single(-1.0, cp_pair(), 0.5);
    r = check_drift(shifted, KernelSpec::step());
    CHECK(r.status == Cert::Yes);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gaussian energy") {
    auto none = check_gaussian(stable_single(1.5), KernelSpec::fractional(0.25));
    CHECK(none.status == Cert::Yes);
    CHECK(none.value == 0.0);

    // fractional kernel: the squared derivative is never time-integrable
    auto frac = check_gaussian(stable_single(1.5, 1.0, -1.0, 0.0, 1.0),
                               KernelSpec::fractional(0.25));
    CHECK(frac.status == Cert::No);

    // exponential kernel at v = -1: int_0^inf e^{-2s} ds = 1/2
    auto ou = check_gaussian(stable_single(1.5, 1.0, -1.0, 0.0, 1.0),
                             KernelSpec::exponential_ou());
    CHECK(ou.status == Cert::Yes);
    CHECK(ou.value == doctest::Approx(0.5).epsilon(1e-10));

    // step kernel with a Gaussian part: refused via absolute continuity
    auto st = check_gaussian(stable_single(1.5, 1.0, -1.0, 0.0, 1.0), KernelSpec::step());
    CHECK(st.status == Cert::No);
}

TEST_CASE("jump energy sufficiency") {
    // stable drivers never satisfy it under fractional kernels: the comparison
    // grows like u^alpha at both ends and one side of the time integral diverges
    for (double alpha : {1.2, 1.5, 1.8})
        for (double gamma : {0.1, 0.25, 0.4, 0.49}) {
            auto r = check_sufficient(stable_single(alpha), KernelSpec::fractional(gamma));
            CHECK(r.status == Cert::No);
        }

    // tempering restores it for gamma above 1 - 1/alpha
    auto good = check_sufficient(tempered_single(1.5, 1.0, 1.0), KernelSpec::fractional(0.4));
    CHECK(good.status == Cert::Yes);
    CHECK(good.value > 0.0);
    CHECK(std::isfinite(good.value));

    // step kernel: the recentered derivative vanishes identically
    auto st = check_sufficient(stable_single(1.5), KernelSpec::step());
    CHECK(st.status == Cert::Yes);
    CHECK(st.value == 0.0);

    // exponential kernel, stable(1.5,1) at v=-1: (1/1) int_0^1 8 u^{1.5}/u du = 16/3
    auto ou = check_sufficient(stable_single(1.5), KernelSpec::exponential_ou());
    CHECK(ou.status == Cert::Yes);
    CHECK(ou.value == doctest::Approx(16.0 / 3.0).epsilon(1e-10));

    // continuum marks on (-2,-1), uniform density, stable(1.5,1):
    // (8/1.5) int_1^2 sqrt(w) dw
    DensityMarks dm;
    dm.lo = -2.0;
    dm.hi = -1.0;
    dm.density = [](double) { return 1.0; };
    auto spec = RandomMeasure::with_density_marks(dm, LevyMeasure::symmetric_stable(1.5, 1.0));
    auto cont = check_sufficient(spec, KernelSpec::exponential_ou());
    CHECK(cont.status == Cert::Yes);
    CHECK(cont.value == doctest::Approx(6.5010742213197870).epsilon(1e-8));
}

TEST_CASE("necessity battery") {
    // step kernel + infinite-variation driver: absolute continuity is necessary
    auto n1 = check_necessary(stable_single(1.5), KernelSpec::step());
    CHECK(n1.outcome == NecessityOutcome::Violated);
    CHECK(n1.violated == "kernel_absolute_continuity");

    // finite-variation driver: the hypothesis fails, nothing is asserted
    auto n2 = check_necessary(RandomMeasure::single(-1.0, cp_pair()), KernelSpec::step());
    CHECK(n2.outcome == NecessityOutcome::NotApplicable);
    CHECK(n2.driver_activity == Cert::No);

    // fractional + stable: the per-mark jump energy diverges at one end for
    // every exponent, and the large-u ratio condition certifies its necessity
    auto n3 = check_necessary(stable_single(1.8), KernelSpec::fractional(0.3));
    CHECK(n3.outcome == NecessityOutcome::Violated);
    CHECK(n3.violated == "markwise_jump_energy");
    CHECK(n3.ratio_large == Cert::Yes);

    auto n4 = check_necessary(stable_single(1.5), KernelSpec::fractional(0.45));
    CHECK(n4.outcome == NecessityOutcome::Violated); // diverges at large times

    // exponential kernel + tempered driver: everything applicable is finite
    auto n5 = check_necessary(tempered_single(1.5, 1.0, 1.0), KernelSpec::exponential_ou());
    CHECK(n5.outcome == NecessityOutcome::Satisfied);
}

TEST_CASE("general verdicts") {
    // tempered driver, fractional kernel above the critical exponent
    auto sm = verdict(tempered_single(1.5, 1.0, 1.0), KernelSpec::fractional(0.4));
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm.basis == CriteriaReport::Basis::SufficientConditions);
    check_report_integrity(sm);

    // stable drivers under fractional kernels: never semimartingales
    for (double alpha : {1.2, 1.5, 1.8})
        for (double gamma : {0.1, 0.2, 0.3, 0.45}) {
            auto r = verdict(stable_single(alpha), KernelSpec::fractional(gamma));
            CHECK(r.verdict == CriteriaReport::Verdict::NotSemimartingale);
            CHECK(r.basis == CriteriaReport::Basis::NecessityViolation);
            check_report_integrity(r);
        }

    // step kernel + compound Poisson: finite variation certificate
    auto fv = verdict(RandomMeasure::single(-1.0, cp_pair()), KernelSpec::step());
    CHECK(fv.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(fv.basis == CriteriaReport::Basis::ClosedForm);
    CHECK(fv.closed_form == "finite_variation");
    CHECK(fv.driver_activity == Cert::No);
    CHECK(fv.detail.find("not applicable") != std::string::npos);
    check_report_integrity(fv);

    // step kernel + stable: refused through absolute continuity
    auto st = verdict(stable_single(1.5), KernelSpec::step());
    CHECK(st.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(st.violated == "kernel_absolute_continuity");
    check_report_integrity(st);

    // the report always carries the same condition columns in the same order
    const std::vector<std::string> expected = {
        "drift",        "gaussian_energy",       "jump_energy", "markwise_jump_energy",
        "truncated_jump_energy", "fv_driver",    "fv_shift"};
    for (const auto* rep : {&sm, &fv, &st}) {
        REQUIRE(rep->integrals.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(rep->integrals[i].name == expected[i]);
    }

    // continuum marks, exponential kernel: quadrature value matches the oracle
    DensityMarks dm;
    dm.lo = -2.0;
    dm.hi = -1.0;
    dm.density = [](double) { return 1.0; };
    auto spec = RandomMeasure::with_density_marks(dm, LevyMeasure::symmetric_stable(1.5, 1.0));
    auto cont = verdict(spec, KernelSpec::exponential_ou());
    CHECK(cont.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(cont.value_of("jump_energy") == doctest::Approx(6.5010742213197870).epsilon(1e-8));
    check_report_integrity(cont);
}

TEST_CASE("csv serialization") {
    auto rep = verdict(tempered_single(1.5, 1.0, 1.0), KernelSpec::fractional(0.4));
    const std::string h = rep.csv_header(), r = rep.csv_row();
    CHECK(count_fields(h) == count_fields(r));
    CHECK(h ==
          "verdict,basis,closed_form,violated,driver_activity,ratio_large_u,ratio_all_u,"
          "kernel_ac,drift,gaussian_energy,jump_energy,markwise_jump_energy,"
          "truncated_jump_energy,fv_driver,fv_shift,detail");
    // the human-readable detail contains commas; the row must not grow extra fields
    CHECK(rep.detail.find(',') != std::string::npos);
    CHECK(r.find("drift; Gaussian energy") != std::string::npos);
    // unknown/unevaluated entries serialize as empty fields, infinities as "inf"
    auto st = verdict(stable_single(1.5), KernelSpec::step());
    CHECK(count_fields(st.csv_row()) == count_fields(st.csv_header()));
    CHECK(st.csv_row().find("inf") != std::string::npos);
}

TEST_CASE("fractional closed form") {
    // comparison constant at gamma = 0.25 against the frozen value, and the
    // underlying identity against direct quadrature at x = 2
    auto rep = closed_form_fractional(LevyMeasure::symmetric_tempered_stable(1.5, 1.0, 1.0),
                                      0.0, 0.25);
    CHECK(rep.value_of("kernel_constant") ==
          doctest::Approx(0.94494078742115487).epsilon(1e-12));

    const double g = 0.25, x = 2.0;
    auto integrand = [&](double s) {
        const double u = x * g * std::pow(s, g - 1.0);
        return std::min(u, u * u);
    };
    quad::Options opt;
    const double direct = quad::integrate_to_zero(integrand, 1.0, g - 1.0, opt).value +
                          quad::integrate_to_inf(integrand, 1.0, 2.0 * (g - 1.0), opt).value;
    CHECK(direct == doctest::Approx(0.94494078742115487 * std::pow(x, 1.0 / (1.0 - g)))
                        .epsilon(1e-7));

    // tempered driver, gamma = 0.4: moment of order 5/3 equals 2 Gamma(1/6)
    auto sm = closed_form_fractional(LevyMeasure::symmetric_tempered_stable(1.5, 1.0, 1.0),
                                     0.0, 0.4);
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm.closed_form == "fractional");
    CHECK(sm.value_of("moment_integral") ==
          doctest::Approx(11.132632003560470).epsilon(1e-12));

    // stable drivers fail the moment test for every exponent below one half
    for (double gamma : {0.1, 0.25, 0.4}) {
        auto r = closed_form_fractional(LevyMeasure::symmetric_stable(1.5, 1.0), 0.0, gamma);
        CHECK(r.verdict == CriteriaReport::Verdict::NotSemimartingale);
        CHECK(r.violated == "moment_integral");
    }

    // exponent at least one half: refused regardless of the driver
    auto half = closed_form_fractional(cp_pair(), 0.0, 0.6);
    CHECK(half.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(half.violated == "kernel_exponent");

    // a Gaussian part is fatal
    auto gauss = closed_form_fractional(cp_pair(), 1.0, 0.3);
    CHECK(gauss.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(gauss.violated == "gaussian_part");

    // compound Poisson drivers always pass the moment test below one half
    auto cp = closed_form_fractional(cp_pair(), 0.0, 0.3);
    CHECK(cp.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(cp.value_of("moment_integral") ==
          doctest::Approx(1.3999881190987014).epsilon(1e-12));

    CHECK_THROWS_AS(closed_form_fractional(cp_pair(), 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(closed_form_fractional(cp_pair(), -1.0, 0.3), DomainError);
}

TEST_CASE("stable closed form") {
    // exponential kernel at v=-1: T = 1/alpha, C = 8, jump energy = 16/3
    auto ou = closed_form_stable(KernelSpec::exponential_ou(), 1.5, 1.0);
    CHECK(ou.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(ou.value_of("kernel_constant") == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(ou.value_of("derivative_power_integral") ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(ou.value_of("jump_energy") == doctest::Approx(16.0 / 3.0).epsilon(1e-10));

    // fractional kernels never admit stable drivers with index above one
    auto frac = closed_form_stable(KernelSpec::fractional(0.3), 1.5, 1.0);
    CHECK(frac.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(frac.violated == "derivative_power_integral");

    // step kernel: recentered derivative is identically zero
    auto st = closed_form_stable(KernelSpec::step(), 1.5, 1.0);
    CHECK(st.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(st.value_of("jump_energy") == 0.0);

    CHECK_THROWS_AS(closed_form_stable(KernelSpec::step(), 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_stable(KernelSpec::step(), 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_stable(KernelSpec::step(), 1.5, 0.0), DomainError);
}

TEST_CASE("tempered stable closed form") {
    // semimartingale exactly when gamma exceeds 1 - 1/alpha
    auto sm = closed_form_tempered(KernelSpec::fractional(0.4), 1.5, 1.0, 1.0);
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    auto sm2 = closed_form_tempered(KernelSpec::fractional(0.35), 1.5, 1.0, 1.0);
    CHECK(sm2.verdict == CriteriaReport::Verdict::Semimartingale);

    auto low = closed_form_tempered(KernelSpec::fractional(0.2), 1.5, 1.0, 1.0);
    CHECK(low.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(low.violated == "derivative_energy");
    auto edge = closed_form_tempered(KernelSpec::fractional(1.0 / 3.0), 1.5, 1.0, 1.0);
    CHECK(edge.verdict == CriteriaReport::Verdict::NotSemimartingale);

    CHECK_THROWS_AS(closed_form_tempered(KernelSpec::step(), 0.9, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_tempered(KernelSpec::step(), 2.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_tempered(KernelSpec::step(), 1.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_tempered(KernelSpec::step(), 1.5, 1.0, -1.0), DomainError);
}

TEST_CASE("ou superposition closed form") {
    const auto stab = LevyMeasure::symmetric_stable(1.5, 1.0);

    // single atom at v=-1: mark integral = psi(1) = 8
    DiscreteMarks one{{{-1.0, 1.0}}};
    auto sm = closed_form_supou(one, stab);
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm.closed_form == "ou_superposition");
    CHECK(sm.value_of("mark_integral") == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(sm.value_of("inverse_mark_moment") == doctest::Approx(1.0).epsilon(1e-14));

    // two atoms against the frozen value
    DiscreteMarks two{{{-0.5, 0.4}, {-2.0, 0.6}}};
    auto sm2 = closed_form_supou(two, stab);
    CHECK(sm2.value_of("mark_integral") ==
          doctest::Approx(9.0509667991878083).epsilon(1e-13));

    // density marks |v|^0.2 on (-1,0): 8 int_0^1 w^{0.7} dw = 8/1.7
    DensityMarks fin;
    fin.lo = -1.0;
    fin.hi = 0.0;
    fin.density = [](double v) { return std::pow(std::abs(v), 0.2); };
    fin.exp_near_zero = 0.2;
    auto sm3 = closed_form_supou(fin, stab);
    CHECK(sm3.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm3.value_of("mark_integral") ==
          doctest::Approx(4.7058823529411765).epsilon(1e-8));

    // density |v|^{-1.2} on (-inf,-1): the mark integral diverges and both
    // regular-variation assumptions are certified, so the verdict is negative
    DensityMarks heavy;
    heavy.lo = -kInfV;
    heavy.hi = -1.0;
    heavy.density = [](double v) { return std::pow(std::abs(v), -1.2); };
    heavy.exp_at_infinity = -1.2;
    auto no = closed_form_supou(heavy, stab);
    CHECK(no.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(no.violated == "mark_integral");
    CHECK(no.find("tail_regular_variation")->result.status == Cert::Yes);
    CHECK(no.find("origin_regular_variation")->result.status == Cert::Yes);

    // inverse mark moment must be finite for the process to be well defined
    DensityMarks bad;
    bad.lo = -1.0;
    bad.hi = 0.0;
    bad.density = [](double v) { return std::pow(std::abs(v), -0.5); };
    bad.exp_near_zero = -0.5;
    CHECK_THROWS_AS(closed_form_supou(bad, stab), WellDefinednessViolation);

    // no jump part and no Gaussian part is not a process at all
    CHECK_THROWS_AS(closed_form_supou(one, std::nullopt, 0.0), NonDeterministic);

    // pure Gaussian superposition: finite mark integral of sigma^2 |v|/2
    auto gsm = closed_form_supou(one, std::nullopt, 1.0);
    CHECK(gsm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(gsm.value_of("gaussian_energy") == doctest::Approx(0.5).epsilon(1e-14));

    // Gaussian part with heavy marks at -inf: the Gaussian leg diverges
    auto gno = closed_form_supou(heavy, stab, 1.0);
    CHECK(gno.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(gno.violated == "gaussian_energy");

    DiscreteMarks wrong{{{0.5, 1.0}}};
    CHECK_THROWS_AS(closed_form_supou(wrong, stab), DomainError);
    CHECK_THROWS_AS(closed_form_supou(DiscreteMarks{}, stab), ConfigError);
}

TEST_CASE("multi-stable closed form") {
    const auto ou = KernelSpec::exponential_ou();

    // single atom, constant index 1.5: 1/(2-1.5) * 1/1.5 = 4/3
    DiscreteMarks one{{{-1.0, 1.0}}};
    auto sm = closed_form_multistable(ou, [](double) { return 1.5; }, 1.0, one);
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm.closed_form == "multi_stable");
    CHECK(sm.value_of("mark_integral") == doctest::Approx(4.0 / 3.0).epsilon(1e-10));

    // two atoms with a mark-dependent index against the frozen value
    DiscreteMarks two{{{-1.0, 0.5}, {-4.0, 0.25}}};
    auto alpha_fn = [](double v) { return 1.2 + 0.15 * std::abs(v); };
    auto sm2 = closed_form_multistable(ou, alpha_fn, 1.0, two);
    CHECK(sm2.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm2.value_of("mark_integral") ==
          doctest::Approx(2.6749624677316782).epsilon(1e-10));

    // countable generator whose indices approach 2: the weighted series blows
    // up and the verdict flips through the divergence bound
    auto gen_div = [](std::size_t i) {
        const double j = static_cast<double>(i) + 1.0;
        return MarkAtom{-j, std::pow(2.0, -j)};
    };
    auto alpha_div = [](double v) { return 2.0 - std::pow(4.0, v); }; // 2 - 4^{-j}
    auto no = closed_form_multistable(ou, alpha_div, 1.0, gen_div, std::nullopt);
    CHECK(no.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(no.violated == "mark_integral");
    CHECK(no.detail.find("divergence bound") != std::string::npos);

    // convergent generator with a fixed index: series tail detection
    auto sm3 = closed_form_multistable(
        ou, [](double) { return 1.5; }, 1.0, gen_div, std::nullopt);
    CHECK(sm3.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm3.value_of("mark_integral") ==
          doctest::Approx(1.7963383369810009).epsilon(1e-10));
    CHECK(sm3.detail.find("converges") != std::string::npos);

    CHECK_THROWS_AS(
        closed_form_multistable(ou, [](double) { return 1.0; }, 1.0, one), DomainError);
    CHECK_THROWS_AS(
        closed_form_multistable(ou, [](double) { return 2.0; }, 1.0, one), DomainError);
    CHECK_THROWS_AS(
        closed_form_multistable(ou, nullptr, 1.0, one), ConfigError);
    CHECK_THROWS_AS(closed_form_multistable(ou, [](double) { return 1.5; }, 1.0,
                                            DiscreteMarks{}),
                    ConfigError);
}

TEST_CASE("fractional superposition closed form") {
    const auto tempered = LevyMeasure::symmetric_tempered_stable(1.5, 1.0, 1.0);

    // single mark, gamma = 0.4: 1/(0.5-0.4) * moment(5/3) = 10 * 2 Gamma(1/6)
    auto sm = closed_form_supflp([](double) { return 0.4; },
                                 RandomMeasure::single(-1.0, tempered));
    CHECK(sm.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(sm.closed_form == "fractional_superposition");
    CHECK(sm.value_of("moment_series") ==
          doctest::Approx(111.32632003560470).epsilon(1e-12));

    // any mark mass at exponent >= 1/2 is fatal
    auto half = closed_form_supflp([](double v) { return 0.3 + 0.25 * std::abs(v); },
                                   RandomMeasure::discrete({{-1.0, 1.0}, {-2.0, 1.0}},
                                                           {tempered, tempered}));
    CHECK(half.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(half.violated == "kernel_exponent");

    // a Gaussian part is fatal when the activity hypothesis holds
    auto gauss = closed_form_supflp(
        [](double) { return 0.4; },
        RandomMeasure::single(-1.0, LevyMeasure::symmetric_stable(1.5, 1.0), 0.0, 1.0));
    CHECK(gauss.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(gauss.violated == "gaussian_part");

    // stable drivers have no moment of order 1/(1-gamma)
    auto stab = closed_form_supflp([](double) { return 0.4; }, stable_single(1.5));
    CHECK(stab.verdict == CriteriaReport::Verdict::NotSemimartingale);
    CHECK(stab.violated == "moment_series");

    // compound Poisson drivers always have the moment
    auto cp = closed_form_supflp([](double) { return 0.4; },
                                 RandomMeasure::single(-1.0, cp_symmetric()));
    CHECK(cp.verdict == CriteriaReport::Verdict::Semimartingale);

    // constant exponent over continuum marks factors through the total mass
    DensityMarks dm;
    dm.lo = -2.0;
    dm.hi = -1.0;
    dm.density = [](double) { return 1.0; };
    auto cont = closed_form_supflp([](double) { return 0.4; },
                                   RandomMeasure::with_density_marks(dm, tempered));
    CHECK(cont.verdict == CriteriaReport::Verdict::Semimartingale);
    CHECK(cont.value_of("moment_series") ==
          doctest::Approx(111.32632003560470).epsilon(1e-10));

    // a varying exponent over continuum marks is not certified
    auto vary = closed_form_supflp([](double v) { return 0.2 + 0.05 * std::abs(v); },
                                   RandomMeasure::with_density_marks(dm, tempered));
    CHECK(vary.verdict == CriteriaReport::Verdict::Inconclusive);

    CHECK_THROWS_AS(closed_form_supflp([](double) { return 0.0; }, stable_single(1.5)),
                    DomainError);
    CHECK_THROWS_AS(closed_form_supflp(nullptr, stable_single(1.5)), ConfigError);
}

TEST_CASE("finite variation certificate") {
    // step + compound Poisson: driver and shift both finite
    auto fv1 = closed_form_fv(KernelSpec::step(), RandomMeasure::single(-1.0, cp_pair()));
    CHECK(fv1.finite_variation);
    CHECK(fv1.driver.value == doctest::Approx(1.05).epsilon(1e-14)); // 0.8 + 0.25
    CHECK(fv1.shift.value == 0.0);

    // step + stable below one: small jumps summable, shift identically zero
    auto fv2 = closed_form_fv(KernelSpec::step(), stable_single(0.5));
    CHECK(fv2.finite_variation);

    // stable above one: the driver leg fails outright
    auto fv3 = closed_form_fv(KernelSpec::fractional(0.3), stable_single(1.5));
    CHECK(!fv3.finite_variation);
    CHECK(fv3.driver.status == Cert::No);

    // stable below one under a fractional kernel: the shift has infinite
    // variation even though the driver is fine
    auto fv4 = closed_form_fv(KernelSpec::fractional(0.3), stable_single(0.5));
    CHECK(!fv4.finite_variation);
    CHECK(fv4.driver.status == Cert::Yes);
    CHECK(fv4.shift.status == Cert::No);

    // exponential kernel + compound Poisson: 1.05 + 0.25 ln 2 for the shift
    auto fv5 = closed_form_fv(KernelSpec::exponential_ou(),
                              RandomMeasure::single(-1.0, cp_pair()));
    CHECK(fv5.finite_variation);
    CHECK(fv5.shift.value == doctest::Approx(1.2232867951399863).epsilon(1e-8));

    // Gaussian parts always have infinite variation
    auto fv6 = closed_form_fv(KernelSpec::step(),
                              RandomMeasure::single(-1.0, cp_pair(), 0.0, 1.0));
    CHECK(!fv6.finite_variation);
}

TEST_CASE("route consistency across decision paths") {
    // whenever two independent routes both decide, they must agree; an
    // Inconclusive report never contradicts a decided one
    auto agree = [](const CriteriaReport& a, const CriteriaReport& b) {
        if (a.verdict == CriteriaReport::Verdict::Inconclusive) return true;
        if (b.verdict == CriteriaReport::Verdict::Inconclusive) return true;
        return a.verdict == b.verdict;
    };
    int checked = 0;

    // stable drivers: general route vs the stable closed form vs the
    // fractional closed form
    for (double alpha : {1.2, 1.5, 1.8}) {
        const auto rho = LevyMeasure::symmetric_stable(alpha, 1.0);
        for (double gamma : {0.15, 0.3, 0.45}) {
            const auto kern = KernelSpec::fractional(gamma);
            const auto gen = verdict(RandomMeasure::single(-1.0, rho), kern);
            const auto cs = closed_form_stable(kern, alpha, 1.0);
            const auto cf = closed_form_fractional(rho, 0.0, gamma);
            CHECK(agree(gen, cs));
            CHECK(agree(gen, cf));
            CHECK(agree(cs, cf));
            CHECK(gen.verdict == CriteriaReport::Verdict::NotSemimartingale);
            check_report_integrity(gen);
            check_report_integrity(cs);
            check_report_integrity(cf);
            ++checked;
        }
        for (double v : {-0.5, -1.0, -2.0}) {
            const auto gen = verdict(RandomMeasure::single(v, rho),
                                     KernelSpec::exponential_ou());
            const auto cs = closed_form_stable(KernelSpec::exponential_ou(), alpha, 1.0, v);
            CHECK(agree(gen, cs));
            CHECK(gen.verdict == CriteriaReport::Verdict::Semimartingale);
            CHECK(cs.verdict == CriteriaReport::Verdict::Semimartingale);
            check_report_integrity(gen);
            ++checked;
        }
    }

    // tempered drivers: the semimartingale region is gamma > 1 - 1/alpha,
    // independently of the tempering rate
    for (double alpha : {1.2, 1.5, 1.8})
        for (double gamma : {0.1, 0.3, 0.45})
            for (double lambda : {0.5, 2.0, 5.0}) {
                const auto rho = LevyMeasure::symmetric_tempered_stable(alpha, lambda, 1.0);
                const auto kern = KernelSpec::fractional(gamma);
                const auto gen = verdict(RandomMeasure::single(-1.0, rho), kern);
                const auto ct = closed_form_tempered(kern, alpha, lambda, 1.0);
                const auto cf = closed_form_fractional(rho, 0.0, gamma);
                CHECK(agree(gen, ct));
                CHECK(agree(gen, cf));
                CHECK(agree(ct, cf));
                const bool expect_sm = gamma > 1.0 - 1.0 / alpha;
                CHECK(ct.verdict == (expect_sm
                                         ? CriteriaReport::Verdict::Semimartingale
                                         : CriteriaReport::Verdict::NotSemimartingale));
                // tempering never shrinks the semimartingale region relative
                // to the untempered driver (which is never a semimartingale)
                const auto cs = closed_form_stable(kern, alpha, 1.0);
                CHECK(cs.verdict == CriteriaReport::Verdict::NotSemimartingale);
                check_report_integrity(gen);
                check_report_integrity(ct);
                ++checked;
            }

    // compound Poisson drivers under fractional kernels
    for (double gamma : {0.1, 0.3, 0.45, 0.6}) {
        const auto gen = verdict(RandomMeasure::single(-1.0, cp_symmetric()),
                                 KernelSpec::fractional(gamma));
        const auto cf = closed_form_fractional(cp_symmetric(), 0.0, gamma);
        CHECK(agree(gen, cf));
        if (gamma < 0.5) {
            CHECK(gen.verdict == CriteriaReport::Verdict::Semimartingale);
            CHECK(cf.verdict == CriteriaReport::Verdict::Semimartingale);
        } else {
            CHECK(cf.verdict == CriteriaReport::Verdict::NotSemimartingale);
        }
        check_report_integrity(gen);
        check_report_integrity(cf);
        ++checked;
    }

    // exponential superpositions: general route vs the dedicated closed form
    for (double alpha : {1.2, 1.5, 1.8}) {
        const auto rho = LevyMeasure::symmetric_stable(alpha, 1.0);
        DiscreteMarks atoms{{{-0.5, 0.4}, {-2.0, 0.6}}};
        const auto gen = verdict(RandomMeasure::discrete(atoms.atoms, {rho}),
                                 KernelSpec::exponential_ou());
        const auto so = closed_form_supou(atoms, rho);
        CHECK(agree(gen, so));
        CHECK(gen.verdict == CriteriaReport::Verdict::Semimartingale);
        check_report_integrity(gen);
        check_report_integrity(so);
        ++checked;
    }

    CHECK(checked >= 50);
}

TEST_CASE("kernel scaling invariance") {
    // scaling the kernel by a constant never changes the verdict
    auto scaled_fractional = [](double gamma, double scale) {
        FdotAsymptotics asym{gamma - 1.0, gamma - 1.0, 0.0};
        return KernelSpec::custom(
            [gamma, scale](double t, double) {
                return t >= 0.0 ? scale * std::pow(t, gamma) : 0.0;
            },
            [gamma, scale](double t, double) {
                return t > 0.0 ? scale * gamma * std::pow(t, gamma - 1.0) : 0.0;
            },
            [asym](double) { return std::optional<FdotAsymptotics>(asym); },
            F0Mode::SameAsF);
    };
    for (double gamma : {0.2, 0.45}) {
        const auto base = verdict(stable_single(1.5), KernelSpec::fractional(gamma));
        const auto scaled = verdict(stable_single(1.5), scaled_fractional(gamma, 3.0));
        CHECK(base.verdict == scaled.verdict);
    }
    const auto base = verdict(tempered_single(1.5, 1.0, 1.0), KernelSpec::fractional(0.4));
    const auto scaled = verdict(tempered_single(1.5, 1.0, 1.0), scaled_fractional(0.4, 3.0));
    CHECK(base.verdict == scaled.verdict);
    CHECK(base.verdict == CriteriaReport::Verdict::Semimartingale);
}
