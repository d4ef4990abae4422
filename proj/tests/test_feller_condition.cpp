#include <doctest.h>

#include <cmath>

#include "feller/feller_condition.hpp"
#include "feller/scenario_io.hpp"
#include "feller/symbol_engine.hpp"
#include "oracles.hpp"

using namespace feller;

namespace {

Scenario poisson_counterexample() { return library_scenario("intro-poisson-counterexample"); }

Scenario stable_power(double alpha, double beta) {
    LevyTriplet t = LevyTriplet::zero(1);
    t.nu.set_stable(alpha, stable_normalized_scale(alpha));
    return Scenario{.label = "stable-power",
                    .driver = std::move(t),
                    .sigma = CoefficientField::make(SigmaForm::power,
                                                    {{"coef", {1.0}}, {"beta", {beta}}}, 1, 1),
                    .uniqueness = Uniqueness::declared_weak_unique,
                    .expected_verdict = std::nullopt,
                    .symbol_formula_label = std::nullopt};
}

}  // namespace

TEST_SUITE("feller_condition") {

TEST_CASE("criterion mass is exactly the jump rate for the counterexample") {
    Scenario s = poisson_counterexample();
    for (double x : {-1000.0, -10.0, 2.0, 10.0, 100.0, 1e6}) {
        MassResult m = condition_mass(s, x, 1.0);
        CHECK(m.value == 1.0);  // exact atomic arithmetic, zero tolerance
        CHECK(m.std_error == 0.0);
    }
}

TEST_CASE("criterion mass matches the stable antiderivative") {
    // sigma(x) = |x|^beta, stable driver: the preimage is a one-sided band
    // with closed-form mass sigma^alpha ((x-r)^-a - (x+r)^-a) scale / a
    double alpha = 1.5, beta = 0.5, r = 1.0;
    double scale = stable_normalized_scale(alpha);
    Scenario s = stable_power(alpha, beta);
    for (double x : {1e2, 1e3, 1e4}) {
        double sig = std::pow(x, beta);
        double expected = std::pow(sig, alpha) * scale *
                          (std::pow(x - r, -alpha) - std::pow(x + r, -alpha)) / alpha;
        MassResult m = condition_mass(s, x, r);
        CHECK(m.value == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("criterion mass for the OU shape is controlled by the atom") {
    Scenario s = library_scenario("example-4.3-gou");  // atom at (-1, 0.5), mass 0.3
    for (double x : {10.0, 1e3, -1e5}) {
        Vec xv(1);
        xv(0) = x;
        CHECK(condition_mass(s, xv, 1.0).value == doctest::Approx(0.3));
        CHECK(condition_mass(s, xv, 0.4).value == 0.0);  // radius below |y2|
    }
}

TEST_CASE("criterion mass is monotone in the radius") {
    Scenario s = stable_power(1.2, 0.8);
    for (double x : {50.0, 400.0}) {
        double m1 = condition_mass(s, x, 0.5).value;
        double m2 = condition_mass(s, x, 2.0).value;
        CHECK(m1 <= m2 * (1.0 + 1e-12));
    }
    Scenario p = poisson_counterexample();
    CHECK(condition_mass(p, 10.0, 0.1).value <= condition_mass(p, 10.0, 10.0).value);
}

TEST_CASE("profiles: constant masses give a positive limit") {
    Scenario s = poisson_counterexample();
    ConditionProfile p = condition_profile(s, 1.0, 1e2, 1e5, 9);
    CHECK(p.verdict == ProfileVerdict::positive_limit);
    CHECK(p.limit_estimate == doctest::Approx(1.0));
    CHECK(std::abs(p.loglog_slope) < 1e-9);
}

TEST_CASE("profiles: sublinear growth vanishes") {
    Scenario s = library_scenario("example-4.1-sublinear");
    ConditionProfile p = condition_profile(s, 1.0, 1e2, 1e6, 13);
    CHECK(p.verdict == ProfileVerdict::vanishes);
    // slope: beta*alpha - 1 - alpha = 0.75 - 2.5 = -1.75
    CHECK(p.loglog_slope == doctest::Approx(-1.75).epsilon(0.02));
}

TEST_CASE("profiles: the boundary exponent has a positive limit") {
    // beta = 1 + 1/alpha makes the mass exponent beta*alpha - 1 - alpha = 0
    double alpha = 1.5;
    Scenario s = stable_power(alpha, 1.0 + 1.0 / alpha);
    ConditionProfile p = condition_profile(s, 1.0, 1e2, 1e5, 13);
    CHECK(p.verdict == ProfileVerdict::positive_limit);
    CHECK(p.limit_estimate > 1e-4);
}

TEST_CASE("classifier shortcuts fire on the library") {
    ClassifyPolicy policy;

    ClassificationReport poisson = classify(poisson_counterexample(), policy);
    CHECK(poisson.verdict == FellerVerdict::not_feller);
    CHECK(poisson.rule_fired == "linear-hyperplane-atom");

    ClassificationReport sub = classify(library_scenario("example-4.1-sublinear"), policy);
    CHECK(sub.verdict == FellerVerdict::feller);
    CHECK(sub.rule_fired == "sublinear-growth");

    ClassificationReport gou = classify(library_scenario("example-4.3-gou"), policy);
    CHECK(gou.verdict == FellerVerdict::not_feller);
    CHECK(gou.rule_fired == "ou-hyperplane-atom");

    ClassificationReport lin = classify(library_scenario("example-4.4-linear"), policy);
    CHECK(lin.verdict == FellerVerdict::feller);
    CHECK(lin.rule_fired == "linear-hyperplane-atom");

    ClassificationReport ode = classify(library_scenario("example-4.5-ode"), policy);
    CHECK(ode.verdict == FellerVerdict::feller);
    CHECK(ode.premise_warning);  // superlinear coefficient: criterion not decisive
}

TEST_CASE("stable power-growth rule matches the exponent arithmetic") {
    ClassifyPolicy policy;
    // beta in [1/alpha, 1) is Feller with symbol |x|^{beta alpha} |xi|^alpha
    CHECK(classify(stable_power(1.5, 0.9), policy).verdict == FellerVerdict::feller);
    CHECK(classify(stable_power(1.5, 1.0), policy).verdict == FellerVerdict::feller);
    // boundary and beyond
    CHECK(classify(stable_power(1.5, 1.0 + 1.0 / 1.5), policy).verdict ==
          FellerVerdict::not_feller);
    CHECK(classify(stable_power(1.5, 2.5), policy).verdict == FellerVerdict::not_feller);
}

TEST_CASE("shortcut verdicts agree with the profile fallback") {
    // the same dynamics behind a custom (shortcut-less) coefficient must land
    // on the same verdict through the numeric profiles
    ClassifyPolicy policy;
    policy.x_max = 1e6;

    Scenario hidden_poisson = poisson_counterexample();
    hidden_poisson.sigma = CoefficientField::custom(
        1, 1, [](const Vec& x, Mat& out) { out(0, 0) = -x(0); },
        SigmaMetadata{std::nullopt, 1.0, std::nullopt});
    hidden_poisson.uniqueness = Uniqueness::declared_weak_unique;
    ClassificationReport rep = classify(hidden_poisson, policy);
    CHECK(rep.rule_fired == "numeric-profile");
    CHECK(rep.verdict == FellerVerdict::not_feller);

    Scenario hidden_sub = library_scenario("example-4.1-sublinear");
    hidden_sub.sigma = CoefficientField::custom(
        1, 1, [](const Vec& x, Mat& out) { out(0, 0) = std::sqrt(1.0 + std::abs(x(0))); },
        SigmaMetadata{std::nullopt, 1.0, std::nullopt});
    hidden_sub.uniqueness = Uniqueness::declared_weak_unique;
    ClassificationReport rep2 = classify(hidden_sub, policy);
    CHECK(rep2.rule_fired == "numeric-profile");
    CHECK(rep2.verdict == FellerVerdict::feller);
}

TEST_CASE("unknown uniqueness marks the verdict conditional") {
    Scenario s = stable_power(1.5, 0.5);
    s.uniqueness = Uniqueness::unknown;
    ClassificationReport rep = classify(s);
    CHECK(rep.conditional);
}

TEST_CASE("criterion decay matches the generator decay (mapping property)") {
    // vanishing criterion <=> |A f(x)| -> 0 along the grid, for compactly
    // supported test functions
    QuadratureSpec quad;
    TestFunction bumps[] = {TestFunction::bump1(0.0, 1.0), TestFunction::bump1(0.5, 2.0),
                            TestFunction::bump1(-1.0, 1.5)};

    Scenario sub = library_scenario("example-4.1-sublinear");
    for (const auto& f : bumps) {
        double af_near = std::abs(generator_apply(sub.sigma, sub.driver, f, 5.0, quad));
        double af_far = std::abs(generator_apply(sub.sigma, sub.driver, f, 1e3, quad));
        CHECK(af_far < 1e-3);
        CHECK(af_far < 0.05 * (af_near + 1e-6));
    }

    Scenario p = poisson_counterexample();
    TestFunction f0 = TestFunction::bump1(0.0, 1.0);
    // jumps land exactly at the origin from every x: |A f| stays at f(0)
    for (double x : {10.0, 1e3, 1e5}) {
        CHECK(std::abs(generator_apply(p.sigma, p.driver, f0, x, quad)) ==
              doctest::Approx(f0(0.0)).epsilon(1e-12));
    }
}

TEST_CASE("zero coefficient rows") {
    // sigma(x) = 0 at x = 0 for the linear shape: mass is everything or
    // nothing depending on |x| < r
    Scenario s = poisson_counterexample();
    Vec x0 = Vec::Zero(1);
    CHECK(condition_mass(s, x0, 0.5).value == doctest::Approx(1.0));  // |0| < r: total mass
    Scenario st = stable_power(1.5, 1.0);  // power sigma vanishes at 0 too
    CHECK(condition_mass(st, x0, 0.5).infinite);  // infinite total mass
}

}  // TEST_SUITE
