#include <doctest.h>

#include <cmath>

#include "feller/levy_measure.hpp"
#include "feller/random.hpp"
#include "oracles.hpp"

using namespace feller;

namespace {

LevyMeasure stable_measure(double alpha, double scale) {
    LevyMeasure nu(1);
    nu.set_stable(alpha, scale);
    return nu;
}

}  // namespace

TEST_SUITE("levy_measure") {

TEST_CASE("atom membership masses are exact") {
    LevyMeasure nu(1);
    nu.add_atom(1.0, 2.0);
    MassResult m = set_mass(nu, IntervalSet{0.5, 1.5});
    CHECK(m.value == 2.0);
    CHECK(m.std_error == 0.0);
    CHECK_FALSE(m.infinite);
    CHECK(set_mass(nu, IntervalSet{1.5, 2.5}).value == 0.0);
}

TEST_CASE("stable interval mass matches the antiderivative") {
    // density |y|^{-2}: mass over (a, b) is 1/a - 1/b
    LevyMeasure nu = stable_measure(1.0, 1.0);
    double a = 0.3, b = 2.5;
    MassResult m = set_mass(nu, IntervalSet{a, b});
    CHECK(m.value == doctest::Approx(1.0 / a - 1.0 / b).epsilon(1e-12));

    // cross-check the closed form by an independent log-Simpson integral
    double alpha = 1.5, scale = 0.7;
    LevyMeasure nu2 = stable_measure(alpha, scale);
    double direct = oracle::simpson_log(
        [&](double y) { return scale * std::pow(y, -1.0 - alpha); }, a, b, 20000);
    CHECK(set_mass(nu2, IntervalSet{a, b}).value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("sets reaching the origin of an infinite-activity measure flag infinity") {
    LevyMeasure nu = stable_measure(1.2, 1.0);
    CHECK(set_mass(nu, IntervalSet{-0.5, 0.5}).infinite);
    CHECK(set_mass(nu, BallSet{Vec::Zero(1), 0.1}).infinite);
    CHECK_FALSE(set_mass(nu, BallComplementSet{0.1}).infinite);
}

TEST_CASE("affine preimage membership in two dimensions") {
    // atom at (-1, 5) with mass 0.3; the strip {|x y1 + y2 + x| < r} captures
    // it exactly when r exceeds |y2| = 5
    LevyMeasure nu(2);
    Vec p(2);
    p << -1.0, 5.0;
    nu.add_atom(p, 0.3);
    double x = 100.0;
    Mat M(1, 2);
    M << x, 1.0;
    Vec v(1);
    v << x;
    CHECK(set_mass(nu, AffinePreimageSet{M, v, 1.0}).value == 0.0);
    CHECK(set_mass(nu, AffinePreimageSet{M, v, 4.99}).value == 0.0);
    CHECK(set_mass(nu, AffinePreimageSet{M, v, 5.01}).value == doctest::Approx(0.3));
}

TEST_CASE("tail masses: atoms, stable closed form, exponential density") {
    LevyMeasure atoms(1);
    atoms.add_atom(1.0, 3.0);
    CHECK(tail_mass(atoms, 0.5) == 3.0);
    CHECK(tail_mass(atoms, 2.0) == 0.0);

    // integral of |y|^{-1.5} over |y| > 1 is 4
    CHECK(tail_mass(stable_measure(0.5, 1.0), 1.0) == doctest::Approx(4.0).epsilon(1e-12));

    LevyMeasure expd(1);
    expd.set_density(make_density("exp_decay", {{"amplitude", 1.0}, {"rate", 1.0}}));
    CHECK(tail_mass(expd, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("truncation drops atoms and clips continuous parts") {
    LevyMeasure poisson(1);
    poisson.add_atom(1.0, 1.0);
    LevyMeasure cut = poisson.truncated(0.5);
    CHECK(cut.is_zero());

    LevyMeasure st = stable_measure(1.5, 1.0).truncated(1.0);
    // antiderivative oracle for the band 0.5 < |y| <= 1
    double expected = 2.0 * oracle::stable_band_mass(1.0, 1.5, 0.5, 1.0);
    CHECK(tail_mass(st, 0.5) == doctest::Approx(expected).epsilon(1e-12));
    // atom exactly at the truncation radius stays (closed ball)
    LevyMeasure at(1);
    at.add_atom(0.5, 2.0);
    CHECK(tail_mass(at.truncated(0.5), 0.25) == 2.0);
}

TEST_CASE("set_mass is additive over interval partitions") {
    LevyMeasure nu(1);
    nu.add_atom(0.7, 0.4);
    nu.set_stable(1.1, 0.9);
    double whole = set_mass(nu, IntervalSet{0.2, 3.0}).value;
    double left = set_mass(nu, IntervalSet{0.2, 0.9}).value;
    double right = set_mass(nu, IntervalSet{0.9, 3.0}).value;
    CHECK(whole == doctest::Approx(left + right).epsilon(1e-10));
}

TEST_CASE("signed moments honor boundary inclusion flags") {
    LevyMeasure nu(1);
    nu.add_atom(0.5, 2.0);
    nu.add_atom(-1.0, 1.0);
    CHECK(signed_moment(nu, 0.5, 1.0, true, true) == doctest::Approx(0.5 * 2.0 - 1.0));
    CHECK(signed_moment(nu, 0.5, 1.0, false, true) == doctest::Approx(-1.0));
    CHECK(signed_moment(nu, 0.5, 1.0, true, false) == doctest::Approx(1.0));
    CHECK(signed_moment(nu, 0.5, 1.0, false, false) == 0.0);
    // symmetric stable contributes nothing
    nu.set_stable(1.5, 1.0);
    CHECK(signed_moment(nu, 0.25, 2.0, true, true) == doctest::Approx(0.0));
}

TEST_CASE("tail sampling: single atom is deterministic") {
    LevyMeasure nu(1);
    nu.add_atom(2.0, 5.0);
    auto rng = make_stream(7, 0);
    for (int i = 0; i < 32; ++i) {
        CHECK(sample_tail_jump(nu, 1.0, rng)(0) == 2.0);
    }
    CHECK_THROWS_AS(sample_tail_jump(nu, 3.0, rng), std::domain_error);
}

TEST_CASE("tail sampling: two-atom frequencies match the discrete law") {
    LevyMeasure nu(1);
    nu.add_atom(1.0, 1.0);
    nu.add_atom(3.0, 3.0);
    TailSampler sampler(nu, 0.5);
    auto rng = make_stream(11, 0);
    int n = 100000, hits = 0;
    for (int i = 0; i < n; ++i) {
        if (sampler.sample(rng)(0) == 3.0) ++hits;
    }
    double p = 0.75;
    double sd = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(hits / double(n) - p) < 3.0 * sd);
}

TEST_CASE("tail sampling: stable inverse matches the target CDF") {
    // alpha = 1, scale 1, r = 1: conditional CDF of |Y| on a side is 1 - 1/y
    LevyMeasure nu = stable_measure(1.0, 1.0);
    TailSampler sampler(nu, 1.0);
    auto rng = make_stream(13, 0);
    std::vector<double> mags;
    int pos = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double y = sampler.sample(rng)(0);
        if (y > 0) ++pos;
        mags.push_back(std::abs(y));
    }
    double ks = oracle::ks_statistic(mags, [](double y) { return 1.0 - 1.0 / y; });
    CHECK(ks <= 0.01);
    CHECK(std::abs(pos / double(n) - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("tail sampling: density table matches the exponential law") {
    LevyMeasure nu(1);
    nu.set_density(make_density("exp_decay", {{"amplitude", 1.0}, {"rate", 1.0}}));
    TailSampler sampler(nu, 0.5);
    CHECK(sampler.total_intensity() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-6));
    auto rng = make_stream(17, 0);
    std::vector<double> mags;
    const int n = 100000;
    for (int i = 0; i < n; ++i) mags.push_back(std::abs(sampler.sample(rng)(0)));
    // conditional CDF on |y| > 1/2: 1 - e^{-(y - 1/2)}
    double ks =
        oracle::ks_statistic(mags, [](double y) { return 1.0 - std::exp(-(y - 0.5)); });
    CHECK(ks <= 0.01);
}

TEST_CASE("integrability report") {
    CHECK(check_levy_integrability(stable_measure(1.9, 1.0)).near_zero_ok);

    // |y|^{-3} near zero is too heavy: envelope exponent 2
    LevyMeasure bad(1);
    bad.set_density(make_density("power_law", {{"amplitude", 1.0}, {"exponent", 3.0}}));
    CHECK_FALSE(check_levy_integrability(bad).near_zero_ok);

    LevyMeasure tiny(1);
    tiny.add_atom(0.001, 1e6);
    IntegrabilityReport rep = check_levy_integrability(tiny);
    CHECK(rep.near_zero_ok);
    CHECK(rep.tail_ok);
    CHECK(rep.min_integral == doctest::Approx(1e6 * 1e-6).epsilon(1e-12));
}

TEST_CASE("gauss2d density masses via its exact sampler") {
    LevyMeasure nu(2);
    nu.set_density(make_density(
        "gauss2d", {{"mass", 1.0}, {"center_x", 1.0}, {"center_y", 1.0}, {"sigma", 0.5}}));
    // a huge ball captures the full mass
    MassResult all = set_mass(nu, BallSet{Vec::Zero(2), 100.0});
    CHECK(all.value == doctest::Approx(1.0).epsilon(0.02));
    // tail mass beyond the bulk is small
    CHECK(tail_mass(nu, 10.0) == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("validation rejects malformed measures") {
    LevyMeasure nu(1);
    CHECK_THROWS_AS(nu.add_atom(0.0, 1.0), InputError);
    CHECK_THROWS_AS(nu.add_atom(1.0, -2.0), InputError);
    CHECK_THROWS_AS(nu.set_stable(2.5, 1.0), InputError);
    LevyMeasure nu2(2);
    CHECK_THROWS_AS(nu2.set_stable(1.0, 1.0), InputError);
}

}  // TEST_SUITE
