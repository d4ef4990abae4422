#include "feller/feller_condition.hpp"

#include <algorithm>
#include <cmath>

#include "feller/errors.hpp"
#include "feller/parallel.hpp"
#include "feller/random.hpp"

namespace feller {

std::string uniqueness_name(Uniqueness u) {
    switch (u) {
        case Uniqueness::lipschitz: return "lipschitz";
        case Uniqueness::declared_weak_unique: return "declared_weak_unique";
        case Uniqueness::unknown: return "unknown";
    }
    return "unknown";
}

Uniqueness uniqueness_from_name(const std::string& name) {
    if (name == "lipschitz") return Uniqueness::lipschitz;
    if (name == "declared_weak_unique") return Uniqueness::declared_weak_unique;
    if (name == "unknown") return Uniqueness::unknown;
    throw InputError("unknown uniqueness declaration: " + name);
}

std::string verdict_name(FellerVerdict v) {
    switch (v) {
        case FellerVerdict::feller: return "feller";
        case FellerVerdict::not_feller: return "not_feller";
        case FellerVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

FellerVerdict verdict_from_name(const std::string& name) {
    if (name == "feller") return FellerVerdict::feller;
    if (name == "not_feller") return FellerVerdict::not_feller;
    if (name == "inconclusive") return FellerVerdict::inconclusive;
    throw InputError("unknown verdict: " + name);
}

std::string profile_verdict_name(ProfileVerdict v) {
    switch (v) {
        case ProfileVerdict::vanishes: return "vanishes";
        case ProfileVerdict::positive_limit: return "positive_limit";
        case ProfileVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

void Scenario::validate() const {
    driver.validate();
    if (driver.dim() != sigma.k())
        throw InputError("scenario: driver dimension must equal sigma's column count");
    if (uniqueness == Uniqueness::lipschitz && !sigma.metadata().lipschitz_const)
        throw InputError("scenario: lipschitz uniqueness requires a declared lipschitz constant");
}

SimScheme Scenario::default_scheme() const {
    if (sigma.form() == SigmaForm::neg_cubic && driver.nu.is_zero() && driver.Q.isZero(0.0))
        return SimScheme::exact_ode;
    bool pure_jump_chain = driver.nu.atoms_only() && !driver.nu.is_zero() &&
                           driver.b.isZero(0.0) && driver.Q.isZero(0.0);
    if (pure_jump_chain) {
        bool all_large = true;
        for (const auto& a : driver.nu.atoms())
            if (a.point.norm() < 1.0) all_large = false;
        if (all_large) return SimScheme::exact_poisson_linear;
    }
    return SimScheme::euler_interlaced;
}

MassResult condition_mass(const Scenario& scenario, const Vec& x, double r,
                          const QuadratureSpec& quad) {
    if (!(r > 0.0)) throw InputError("condition_mass needs r > 0");
    if (x.size() != scenario.d()) throw InputError("condition_mass state dimension mismatch");
    Mat s = scenario.sigma.eval(x);
    if (s.isZero(0.0)) {
        // sigma(x) = 0: the set is everything or nothing depending on |x| < r
        MassResult out;
        if (x.norm() < r) {
            const LevyMeasure& nu = scenario.driver.nu;
            if (nu.stable()) return MassResult::infinity();
            if (nu.density() && nu.dim() == 1) {
                return set_mass(nu, IntervalSet{-kInf, kInf}, quad);
            }
            for (const auto& a : nu.atoms()) out.value += a.mass;
            if (nu.density()) out.value += nu.density()->total_mass;
        }
        return out;
    }
    return set_mass(scenario.driver.nu, AffinePreimageSet{s, x, r}, quad);
}

MassResult condition_mass(const Scenario& scenario, double x, double r,
                          const QuadratureSpec& quad) {
    Vec xv(1);
    xv(0) = x;
    return condition_mass(scenario, xv, r, quad);
}

namespace {

struct DecadeStats {
    double mean = 0.0;
    double slope = 0.0;
    double rel_var = 0.0;
    bool any_infinite = false;
    bool decreasing = true;
    int count = 0;
};

/// Aggregates the last decade (|x| in [x_max/10, x_max]) of per-magnitude
/// worst-case masses.
DecadeStats last_decade_stats(const std::vector<ProfilePoint>& points, double x_max) {
    // group by |x| taking the max over signs
    std::vector<std::pair<double, double>> by_mag;  // (|x|, max mass)
    std::vector<bool> inf_flags;
    for (const auto& p : points) {
        double m = std::abs(p.x);
        bool found = false;
        for (std::size_t i = 0; i < by_mag.size(); ++i) {
            if (std::abs(by_mag[i].first - m) <= 1e-12 * m) {
                by_mag[i].second = std::max(by_mag[i].second, p.mass);
                inf_flags[i] = inf_flags[i] || p.infinite;
                found = true;
                break;
            }
        }
        if (!found) {
            by_mag.emplace_back(m, p.mass);
            inf_flags.push_back(p.infinite);
        }
    }
    std::vector<std::size_t> order(by_mag.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return by_mag[a].first < by_mag[b].first; });

    DecadeStats st;
    double lo = x_max / 10.0 * (1.0 - 1e-9);
    double sum = 0.0, sum_sq = 0.0;
    std::vector<std::pair<double, double>> logpts;
    double prev = -1.0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const auto& [mag, mass] = by_mag[order[oi]];
        bool in_decade = mag >= lo;
        if (in_decade) {
            st.any_infinite = st.any_infinite || inf_flags[order[oi]];
            sum += mass;
            sum_sq += mass * mass;
            ++st.count;
            if (mass > 0.0) logpts.emplace_back(std::log(mag), std::log(mass));
            if (prev >= 0.0 && mass > prev * (1.0 + 1e-9) + 1e-300) st.decreasing = false;
        }
        if (in_decade) prev = mass;
    }
    if (st.count > 0) {
        st.mean = sum / st.count;
        double var = std::max(sum_sq / st.count - st.mean * st.mean, 0.0);
        st.rel_var = st.mean > 0.0 ? std::sqrt(var) / st.mean : 0.0;
    }
    if (logpts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto& [lx, ly] : logpts) {
            mx += lx;
            my += ly;
        }
        mx /= logpts.size();
        my /= logpts.size();
        double num = 0, den = 0;
        for (auto& [lx, ly] : logpts) {
            num += (lx - mx) * (ly - my);
            den += (lx - mx) * (lx - mx);
        }
        st.slope = den > 0.0 ? num / den : 0.0;
    }
    return st;
}

}  // namespace

ConditionProfile condition_profile(const Scenario& scenario, double r, double x_min, double x_max,
                                   int n_points, const QuadratureSpec& quad,
                                   const ProfilePolicy& policy) {
    if (!(0.0 < x_min && x_min < x_max)) throw InputError("condition_profile needs 0 < x_min < x_max");
    if (n_points < 8) throw InputError("condition_profile needs n_points >= 8");

    ConditionProfile profile;
    profile.r = r;

    std::vector<double> mags(n_points);
    for (int i = 0; i < n_points; ++i) {
        mags[i] = x_min * std::pow(x_max / x_min, i / double(n_points - 1));
    }

    if (scenario.d() == 1) {
        profile.points.resize(2 * n_points);
        parallel_for(2 * n_points, [&](std::size_t idx) {
            int i = static_cast<int>(idx / 2);
            int sign = (idx % 2 == 0) ? +1 : -1;
            double x = sign * mags[i];
            MassResult m = condition_mass(scenario, x, r, quad);
            profile.points[idx] = {x, m.value, m.std_error, m.infinite};
        });
    } else {
        // radial rays: coordinate axes plus seeded random directions
        std::vector<Vec> rays;
        for (int axis = 0; axis < scenario.d(); ++axis) {
            Vec e = Vec::Zero(scenario.d());
            e(axis) = 1.0;
            rays.push_back(e);
            rays.push_back(-e);
        }
        auto rng = make_stream(quad.mc_seed, 9);
        std::normal_distribution<double> z(0.0, 1.0);
        for (int i = 0; i < 16; ++i) {
            Vec v(scenario.d());
            for (int j = 0; j < scenario.d(); ++j) v(j) = z(rng);
            if (v.norm() > 0.0) rays.push_back(v / v.norm());
        }
        profile.points.resize(rays.size() * n_points);
        parallel_for(profile.points.size(), [&](std::size_t idx) {
            std::size_t ray_i = idx / n_points;
            int i = static_cast<int>(idx % n_points);
            Vec x = mags[i] * rays[ray_i];
            MassResult m = condition_mass(scenario, x, r, quad);
            // record the signed magnitude along the ray for reporting
            profile.points[idx] = {mags[i], m.value, m.std_error, m.infinite};
        });
    }

    std::sort(profile.points.begin(), profile.points.end(),
              [](const ProfilePoint& a, const ProfilePoint& b) {
                  return std::abs(a.x) < std::abs(b.x);
              });

    DecadeStats st = last_decade_stats(profile.points, x_max);
    profile.limit_estimate = st.any_infinite ? kInf : st.mean;
    profile.loglog_slope = st.slope;

    if (st.any_infinite) {
        profile.verdict = ProfileVerdict::positive_limit;
    } else if (st.mean < policy.vanish_abs && (st.slope < policy.vanish_slope || st.mean == 0.0)) {
        profile.verdict = ProfileVerdict::vanishes;
    } else if (st.mean > policy.positive_floor && st.rel_var < policy.positive_rel_var) {
        profile.verdict = ProfileVerdict::positive_limit;
    } else {
        profile.verdict = ProfileVerdict::inconclusive;
    }
    return profile;
}

namespace {

bool is_power_like(SigmaForm form) {
    return form == SigmaForm::power || form == SigmaForm::power_shifted ||
           form == SigmaForm::neg_linear || form == SigmaForm::neg_cubic ||
           form == SigmaForm::quadratic || form == SigmaForm::linear_vec;
}

bool is_pure_stable_driver(const LevyTriplet& driver) {
    return driver.nu.stable() && driver.nu.atoms().empty() && !driver.nu.density() &&
           driver.Q.isZero(0.0) && driver.b.isZero(0.0) && std::isinf(driver.nu.trunc_radius());
}

}  // namespace

ClassificationReport classify(const Scenario& scenario, const ClassifyPolicy& policy,
                              const QuadratureSpec& quad) {
    scenario.validate();
    ClassificationReport report;
    report.conditional = (scenario.uniqueness == Uniqueness::unknown);

    const auto& meta = scenario.sigma.metadata();
    if (meta.growth_exponent && *meta.growth_exponent > 1.0) {
        report.premise_warning = true;
        report.notes += "sigma grows super-linearly; the criterion is no longer decisive; ";
    } else if (!meta.linear_growth_const && !meta.growth_exponent) {
        report.premise_warning = true;
        report.notes += "no growth metadata declared; linear-growth premise unverified; ";
    }

    auto finish = [&](FellerVerdict v, const std::string& rule) {
        report.verdict = v;
        report.rule_fired = rule;
        if (policy.force_profiles && report.profiles.empty()) {
            for (double r : policy.radii) {
                report.profiles.push_back(condition_profile(scenario, r, policy.x_min,
                                                            policy.x_max, policy.n_points, quad,
                                                            policy.profile));
            }
        }
        return report;
    };

    // 1. sublinear growth: the criterion holds for every driver
    if (meta.growth_exponent && *meta.growth_exponent < 1.0) {
        return finish(FellerVerdict::feller, "sublinear-growth");
    }

    // 2. pure symmetric stable driver + power-like sigma: compare beta*alpha
    //    with 1 + alpha
    if (is_pure_stable_driver(scenario.driver) && scenario.k() == 1 &&
        is_power_like(scenario.sigma.form()) && meta.growth_exponent) {
        double alpha = scenario.driver.nu.stable()->alpha;
        double beta = *meta.growth_exponent;
        double margin = beta * alpha - (1.0 + alpha);
        if (margin < -1e-12) return finish(FellerVerdict::feller, "stable-power-growth");
        return finish(FellerVerdict::not_feller, "stable-power-growth");
    }

    // 3. Ornstein-Uhlenbeck shape: atom mass on the hyperplane {y1 = -1}
    if (scenario.sigma.form() == SigmaForm::gou) {
        double mass = hyperplane_mass(scenario.driver.nu, 0, -1.0);
        return finish(mass > 0.0 ? FellerVerdict::not_feller : FellerVerdict::feller,
                      "ou-hyperplane-atom");
    }

    // 4. linear shape sigma(x) = x c^T: atom mass on {c . y = -1}
    if (scenario.sigma.form() == SigmaForm::linear_vec ||
        scenario.sigma.form() == SigmaForm::neg_linear) {
        Vec c;
        if (scenario.sigma.form() == SigmaForm::neg_linear) {
            c = Vec::Constant(1, -1.0);
        } else {
            const auto& raw = scenario.sigma.params().at("c");
            c.resize(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i) c(i) = raw[i];
        }
        double mass = hyperplane_mass(scenario.driver.nu, c, -1.0);
        return finish(mass > 0.0 ? FellerVerdict::not_feller : FellerVerdict::feller,
                      "linear-hyperplane-atom");
    }

    // fallback: numeric profiles over the probe radii
    bool all_vanish = true;
    bool any_positive = false;
    for (double r : policy.radii) {
        ConditionProfile p = condition_profile(scenario, r, policy.x_min, policy.x_max,
                                               policy.n_points, quad, policy.profile);
        all_vanish = all_vanish && (p.verdict == ProfileVerdict::vanishes);
        any_positive = any_positive || (p.verdict == ProfileVerdict::positive_limit);
        report.profiles.push_back(std::move(p));
    }
    if (any_positive) {
        report.verdict = FellerVerdict::not_feller;
    } else if (all_vanish) {
        report.verdict = FellerVerdict::feller;
    } else {
        report.verdict = FellerVerdict::inconclusive;
    }
    report.rule_fired = "numeric-profile";
    return report;
}

}  // namespace feller
