#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feller/coefficient_field.hpp"
#include "feller/levy_triplet.hpp"

namespace feller {

enum class Uniqueness { lipschitz, declared_weak_unique, unknown };

std::string uniqueness_name(Uniqueness u);
Uniqueness uniqueness_from_name(const std::string& name);

enum class FellerVerdict { feller, not_feller, inconclusive };

std::string verdict_name(FellerVerdict v);
FellerVerdict verdict_from_name(const std::string& name);

enum class SimScheme { euler_interlaced, exact_ode, exact_poisson_linear };

/// One classification / simulation unit: a driving triplet, a coefficient
/// field, and a weak-uniqueness declaration (declared by the user, not
/// verified numerically).
struct Scenario {
    std::string label;
    LevyTriplet driver;
    CoefficientField sigma;
    Uniqueness uniqueness = Uniqueness::unknown;
    std::optional<FellerVerdict> expected_verdict;
    std::optional<std::string> symbol_formula_label;

    int d() const { return sigma.d(); }
    int k() const { return sigma.k(); }
    void validate() const;

    /// True when the generator reduces to exact sums (no density, no stable
    /// part): martingale-residual diagnostics use these scenarios.
    bool has_exact_generator() const { return driver.nu.atoms_only(); }

    /// Scheme a simulation of this scenario should default to.
    SimScheme default_scheme() const;
};

/// Mass of { y : |sigma(x) y + x| < r } under the driving jump measure; the
/// quantity whose decay as |x| -> infinity is being probed.
MassResult condition_mass(const Scenario& scenario, const Vec& x, double r,
                          const QuadratureSpec& quad = {});

MassResult condition_mass(const Scenario& scenario, double x, double r,
                          const QuadratureSpec& quad = {});

struct ProfilePoint {
    double x;  // signed coordinate along the probed ray (d = 1: the state itself)
    double mass;
    double std_error;
    bool infinite;
};

enum class ProfileVerdict { vanishes, positive_limit, inconclusive };

std::string profile_verdict_name(ProfileVerdict v);

struct ConditionProfile {
    double r = 1.0;
    std::vector<ProfilePoint> points;  // both signs for d = 1, ordered by |x|
    double limit_estimate = 0.0;       // mean of last-decade masses
    double loglog_slope = 0.0;         // fitted on the last decade
    ProfileVerdict verdict = ProfileVerdict::inconclusive;
};

/// Thresholds that turn a finite probe of a limit into a verdict.
struct ProfilePolicy {
    double vanish_abs = 1e-6;      // last-decade masses below this ...
    double vanish_slope = -0.1;    // ... and log-log slope below this => vanishes
    double positive_floor = 1e-4;  // positive limit must exceed this ...
    double positive_rel_var = 0.05;  // ... with small relative variation
};

ConditionProfile condition_profile(const Scenario& scenario, double r, double x_min, double x_max,
                                   int n_points, const QuadratureSpec& quad = {},
                                   const ProfilePolicy& policy = {});

struct ClassifyPolicy {
    std::vector<double> radii{0.1, 1.0, 10.0};
    double x_min = 1e2;
    double x_max = 1e6;
    int n_points = 25;
    bool force_profiles = false;  // compute profiles even when a shortcut fires
    ProfilePolicy profile;
};

struct ClassificationReport {
    FellerVerdict verdict = FellerVerdict::inconclusive;
    std::string rule_fired;
    bool conditional = false;      // uniqueness was declared unknown
    bool premise_warning = false;  // superlinear growth: criterion no longer decisive
    std::vector<ConditionProfile> profiles;
    std::string notes;
};

/// Applies the analytic shortcut rules in order (sublinear growth; stable
/// driver power-growth exponent test; hyperplane atom tests for the
/// Ornstein-Uhlenbeck and linear shapes), then falls back to numeric profiles
/// over the policy radii.
ClassificationReport classify(const Scenario& scenario, const ClassifyPolicy& policy = {},
                              const QuadratureSpec& quad = {});

}  // namespace feller
