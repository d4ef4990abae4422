#pragma once

#include "feller/sde_simulator.hpp"
#include "feller/symbol_engine.hpp"

namespace feller {

/// All statistical decision thresholds used by the probes, in one place.
struct DiagnosticsPolicy {
    double sigma_mult = 3.0;          // moment / residual checks at 3 sigma
    double violate_stderr_mult = 5.0; // flatness must exceed 5 x stderr to condemn
    double no_decay_ratio = 0.5;      // "no decay": last estimate >= ratio * previous
    double noise_floor_mult = 5.0;    // decay "into noise": est <= mult * max(se, 1/n)
    double shoulder_frac = 0.05;      // smoothed-indicator shoulder width
    double cap_hit_frac = 0.10;       // exit-time cap hits above this => inconclusive
    double explosion_frac = 0.01;     // exploded paths above this => inconclusive
    double residual_abs_tol = 1e-3;   // deterministic floor for martingale residuals
    double lyapunov_blowup_ratio = 100.0;  // ratio growth marking a premise violation
};

enum class ProbeVerdict { consistent_with_feller, violates_feller, inconclusive };

std::string probe_verdict_name(ProbeVerdict v);

struct TransitionEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
    int n_exploded = 0;
    bool inconclusive = false;  // too many explosions
};

/// Monte Carlo estimate of E^x f(X_t) with standard error. t = 0 is exact.
TransitionEstimate estimate_transition(const Scenario& scenario, const SimulationConfig& config,
                                       const std::function<double(const Vec&)>& f, const Vec& x,
                                       double t);

TransitionEstimate estimate_transition(const Scenario& scenario, const SimulationConfig& config,
                                       const std::function<double(double)>& f, double x, double t);

// --- vanishing-at-infinity probe --------------------------------------------

struct CinfRow {
    double x;
    double raw_estimate;  // indicator 1_{|X_t| <= R}
    double raw_se;
    double smooth_estimate;  // C^2 surrogate with shoulders
    double smooth_se;
    int n_exploded;
};

struct CinfReport {
    double R = 1.0;
    double t = 1.0;
    std::vector<CinfRow> rows;       // ordered by increasing |x|
    double limit_estimate = 0.0;     // last smoothed estimate (empirical limit)
    ProbeVerdict verdict = ProbeVerdict::inconclusive;
    std::string notes;
};

/// Estimates P^x(|X_t| <= R) along the grid and decides whether the mass
/// escapes to infinity (consistent with the semigroup preserving decay) or
/// stays put (violating it).
CinfReport cinf_decay_probe(const Scenario& scenario, const SimulationConfig& config, double R,
                            double t, const std::vector<double>& x_grid,
                            const DiagnosticsPolicy& policy = {});

// --- strong continuity --------------------------------------------------------

struct ContinuityRow {
    double t;
    double sup_deviation;  // sup over the x grid of |T_t f - f|
};

struct ContinuityReport {
    std::vector<ContinuityRow> rows;  // in the order of the supplied t list
    bool trend_decreasing = true;     // deviations shrink as t does
};

ContinuityReport strong_continuity_probe(const Scenario& scenario, const SimulationConfig& config,
                                         const TestFunction& f, const std::vector<double>& x_grid,
                                         const std::vector<double>& t_list);

// --- exit-time quotient ---------------------------------------------------------

struct DynkinEstimate {
    double quotient = 0.0;
    double std_error = 0.0;
    double mean_exit_time = 0.0;
    double cap_hit_frac = 0.0;
    bool inconclusive = false;
    int n_paths = 0;
};

/// Ratio estimator (E^x f(X_tau) - f(x)) / E^x tau for the first exit from
/// B(x, r), tau capped at t_cap. Boundary crossings by the continuous part are
/// refined by bisection; jump crossings are exact.
DynkinEstimate dynkin_quotient(const Scenario& scenario, const SimulationConfig& config,
                               const TestFunction& f, const Vec& x, double r, double t_cap,
                               const DiagnosticsPolicy& policy = {});

DynkinEstimate dynkin_quotient(const Scenario& scenario, const SimulationConfig& config,
                               const TestFunction& f, double x, double r, double t_cap,
                               const DiagnosticsPolicy& policy = {});

// --- martingale residuals --------------------------------------------------------

struct MartingaleIncrement {
    double t0, t1;
    double mean;
    double std_error;
    bool pass;
};

struct MartingaleReport {
    std::vector<MartingaleIncrement> increments;
    std::vector<std::pair<double, double>> drift;  // (t, E M_t)
    bool all_pass = true;
};

/// Checks that f(X_t) - f(X_0) - int_0^t A f(X_s) ds has mean-zero increments
/// over the coarse grid (trapezoid along the fine path, jump times included
/// exactly since they are grid events).
MartingaleReport martingale_residual(const Scenario& scenario, const SimulationConfig& config,
                                     const TestFunction& f, const Vec& x0,
                                     const std::vector<double>& t_grid,
                                     const DiagnosticsPolicy& policy = {},
                                     const QuadratureSpec& quad = {});

MartingaleReport martingale_residual(const Scenario& scenario, const SimulationConfig& config,
                                     const TestFunction& f, double x0,
                                     const std::vector<double>& t_grid,
                                     const DiagnosticsPolicy& policy = {},
                                     const QuadratureSpec& quad = {});

// --- Lyapunov bound ---------------------------------------------------------------

struct LyapunovCheck {
    double x, t;
    double estimate;  // E^x f(Y_t)
    double std_error;
    double bound;     // f(x) e^{C t}
    bool pass;
};

struct LyapunovReport {
    double fitted_c = 0.0;
    bool premise_violation = false;  // ratio |Bf|/f diverges (superlinear sigma)
    std::vector<LyapunovCheck> checks;
    bool all_pass = true;
    std::string notes;
};

/// Fits the smallest C with |B f| <= C f for f(x) = (x^2+1)^{-1} on a log grid
/// over [fit_lo, fit_hi], then verifies E^x f(Y_t) <= f(x) e^{C t} by
/// simulation of the truncated dynamics at the given (x, t) pairs.
LyapunovReport lyapunov_bound_probe(const Scenario& scenario, const SimulationConfig& config,
                                    double fit_lo, double fit_hi,
                                    const std::vector<std::pair<double, double>>& xt_pairs,
                                    const DiagnosticsPolicy& policy = {},
                                    const QuadratureSpec& quad = {});

/// f(x) = (x^2 + 1)^{-1} with analytic derivatives (unbounded support).
TestFunction inverse_quadratic_weight();

}  // namespace feller
