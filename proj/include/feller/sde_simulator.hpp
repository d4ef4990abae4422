#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "feller/feller_condition.hpp"

namespace feller {

std::string scheme_name(SimScheme s);
SimScheme scheme_from_name(const std::string& name);

struct SimulationConfig {
    double horizon = 1.0;
    double dt = 1e-3;
    double trunc_r = 1.0;          // large jumps beyond this are interlaced
    double small_jump_eps = -1.0;  // jumps in (0, eps] are dropped; < 0 => 1e-3 * trunc_r
    int n_paths = 10000;
    std::uint64_t master_seed = 0x20240729ULL;
    SimScheme scheme = SimScheme::euler_interlaced;
    double explosion_threshold = 1e12;

    double eps() const { return small_jump_eps > 0.0 ? small_jump_eps : 1e-3 * trunc_r; }
    void validate() const;
};

struct JumpEvent {
    double time;
    Vec jump;  // the driver-side jump C
    Vec state_before;
    Vec state_after;
    bool interlaced;
};

struct PathSample {
    std::vector<double> times;   // grid nodes plus jump times, strictly increasing
    std::vector<Vec> states;     // post-jump states at the recorded times
    std::vector<JumpEvent> jump_log;
    bool exploded = false;
    std::uint64_t path_index = 0;
};

/// Streaming interface over one simulated path. Continuous pieces arrive as
/// on_segment calls, jumps (both the small compound-Poisson ones and the
/// interlaced tail jumps) as on_jump; observers can stop the run early.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_point(double /*t*/, const Vec& /*x*/) {}
    virtual void on_segment(double /*t0*/, const Vec& /*x0*/, double /*t1*/, const Vec& /*x1*/) {}
    virtual void on_jump(double /*t*/, const Vec& /*before*/, const Vec& /*after*/,
                         const Vec& /*jump*/, bool /*interlaced*/) {}
    virtual bool keep_going() const { return true; }
};

struct RunStatus {
    bool exploded = false;
    double t_end = 0.0;
};

/// Drives dX = sigma(X-) dL over [0, horizon].
///
/// The driver is split at trunc_r: jumps above it arrive at exponential clocks
/// with the exact tail law (interlacing); jumps in (eps, trunc_r] run as a
/// jump-adapted compound-Poisson stream inside the Euler grid; jumps below
/// eps are dropped. Because retained jumps are applied raw, the step drift is
/// the triplet drift minus the first moment of every raw-applied jump band
/// that the cutoff convention compensates.
class PathEngine {
public:
    PathEngine(const Scenario& scenario, const SimulationConfig& config, bool interlace);

    RunStatus run(const Vec& x0, std::uint64_t path_index, StepObserver& obs) const;

    double tail_intensity() const { return tail_intensity_; }
    double small_intensity() const { return small_intensity_; }
    const Vec& effective_drift() const { return drift_eff_; }

private:
    void run_euler(const Vec& x0, std::mt19937_64& rng, StepObserver& obs, RunStatus& status) const;
    void run_exact_ode(const Vec& x0, StepObserver& obs, RunStatus& status) const;
    void run_exact_jump_chain(const Vec& x0, std::mt19937_64& rng, StepObserver& obs,
                              RunStatus& status) const;

    const Scenario* scenario_;
    SimulationConfig config_;
    bool interlace_;
    LevyMeasure nu_small_;  // driver measure restricted to (0, trunc_r]
    std::optional<TailSampler> small_sampler_;  // jumps in (eps, trunc_r]
    std::optional<TailSampler> tail_sampler_;   // jumps above trunc_r
    double small_intensity_ = 0.0;
    double tail_intensity_ = 0.0;
    Vec drift_eff_;
    Mat q_sqrt_;
    bool has_gauss_ = false;
};

PathSample simulate_truncated(const Scenario& scenario, const SimulationConfig& config,
                              const Vec& x0, std::uint64_t path_index = 0);
PathSample simulate_interlaced(const Scenario& scenario, const SimulationConfig& config,
                               const Vec& x0, std::uint64_t path_index = 0);

PathSample simulate_truncated(const Scenario& scenario, const SimulationConfig& config, double x0,
                              std::uint64_t path_index = 0);
PathSample simulate_interlaced(const Scenario& scenario, const SimulationConfig& config, double x0,
                               std::uint64_t path_index = 0);

/// Closed-form flow of dX = -X^3 dt.
double exact_ode_path(double x0, double t);

/// Explicit Euler for dX = -X^3 dt with stability sub-stepping near large |x|.
/// With allow_substeps = false, refuses steps violating dt <= 0.1 / x0^2 and
/// suggests a stable one.
PathSample euler_ode_path(double x0, double horizon, double dt, bool allow_substeps = true);

}  // namespace feller
