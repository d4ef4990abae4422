#include "feller/sde_simulator.hpp"

#include <algorithm>
#include <cmath>

#include "feller/errors.hpp"
#include "feller/random.hpp"

namespace feller {

std::string scheme_name(SimScheme s) {
    switch (s) {
        case SimScheme::euler_interlaced: return "euler_interlaced";
        case SimScheme::exact_ode: return "exact_ode";
        case SimScheme::exact_poisson_linear: return "exact_poisson_linear";
    }
    return "euler_interlaced";
}

SimScheme scheme_from_name(const std::string& name) {
    if (name == "euler_interlaced") return SimScheme::euler_interlaced;
    if (name == "exact_ode") return SimScheme::exact_ode;
    if (name == "exact_poisson_linear") return SimScheme::exact_poisson_linear;
    throw InputError("unknown simulation scheme: " + name);
}

void SimulationConfig::validate() const {
    if (!(horizon > 0.0)) throw InputError("config: horizon must be positive");
    if (!(dt > 0.0 && dt <= horizon)) throw InputError("config: need 0 < dt <= horizon");
    if (!(trunc_r > 0.0)) throw InputError("config: trunc_r must be positive");
    if (!(eps() > 0.0 && eps() < trunc_r))
        throw InputError("config: need 0 < small_jump_eps < trunc_r");
    if (n_paths < 1) throw InputError("config: n_paths must be >= 1");
}

namespace {

/// First moment of the measure over the band {lo <|y|<= hi} intersected with
/// {|y| < 1}; this is the compensator mass that raw-applied jumps carry.
Vec compensated_band_moment(const LevyMeasure& nu, double lo, double hi,
                            const QuadratureSpec& quad) {
    if (nu.dim() == 1) {
        Vec m(1);
        if (hi < 1.0) {
            m(0) = signed_moment(nu, lo, hi, false, true, quad);
        } else {
            m(0) = signed_moment(nu, lo, 1.0, false, false, quad);
        }
        return m;
    }
    Vec m = Vec::Zero(nu.dim());
    for (const auto& a : nu.atoms()) {
        double t = a.point.norm();
        if (t > lo && t <= hi && t < 1.0) m += a.mass * a.point;
    }
    if (nu.density()) {
        const auto& g = *nu.density();
        auto rng = make_stream(quad.mc_seed, 10);
        std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
        Vec acc = Vec::Zero(nu.dim());
        for (std::size_t i = 0; i < n; ++i) {
            Vec y = g.sampler(rng);
            double t = y.norm();
            if (t > lo && t <= hi && t < 1.0 && t <= nu.trunc_radius()) acc += y;
        }
        m += g.total_mass * acc / static_cast<double>(n);
    }
    return m;
}

Mat psd_sqrt(const Mat& Q) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Q);
    Vec ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

PathEngine::PathEngine(const Scenario& scenario, const SimulationConfig& config, bool interlace)
    : scenario_(&scenario), config_(config), interlace_(interlace), nu_small_(1) {
    config.validate();
    scenario.validate();

    const LevyMeasure& nu = scenario.driver.nu;
    QuadratureSpec quad;

    nu_small_ = nu.truncated(config.trunc_r);
    double eps = config.eps();

    if (!nu_small_.is_zero()) {
        TailSampler small(nu_small_, eps, quad);
        small_intensity_ = small.total_intensity();
        if (small_intensity_ > 0.0) small_sampler_.emplace(std::move(small));
    }

    if (interlace_) {
        TailSampler tail(nu, config.trunc_r, quad);
        tail_intensity_ = tail.total_intensity();
        if (tail_intensity_ > 0.0) tail_sampler_.emplace(std::move(tail));
    }

    // drift: raw-applied jumps lose their compensator, so subtract the first
    // moment over (eps, trunc_r] /\ {|y| < 1}; interlaced tail jumps likewise
    // over (trunc_r, 1).
    drift_eff_ = scenario.driver.b - compensated_band_moment(nu, eps, config.trunc_r, quad);
    if (interlace_ && config.trunc_r < 1.0) {
        Vec tail_moment(nu.dim());
        if (nu.dim() == 1) {
            tail_moment(0) = signed_moment(nu, config.trunc_r, 1.0, false, false, quad);
        } else {
            tail_moment = compensated_band_moment(nu, config.trunc_r, kInf, quad);
        }
        drift_eff_ -= tail_moment;
    }

    has_gauss_ = !scenario.driver.Q.isZero(0.0);
    if (has_gauss_) q_sqrt_ = psd_sqrt(scenario.driver.Q);

    if (config.scheme == SimScheme::exact_ode) {
        if (!(scenario.sigma.form() == SigmaForm::neg_cubic && nu.is_zero() &&
              scenario.driver.Q.isZero(0.0)))
            throw InputError("exact_ode scheme requires the cubic-drift deterministic scenario");
    }
    if (config.scheme == SimScheme::exact_poisson_linear) {
        bool ok = nu.atoms_only() && !nu.is_zero() && scenario.driver.b.isZero(0.0) &&
                  scenario.driver.Q.isZero(0.0);
        for (const auto& a : nu.atoms())
            if (a.point.norm() < 1.0) ok = false;
        if (!ok)
            throw InputError(
                "exact_poisson_linear scheme requires a pure compound-Poisson driver with unit-or-"
                "larger jumps and no drift/Gaussian part");
    }
}

RunStatus PathEngine::run(const Vec& x0, std::uint64_t path_index, StepObserver& obs) const {
    if (x0.size() != scenario_->d()) throw InputError("initial state dimension mismatch");
    RunStatus status;
    auto rng = make_stream(config_.master_seed, path_index);
    switch (config_.scheme) {
        case SimScheme::exact_ode: run_exact_ode(x0, obs, status); break;
        case SimScheme::exact_poisson_linear: run_exact_jump_chain(x0, rng, obs, status); break;
        case SimScheme::euler_interlaced: run_euler(x0, rng, obs, status); break;
    }
    return status;
}

void PathEngine::run_exact_ode(const Vec& x0, StepObserver& obs, RunStatus& status) const {
    double t = 0.0;
    Vec x(1), x_next(1);
    x(0) = exact_ode_path(x0(0), 0.0);
    obs.on_point(0.0, x);
    while (t < config_.horizon && obs.keep_going()) {
        double t_next = std::min(t + config_.dt, config_.horizon);
        x_next(0) = exact_ode_path(x0(0), t_next);
        obs.on_segment(t, x, t_next, x_next);
        x = x_next;
        t = t_next;
        obs.on_point(t, x);
    }
    status.t_end = t;
}

void PathEngine::run_exact_jump_chain(const Vec& x0, std::mt19937_64& rng, StepObserver& obs,
                                      RunStatus& status) const {
    const auto& atoms = scenario_->driver.nu.atoms();
    double total_rate = 0.0;
    for (const auto& a : atoms) total_rate += a.mass;
    std::exponential_distribution<double> exp_dist(total_rate);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double t = 0.0;
    Vec x = x0;
    Mat s(scenario_->d(), scenario_->k());
    obs.on_point(0.0, x);
    double next_jump = exp_dist(rng);
    double next_grid = config_.dt;
    while (t < config_.horizon && obs.keep_going()) {
        double t_next = std::min(std::min(next_grid, config_.horizon), next_jump);
        if (t_next > t) obs.on_segment(t, x, t_next, x);  // state constant between jumps
        t = t_next;
        if (!obs.keep_going()) break;
        if (t == next_jump && t <= config_.horizon) {
            double u = unif(rng) * total_rate;
            const Atom* chosen = &atoms.back();
            for (const auto& a : atoms) {
                if (u < a.mass) {
                    chosen = &a;
                    break;
                }
                u -= a.mass;
            }
            Vec before = x;
            scenario_->sigma.eval_into(before, s);
            x = before + s * chosen->point;
            obs.on_jump(t, before, x, chosen->point, true);
            if (x.cwiseAbs().maxCoeff() > config_.explosion_threshold) {
                status.exploded = true;
                break;
            }
            next_jump = t + exp_dist(rng);
        }
        if (t >= next_grid) {
            obs.on_point(t, x);
            next_grid += config_.dt;
        } else if (t == config_.horizon) {
            obs.on_point(t, x);
        }
    }
    status.t_end = t;
}

void PathEngine::run_euler(const Vec& x0, std::mt19937_64& rng, StepObserver& obs,
                           RunStatus& status) const {
    const int d = scenario_->d();
    const int k = scenario_->k();
    double t = 0.0;
    Vec x = x0;
    Mat s(d, k);
    Vec z(k), dl(k), x_new(d), before(d), jump(k);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::poisson_distribution<int> poisson;
    std::exponential_distribution<double> exp_dist;
    std::vector<double> jump_times;

    obs.on_point(0.0, x);

    double next_clock = kInf;
    if (interlace_ && tail_intensity_ > 0.0) {
        next_clock = exp_dist(rng, std::exponential_distribution<double>::param_type(tail_intensity_));
    }

    auto advance_continuous = [&](double a, double b) {
        // jump-adapted sub-events: small compound-Poisson arrivals inside [a, b]
        double len = b - a;
        if (len <= 0.0) return true;
        jump_times.clear();
        if (small_sampler_) {
            int n = poisson(rng, std::poisson_distribution<int>::param_type(small_intensity_ * len));
            for (int i = 0; i < n; ++i) jump_times.push_back(a + len * unif(rng));
            std::sort(jump_times.begin(), jump_times.end());
        }
        double seg_start = a;
        for (std::size_t j = 0; j <= jump_times.size(); ++j) {
            double seg_end = (j < jump_times.size()) ? jump_times[j] : b;
            double delta = seg_end - seg_start;
            if (delta > 0.0) {
                scenario_->sigma.eval_into(x, s);
                dl = drift_eff_ * delta;
                if (has_gauss_) {
                    for (int i = 0; i < k; ++i) z(i) = normal(rng);
                    dl.noalias() += std::sqrt(delta) * (q_sqrt_ * z);
                }
                x_new = x + s * dl;
                obs.on_segment(seg_start, x, seg_end, x_new);
                x = x_new;
                if (x.cwiseAbs().maxCoeff() > config_.explosion_threshold) {
                    status.exploded = true;
                    return false;
                }
                if (!obs.keep_going()) return false;
            }
            if (j < jump_times.size()) {
                small_sampler_->sample_into(rng, jump);
                before = x;
                scenario_->sigma.eval_into(before, s);
                x = before + s * jump;
                obs.on_jump(jump_times[j], before, x, jump, false);
                if (x.cwiseAbs().maxCoeff() > config_.explosion_threshold) {
                    status.exploded = true;
                    return false;
                }
                if (!obs.keep_going()) return false;
            }
            seg_start = seg_end;
        }
        return true;
    };

    double next_grid = config_.dt;
    while (t < config_.horizon && obs.keep_going()) {
        double t_target = std::min(std::min(next_grid, config_.horizon), next_clock);
        if (!advance_continuous(t, t_target)) {
            status.t_end = t_target;
            return;
        }
        t = t_target;
        if (t == next_clock) {
            tail_sampler_->sample_into(rng, jump);
            before = x;
            scenario_->sigma.eval_into(before, s);
            x = before + s * jump;
            obs.on_jump(t, before, x, jump, true);
            if (x.cwiseAbs().maxCoeff() > config_.explosion_threshold) {
                status.exploded = true;
                status.t_end = t;
                return;
            }
            next_clock =
                t + exp_dist(rng, std::exponential_distribution<double>::param_type(tail_intensity_));
            if (!obs.keep_going()) break;
        }
        if (t >= next_grid - 1e-15 * config_.horizon && t <= config_.horizon) {
            obs.on_point(t, x);
            next_grid += config_.dt;
        } else if (t >= config_.horizon) {
            obs.on_point(t, x);
        }
    }
    status.t_end = t;
}

namespace {

class RecordingObserver : public StepObserver {
public:
    explicit RecordingObserver(PathSample& out) : out_(&out) {}

    void on_point(double t, const Vec& x) override { push(t, x); }

    void on_jump(double t, const Vec& before, const Vec& after, const Vec& jump,
                 bool interlaced) override {
        out_->jump_log.push_back({t, jump, before, after, interlaced});
        push(t, after);
    }

private:
    void push(double t, const Vec& x) {
        if (!out_->times.empty() && !(t > out_->times.back())) {
            if (t == out_->times.back()) {
                out_->states.back() = x;  // same instant: keep the latest state
                return;
            }
            return;
        }
        out_->times.push_back(t);
        out_->states.push_back(x);
    }

    PathSample* out_;
};

PathSample simulate_impl(const Scenario& scenario, const SimulationConfig& config, const Vec& x0,
                         std::uint64_t path_index, bool interlace) {
    PathSample sample;
    sample.path_index = path_index;
    PathEngine engine(scenario, config, interlace);
    RecordingObserver rec(sample);
    RunStatus status = engine.run(x0, path_index, rec);
    sample.exploded = status.exploded;
    return sample;
}

}  // namespace

PathSample simulate_truncated(const Scenario& scenario, const SimulationConfig& config,
                              const Vec& x0, std::uint64_t path_index) {
    return simulate_impl(scenario, config, x0, path_index, false);
}

PathSample simulate_interlaced(const Scenario& scenario, const SimulationConfig& config,
                               const Vec& x0, std::uint64_t path_index) {
    return simulate_impl(scenario, config, x0, path_index, true);
}

PathSample simulate_truncated(const Scenario& scenario, const SimulationConfig& config, double x0,
                              std::uint64_t path_index) {
    Vec v(1);
    v(0) = x0;
    return simulate_truncated(scenario, config, v, path_index);
}

PathSample simulate_interlaced(const Scenario& scenario, const SimulationConfig& config, double x0,
                               std::uint64_t path_index) {
    Vec v(1);
    v(0) = x0;
    return simulate_interlaced(scenario, config, v, path_index);
}

double exact_ode_path(double x0, double t) {
    if (t < 0.0) throw InputError("exact_ode_path needs t >= 0");
    return x0 / std::sqrt(1.0 + 2.0 * t * x0 * x0);
}

PathSample euler_ode_path(double x0, double horizon, double dt, bool allow_substeps) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw InputError("euler_ode_path needs positive T, dt");
    constexpr double kStabilityPolicy = 0.1;  // refuse dt > 0.1 / x0^2 without substeps
    // substep h <= target / (x^2 |x0|): keeps the accumulated error flat in x0
    const double substep_target = 5e-4 / std::max(std::abs(x0), 1.0);
    if (!allow_substeps && dt * x0 * x0 > kStabilityPolicy) {
        throw InputError("euler_ode_path: dt unstable for this initial state; use dt <= " +
                         std::to_string(kStabilityPolicy / (x0 * x0)) + " or enable sub-stepping");
    }

    PathSample sample;
    double t = 0.0;
    double x = x0;
    Vec xv(1);
    xv(0) = x;
    sample.times.push_back(0.0);
    sample.states.push_back(xv);
    while (t < horizon) {
        double t_next = std::min(t + dt, horizon);
        double remaining = t_next - t;
        while (remaining > 0.0) {
            double h_max = allow_substeps ? substep_target / std::max(x * x, 1e-12) : remaining;
            double h = std::min(remaining, h_max);
            x += -x * x * x * h;
            remaining -= h;
        }
        t = t_next;
        xv(0) = x;
        sample.times.push_back(t);
        sample.states.push_back(xv);
    }
    return sample;
}

}  // namespace feller
