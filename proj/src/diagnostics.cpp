#include "feller/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "feller/errors.hpp"
#include "feller/parallel.hpp"

namespace feller {

std::string probe_verdict_name(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::consistent_with_feller: return "consistent_with_feller";
        case ProbeVerdict::violates_feller: return "violates_feller";
        case ProbeVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};

/// Index-ordered reduction: results do not depend on the thread partition.
MeanStderr reduce(const std::vector<double>& values, const std::vector<char>& valid) {
    MeanStderr out;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!valid[i]) continue;
        sum += values[i];
        sum_sq += values[i] * values[i];
        ++out.n;
    }
    if (out.n > 0) {
        out.mean = sum / out.n;
        double var = std::max(sum_sq / out.n - out.mean * out.mean, 0.0);
        out.se = std::sqrt(var / out.n);
    }
    return out;
}

class FinalStateObserver : public StepObserver {
public:
    void on_point(double t, const Vec& x) override {
        t_last = t;
        x_last = x;
    }
    double t_last = 0.0;
    Vec x_last;
};

}  // namespace

TransitionEstimate estimate_transition(const Scenario& scenario, const SimulationConfig& config,
                                       const std::function<double(const Vec&)>& f, const Vec& x,
                                       double t) {
    TransitionEstimate out;
    out.n_paths = config.n_paths;
    if (t <= 0.0) {
        out.mean = f(x);
        out.std_error = 0.0;
        return out;
    }
    SimulationConfig cfg = config;
    cfg.horizon = t;
    cfg.dt = std::min(cfg.dt, t);
    PathEngine engine(scenario, cfg, true);

    std::vector<double> values(cfg.n_paths, 0.0);
    std::vector<char> valid(cfg.n_paths, 0);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        FinalStateObserver obs;
        RunStatus status = engine.run(x, i, obs);
        if (!status.exploded) {
            values[i] = f(obs.x_last);
            valid[i] = 1;
        }
    });
    MeanStderr ms = reduce(values, valid);
    out.mean = ms.mean;
    out.std_error = ms.se;
    out.n_exploded = cfg.n_paths - ms.n;
    out.inconclusive = out.n_exploded > cfg.n_paths * 0.01;
    return out;
}

TransitionEstimate estimate_transition(const Scenario& scenario, const SimulationConfig& config,
                                       const std::function<double(double)>& f, double x,
                                       double t) {
    Vec xv(1);
    xv(0) = x;
    return estimate_transition(
        scenario, config, [&f](const Vec& v) { return f(v(0)); }, xv, t);
}

// --- vanishing-at-infinity probe ----------------------------------------------

CinfReport cinf_decay_probe(const Scenario& scenario, const SimulationConfig& config, double R,
                            double t, const std::vector<double>& x_grid,
                            const DiagnosticsPolicy& policy) {
    if (x_grid.empty()) throw InputError("cinf probe needs a non-empty x grid");
    CinfReport report;
    report.R = R;
    report.t = t;

    TestFunction smooth = TestFunction::smoothed_indicator(scenario.d(), R, policy.shoulder_frac);

    SimulationConfig cfg = config;
    cfg.horizon = t;
    cfg.dt = std::min(cfg.dt, t);
    PathEngine engine(scenario, cfg, true);

    for (double x : x_grid) {
        Vec x0 = Vec::Zero(scenario.d());
        x0(0) = x;
        std::vector<double> raw(cfg.n_paths, 0.0), smooth_vals(cfg.n_paths, 0.0);
        std::vector<char> valid(cfg.n_paths, 0);
        parallel_for(cfg.n_paths, [&](std::size_t i) {
            FinalStateObserver obs;
            RunStatus status = engine.run(x0, i, obs);
            if (!status.exploded) {
                raw[i] = (obs.x_last.norm() <= R) ? 1.0 : 0.0;
                smooth_vals[i] = smooth(obs.x_last);
                valid[i] = 1;
            }
        });
        MeanStderr raw_ms = reduce(raw, valid);
        MeanStderr smooth_ms = reduce(smooth_vals, valid);
        report.rows.push_back({x, raw_ms.mean, raw_ms.se, smooth_ms.mean, smooth_ms.se,
                               cfg.n_paths - raw_ms.n});
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const CinfRow& a, const CinfRow& b) { return std::abs(a.x) < std::abs(b.x); });

    const auto& last = report.rows.back();
    report.limit_estimate = last.smooth_estimate;

    double noise_floor = policy.noise_floor_mult *
                         std::max(last.smooth_se, 1.0 / std::max(config.n_paths, 1));
    bool decayed_into_noise = last.smooth_estimate <= noise_floor;
    bool monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        double prev = report.rows[i - 1].smooth_estimate;
        double cur = report.rows[i].smooth_estimate;
        double slack = 2.0 * (report.rows[i].smooth_se + report.rows[i - 1].smooth_se);
        if (cur > prev + slack + 1e-12) monotone = false;
    }

    bool flat_tail = false;
    if (report.rows.size() >= 2) {
        const auto& prev = report.rows[report.rows.size() - 2];
        bool sig_last = last.smooth_estimate > policy.violate_stderr_mult * last.smooth_se &&
                        last.smooth_estimate > 0.0;
        bool sig_prev = prev.smooth_estimate > policy.violate_stderr_mult * prev.smooth_se &&
                        prev.smooth_estimate > 0.0;
        bool no_decay = last.smooth_estimate >= policy.no_decay_ratio * prev.smooth_estimate;
        flat_tail = sig_last && sig_prev && no_decay;
    }

    long total_explosions = 0;
    for (const auto& row : report.rows) total_explosions += row.n_exploded;
    if (total_explosions >
        policy.explosion_frac * static_cast<double>(config.n_paths) * report.rows.size()) {
        report.verdict = ProbeVerdict::inconclusive;
        report.notes = "too many exploded paths";
    } else if (flat_tail) {
        report.verdict = ProbeVerdict::violates_feller;
        report.notes = "estimates stay bounded away from zero at the largest |x|";
    } else if (decayed_into_noise && monotone) {
        report.verdict = ProbeVerdict::consistent_with_feller;
        report.notes = "estimates decay monotonically into statistical noise";
    } else {
        report.verdict = ProbeVerdict::inconclusive;
        report.notes = "mixed evidence";
    }
    return report;
}

// --- strong continuity -----------------------------------------------------------

ContinuityReport strong_continuity_probe(const Scenario& scenario, const SimulationConfig& config,
                                         const TestFunction& f, const std::vector<double>& x_grid,
                                         const std::vector<double>& t_list) {
    ContinuityReport report;
    for (double t : t_list) {
        double sup_dev = 0.0;
        for (double x : x_grid) {
            Vec xv = Vec::Zero(scenario.d());
            xv(0) = x;
            TransitionEstimate est = estimate_transition(
                scenario, config, [&f](const Vec& v) { return f(v); }, xv, t);
            sup_dev = std::max(sup_dev, std::abs(est.mean - f(xv)));
        }
        report.rows.push_back({t, sup_dev});
    }
    // t_list is decreasing; deviations should shrink along it
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].sup_deviation > report.rows[i - 1].sup_deviation * 1.25 + 1e-9)
            report.trend_decreasing = false;
    }
    return report;
}

// --- exit-time quotient ------------------------------------------------------------

namespace {

class ExitObserver : public StepObserver {
public:
    ExitObserver(const Vec& center, double radius) : center_(center), radius_(radius) {}

    void on_segment(double t0, const Vec& a, double t1, const Vec& b) override {
        if (done_) return;
        if ((b - center_).norm() >= radius_) {
            // bisection along the linear interpolation of the continuous move
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 40; ++i) {
                double mid = 0.5 * (lo + hi);
                Vec xm = a + mid * (b - a);
                if ((xm - center_).norm() >= radius_) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            exit_time = t0 + hi * (t1 - t0);
            exit_state = a + hi * (b - a);
            done_ = true;
        }
    }

    void on_jump(double t, const Vec&, const Vec& after, const Vec&, bool) override {
        if (done_) return;
        if ((after - center_).norm() >= radius_) {
            exit_time = t;
            exit_state = after;
            done_ = true;
        }
    }

    void on_point(double t, const Vec& x) override {
        if (!done_) {
            last_time = t;
            last_state = x;
        }
    }

    bool keep_going() const override { return !done_; }

    bool done_ = false;
    double exit_time = 0.0;
    Vec exit_state;
    double last_time = 0.0;
    Vec last_state;

private:
    Vec center_;
    double radius_;
};

}  // namespace

DynkinEstimate dynkin_quotient(const Scenario& scenario, const SimulationConfig& config,
                               const TestFunction& f, const Vec& x, double r, double t_cap,
                               const DiagnosticsPolicy& policy) {
    if (!(r > 0.0) || !(t_cap > 0.0)) throw InputError("dynkin probe needs r > 0 and t_cap > 0");
    SimulationConfig cfg = config;
    cfg.horizon = t_cap;
    PathEngine engine(scenario, cfg, true);

    int n = cfg.n_paths;
    std::vector<double> num(n, 0.0), den(n, 0.0);
    std::vector<char> capped(n, 0);
    double fx = f(x);
    parallel_for(n, [&](std::size_t i) {
        ExitObserver obs(x, r);
        obs.last_state = x;
        engine.run(x, i, obs);
        if (obs.done_) {
            num[i] = f(obs.exit_state) - fx;
            den[i] = obs.exit_time;
        } else {
            num[i] = f(obs.last_state) - fx;
            den[i] = t_cap;
            capped[i] = 1;
        }
    });

    DynkinEstimate out;
    out.n_paths = n;
    double mean_a = 0.0, mean_b = 0.0;
    int n_capped = 0;
    for (int i = 0; i < n; ++i) {
        mean_a += num[i];
        mean_b += den[i];
        n_capped += capped[i];
    }
    mean_a /= n;
    mean_b /= n;
    double s_aa = 0.0, s_ab = 0.0, s_bb = 0.0;
    for (int i = 0; i < n; ++i) {
        s_aa += (num[i] - mean_a) * (num[i] - mean_a);
        s_ab += (num[i] - mean_a) * (den[i] - mean_b);
        s_bb += (den[i] - mean_b) * (den[i] - mean_b);
    }
    s_aa /= n;
    s_ab /= n;
    s_bb /= n;

    out.mean_exit_time = mean_b;
    out.cap_hit_frac = static_cast<double>(n_capped) / n;
    if (mean_b > 0.0) {
        double q = mean_a / mean_b;
        out.quotient = q;
        // delta-method variance of the ratio estimator
        double var = (s_aa - 2.0 * q * s_ab + q * q * s_bb) / (mean_b * mean_b * n);
        out.std_error = std::sqrt(std::max(var, 0.0));
    }
    out.inconclusive = out.cap_hit_frac > policy.cap_hit_frac;
    return out;
}

DynkinEstimate dynkin_quotient(const Scenario& scenario, const SimulationConfig& config,
                               const TestFunction& f, double x, double r, double t_cap,
                               const DiagnosticsPolicy& policy) {
    Vec xv(1);
    xv(0) = x;
    return dynkin_quotient(scenario, config, f, xv, r, t_cap, policy);
}

// --- martingale residuals ------------------------------------------------------------

namespace {

/// Accumulates int_0^t A f(X_s) ds by trapezoid over the fine segments (jump
/// times are segment boundaries, so the integrand is smooth within each) and
/// snapshots M_t at the requested coarse times.
class MartingaleObserver : public StepObserver {
public:
    MartingaleObserver(const std::function<double(const Vec&)>& af,
                       const std::function<double(const Vec&)>& f,
                       const std::vector<double>& targets)
        : af_(af), f_(f), targets_(targets) {}

    void on_point(double t, const Vec& x) override {
        if (!started_) {
            started_ = true;
            f0_ = f_(x);
            af_left_ = af_(x);
        }
        while (next_target_ < targets_.size() && t >= targets_[next_target_] - 1e-12) {
            snapshots.push_back(f_(x) - f0_ - integral_);
            ++next_target_;
        }
    }

    void on_segment(double t0, const Vec&, double t1, const Vec& b) override {
        double af_right = af_(b);
        integral_ += 0.5 * (af_left_ + af_right) * (t1 - t0);
        af_left_ = af_right;
    }

    void on_jump(double, const Vec&, const Vec& after, const Vec&, bool) override {
        af_left_ = af_(after);
    }

    std::vector<double> snapshots;

private:
    const std::function<double(const Vec&)>& af_;
    const std::function<double(const Vec&)>& f_;
    const std::vector<double>& targets_;
    std::size_t next_target_ = 0;
    bool started_ = false;
    double f0_ = 0.0;
    double af_left_ = 0.0;
    double integral_ = 0.0;
};

}  // namespace

MartingaleReport martingale_residual(const Scenario& scenario, const SimulationConfig& config,
                                     const TestFunction& f, const Vec& x0,
                                     const std::vector<double>& t_grid,
                                     const DiagnosticsPolicy& policy, const QuadratureSpec& quad) {
    if (t_grid.size() < 2) throw InputError("martingale residual needs at least two grid times");
    SimulationConfig cfg = config;
    cfg.horizon = t_grid.back();
    PathEngine engine(scenario, cfg, true);

    std::function<double(const Vec&)> af = [&](const Vec& x) {
        return generator_apply(scenario.sigma, scenario.driver, f, x, quad);
    };
    std::function<double(const Vec&)> fv = [&f](const Vec& x) { return f(x); };

    int n = cfg.n_paths;
    std::size_t n_times = t_grid.size();
    std::vector<std::vector<double>> m_values(n);
    parallel_for(n, [&](std::size_t i) {
        MartingaleObserver obs(af, fv, t_grid);
        engine.run(x0, i, obs);
        obs.snapshots.resize(n_times, obs.snapshots.empty() ? 0.0 : obs.snapshots.back());
        m_values[i] = std::move(obs.snapshots);
    });

    MartingaleReport report;
    for (std::size_t j = 0; j < n_times; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += m_values[i][j];
        report.drift.emplace_back(t_grid[j], mean / n);
    }
    for (std::size_t j = 0; j + 1 < n_times; ++j) {
        double mean = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double inc = m_values[i][j + 1] - m_values[i][j];
            mean += inc;
            sum_sq += inc * inc;
        }
        mean /= n;
        double var = std::max(sum_sq / n - mean * mean, 0.0);
        double se = std::sqrt(var / n);
        double tol = policy.sigma_mult * se +
                     policy.residual_abs_tol * std::max(f.sup_norm(), 1e-12);
        bool pass = std::abs(mean) <= tol;
        report.increments.push_back({t_grid[j], t_grid[j + 1], mean, se, pass});
        report.all_pass = report.all_pass && pass;
    }
    return report;
}

MartingaleReport martingale_residual(const Scenario& scenario, const SimulationConfig& config,
                                     const TestFunction& f, double x0,
                                     const std::vector<double>& t_grid,
                                     const DiagnosticsPolicy& policy, const QuadratureSpec& quad) {
    Vec xv(1);
    xv(0) = x0;
    return martingale_residual(scenario, config, f, xv, t_grid, policy, quad);
}

// --- Lyapunov bound ------------------------------------------------------------------

TestFunction inverse_quadratic_weight() { return TestFunction::inverse_quadratic(); }

LyapunovReport lyapunov_bound_probe(const Scenario& scenario, const SimulationConfig& config,
                                    double fit_lo, double fit_hi,
                                    const std::vector<std::pair<double, double>>& xt_pairs,
                                    const DiagnosticsPolicy& policy, const QuadratureSpec& quad) {
    if (scenario.d() != 1 || scenario.k() != 1)
        throw InputError("lyapunov probe is defined for d = k = 1");
    if (!(0.0 < fit_lo && fit_lo < fit_hi)) throw InputError("lyapunov probe: bad fit range");

    LyapunovReport report;
    TestFunction f = TestFunction::inverse_quadratic();

    const int n_grid = 64;
    std::vector<double> ratios;
    for (int i = 0; i < n_grid; ++i) {
        double mag = fit_lo * std::pow(fit_hi / fit_lo, i / double(n_grid - 1));
        for (int sign : {+1, -1}) {
            double x = sign * mag;
            double bf = truncated_generator_apply(scenario.sigma, scenario.driver, config.trunc_r,
                                                  f, x, quad);
            ratios.push_back(std::abs(bf) / f(x));
        }
    }
    report.fitted_c = *std::max_element(ratios.begin(), ratios.end());

    // premise check: the ratio must stay bounded; compare the top decade
    // against the median
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    double last_decade_min = kInf;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        double mag = fit_lo * std::pow(fit_hi / fit_lo, (i / 2) / double(n_grid - 1));
        if (mag >= fit_hi / 10.0) last_decade_min = std::min(last_decade_min, ratios[i]);
    }
    if (median > 0.0 && last_decade_min > policy.lyapunov_blowup_ratio * median) {
        report.premise_violation = true;
        report.notes = "|Bf|/f grows with |x|: linear-growth premise violated";
        return report;
    }

    for (const auto& [x, t] : xt_pairs) {
        SimulationConfig cfg = config;
        cfg.horizon = t;
        cfg.scheme = SimScheme::euler_interlaced;
        PathEngine engine(scenario, cfg, false);  // truncated dynamics only

        std::vector<double> values(cfg.n_paths, 0.0);
        std::vector<char> valid(cfg.n_paths, 0);
        Vec x0(1);
        x0(0) = x;
        parallel_for(cfg.n_paths, [&](std::size_t i) {
            FinalStateObserver obs;
            RunStatus status = engine.run(x0, i, obs);
            if (!status.exploded) {
                values[i] = f(obs.x_last);
                valid[i] = 1;
            }
        });
        MeanStderr ms = reduce(values, valid);
        LyapunovCheck check;
        check.x = x;
        check.t = t;
        check.estimate = ms.mean;
        check.std_error = ms.se;
        check.bound = f(x0) * std::exp(report.fitted_c * t);
        check.pass = ms.mean <= check.bound + policy.sigma_mult * ms.se;
        report.all_pass = report.all_pass && check.pass;
        report.checks.push_back(check);
    }
    return report;
}

}  // namespace feller
