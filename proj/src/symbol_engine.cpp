#include "feller/symbol_engine.hpp"

#include <cmath>
#include <numbers>

#include "feller/errors.hpp"
#include "feller/random.hpp"

namespace feller {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNearZeroShellCut = 1e-6;  // below this, Taylor remainder bound

double stable_cosine_constant(double alpha) {
    return kPi / (2.0 * std::tgamma(1.0 + alpha) * std::sin(kPi * alpha / 2.0));
}

/// Continuous radial parts of a 1-d measure evaluated at y = sign * t.
struct RadialDensity {
    const LevyMeasure* nu;

    bool empty() const { return !nu->stable() && !nu->density(); }

    double operator()(double t, int sign) const {
        if (t <= 0.0 || t > nu->trunc_radius()) return 0.0;
        double v = 0.0;
        if (nu->stable()) {
            const auto& st = *nu->stable();
            v += st.scale * std::pow(t, -1.0 - st.alpha);
        }
        if (nu->density()) {
            Vec y(1);
            y(0) = sign * t;
            v += nu->density()->eval(y);
        }
        return v;
    }
};

std::complex<double> cutoff_jump_term(const Vec& z, double mass, const Vec& xi,
                                      double cutoff_norm) {
    double phase = z.dot(xi);
    double im = (cutoff_norm < 1.0) ? u_minus_sin(phase) : -std::sin(phase);
    return {mass * one_minus_cos(phase), mass * im};
}

}  // namespace

std::complex<double> state_symbol(const CoefficientField& sigma, const LevyTriplet& driver,
                                  const Vec& x, const Vec& xi, const QuadratureSpec& quad) {
    if (x.size() != sigma.d() || xi.size() != sigma.d())
        throw InputError("state_symbol dimension mismatch");
    if (xi.isZero(0.0)) return {0.0, 0.0};
    Mat s = sigma.eval(x);
    Vec eta = s.transpose() * xi;
    return eval_exponent(driver, eta, quad);
}

std::complex<double> state_symbol(const CoefficientField& sigma, const LevyTriplet& driver,
                                  double x, double xi, const QuadratureSpec& quad) {
    Vec xv(1), xiv(1);
    xv(0) = x;
    xiv(0) = xi;
    return state_symbol(sigma, driver, xv, xiv, quad);
}

StateTriplet pushforward_triplet(const CoefficientField& sigma, const LevyTriplet& driver,
                                 const Vec& x, const QuadratureSpec& quad) {
    if (driver.dim() != sigma.k()) throw InputError("driver / sigma dimension mismatch");
    Mat s = sigma.eval(x);
    StateTriplet st;
    st.sigma_x = s;
    st.Q = s * driver.Q * s.transpose();
    st.b = s * driver.b;
    st.nu_driver = &driver.nu;

    const LevyMeasure& nu = driver.nu;
    // cutoff-change correction: int sigma y (1_{(0,1)}(|sigma y|) - 1_{(0,1)}(|y|)) nu(dy);
    // the integrand vanishes except where exactly one indicator is active.
    if (sigma.k() == 1) {
        double sn = s.col(0).norm();
        double moment = 0.0;
        if (sn > 1.0) {
            moment = -signed_moment(nu, 1.0 / sn, 1.0, true, false, quad);
        } else if (sn > 0.0 && sn < 1.0) {
            moment = signed_moment(nu, 1.0, 1.0 / sn, true, false, quad);
        }
        st.b += s.col(0) * moment;
    } else {
        Vec corr = Vec::Zero(sigma.d());
        for (const auto& a : nu.atoms()) {
            Vec z = s * a.point;
            double di = (z.norm() < 1.0 ? 1.0 : 0.0) - (a.point.norm() < 1.0 ? 1.0 : 0.0);
            if (di != 0.0) corr += a.mass * di * z;
        }
        if (nu.density()) {
            const auto& g = *nu.density();
            auto rng = make_stream(quad.mc_seed, 4);
            std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
            Vec acc = Vec::Zero(sigma.d());
            for (std::size_t i = 0; i < n; ++i) {
                Vec y = g.sampler(rng);
                if (y.norm() > nu.trunc_radius()) continue;
                Vec z = s * y;
                double di = (z.norm() < 1.0 ? 1.0 : 0.0) - (y.norm() < 1.0 ? 1.0 : 0.0);
                if (di != 0.0) acc += di * z;
            }
            corr += g.total_mass * acc / static_cast<double>(n);
        }
        st.b += corr;
    }
    return st;
}

MassResult state_measure_mass(const StateTriplet& st, const SetDescriptor& set_in_state_space,
                              const QuadratureSpec& quad) {
    const LevyMeasure& nu = *st.nu_driver;
    const Mat& s = st.sigma_x;
    return std::visit(
        [&](const auto& d) -> MassResult {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, IntervalSet>) {
                Vec v(1);
                v(0) = -0.5 * (d.lo + d.hi);
                return set_mass(nu, AffinePreimageSet{s, v, 0.5 * (d.hi - d.lo)}, quad);
            } else if constexpr (std::is_same_v<T, BallSet>) {
                return set_mass(nu, AffinePreimageSet{s, -d.center, d.radius}, quad);
            } else if constexpr (std::is_same_v<T, BallComplementSet>) {
                if (nu.dim() == 1) {
                    double sn = s.col(0).norm();
                    MassResult out;
                    if (sn > 0.0) out.value = tail_mass(nu, d.radius / sn, quad);
                    return out;
                }
                MassResult out;
                for (const auto& a : nu.atoms()) {
                    if ((s * a.point).norm() > d.radius) out.value += a.mass;
                }
                if (nu.density()) {
                    const auto& g = *nu.density();
                    auto rng = make_stream(quad.mc_seed, 5);
                    std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
                    std::size_t hits = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        Vec y = g.sampler(rng);
                        if (y.norm() <= nu.trunc_radius() && (s * y).norm() > d.radius) ++hits;
                    }
                    double p = double(hits) / double(n);
                    out.value += g.total_mass * p;
                    out.std_error += g.total_mass * std::sqrt(std::max(p * (1 - p), 0.0) / n);
                }
                return out;
            } else {
                return set_mass(nu, AffinePreimageSet{d.M * s, d.v, d.radius}, quad);
            }
        },
        set_in_state_space);
}

std::complex<double> exponent_of_state_triplet(const StateTriplet& st, const Vec& xi,
                                               const QuadratureSpec& quad) {
    if (xi.isZero(0.0)) return {0.0, 0.0};
    std::complex<double> psi(0.5 * xi.dot(st.Q * xi), -st.b.dot(xi));

    const LevyMeasure& nu = *st.nu_driver;
    const Mat& s = st.sigma_x;

    for (const auto& a : nu.atoms()) {
        Vec z = s * a.point;
        psi += cutoff_jump_term(z, a.mass, xi, z.norm());
    }

    if (nu.dim() == 1 && (nu.stable() || nu.density())) {
        double sn = s.col(0).norm();
        double eta = s.col(0).dot(xi);  // z.xi = eta * y for z = s y
        if (sn > 0.0) {
            EvalBudget budget(quad.max_evals);
            QuadResult total_err;
            if (nu.stable()) {
                const auto& stc = *nu.stable();
                if (std::isfinite(nu.trunc_radius())) {
                    auto f = [&](double t) {
                        return one_minus_cos(t * eta) * stc.scale * std::pow(t, -1.0 - stc.alpha);
                    };
                    QuadResult q =
                        integrate_down_to_zero(f, nu.trunc_radius(), quad.abs_tol, budget);
                    psi += 2.0 * q.value;
                    total_err.error += 2.0 * q.error;
                } else {
                    psi += 2.0 * stc.scale * stable_cosine_constant(stc.alpha) *
                           std::pow(std::abs(eta), stc.alpha);
                }
            }
            if (nu.density()) {
                const double cut = 1.0 / sn;  // |sigma y| < 1 iff t < cut
                const auto& g = *nu.density();
                Vec y(1);
                double hi_cap = nu.trunc_radius();
                struct Seg {
                    double a, b;
                    bool inside;
                };
                std::vector<Seg> segs;
                double split = std::min(hi_cap, cut);
                if (split > 0.0) segs.push_back({0.0, split, true});
                if (cut < hi_cap) segs.push_back({cut, hi_cap, false});
                for (int sign : {+1, -1}) {
                    for (const auto& seg : segs) {
                        auto re_f = [&g, &y, sign, eta](double t) mutable {
                            y(0) = sign * t;
                            return g.eval(y) * one_minus_cos(t * eta);
                        };
                        auto im_f = [&g, &y, sign, eta, inside = seg.inside](double t) mutable {
                            y(0) = sign * t;
                            double v = inside ? u_minus_sin(t * eta) : -std::sin(t * eta);
                            return sign * g.eval(y) * v;
                        };
                        for (int part = 0; part < 2; ++part) {
                            Integrand f = (part == 0) ? Integrand(re_f) : Integrand(im_f);
                            QuadResult q;
                            if (seg.a <= 0.0) {
                                q = integrate_down_to_zero(f, seg.b, quad.abs_tol, budget);
                            } else if (std::isfinite(seg.b)) {
                                q = integrate_adaptive(f, seg.a, seg.b, quad.abs_tol, budget);
                            } else {
                                q = integrate_up_to_infinity(f, seg.a, quad.abs_tol, budget);
                            }
                            psi += (part == 0) ? std::complex<double>(q.value, 0.0)
                                               : std::complex<double>(0.0, q.value);
                            total_err.error += q.error;
                        }
                    }
                }
            }
            require_tolerance(total_err, quad.abs_tol, "state-triplet exponent integral");
        }
    } else if (nu.density()) {
        const auto& g = *nu.density();
        auto rng = make_stream(quad.mc_seed, 3);  // same stream as eval_exponent's estimator
        std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            Vec y = g.sampler(rng);
            if (y.norm() > nu.trunc_radius()) continue;
            Vec z = s * y;
            acc += cutoff_jump_term(z, 1.0, xi, z.norm());
        }
        psi += g.total_mass * acc / static_cast<double>(n);
    }
    return psi;
}

// --- generator action ----------------------------------------------------------

namespace {

struct JumpAccum {
    double value = 0.0;
    double error = 0.0;
    // Differencing f(x + s y) - f(x) near y = 0 carries roundoff ~ eps * |f|
    // that the singular jump density amplifies; no quadrature can certify a
    // tighter absolute tolerance than this floor.
    double eff_tol = 0.0;
};

/// Numeric jump integral for 1-d drivers (k == 1, any d):
///   int phi(sign t) dnu over t in (0, hi_band]
/// with phi(y) = f(x + s y) - f(x) - grad_term * y * [t < comp_cut].
/// Below the near-zero shell cut the integrand is replaced by its second-order
/// Taylor term 1/2 (s.H s) y^2; the curvature variation over the cut ball goes
/// into the error estimate.
JumpAccum one_dim_jump_integral(const LevyMeasure& nu, const Vec& x, const Vec& s_col,
                                const TestFunction& f, double fx, double grad_term,
                                double comp_cut, double band_hi, const QuadratureSpec& quad) {
    JumpAccum out;
    out.eff_tol = quad.abs_tol;
    RadialDensity dens{&nu};

    // atoms
    for (const auto& a : nu.atoms()) {
        double t = std::abs(a.point(0));
        if (t <= 0.0 || t > band_hi) continue;
        double y = a.point(0);
        double comp = (t < comp_cut) ? grad_term * y : 0.0;
        out.value += a.mass * (f(x + s_col * y) - fx - comp);
    }

    if (dens.empty()) return out;

    double hi_cap = std::min(band_hi, nu.trunc_radius());
    if (!(hi_cap > 0.0)) return out;

    EvalBudget budget(quad.max_evals);
    double s_norm = s_col.norm();

    // exact constant tail beyond the support of f (no compensator out there)
    double numeric_hi = hi_cap;
    if (std::isfinite(f.support_radius()) && s_norm > 0.0) {
        double r_exact = (f.support_radius() + x.norm()) * 1.0000001 / s_norm;
        r_exact = std::max(r_exact, comp_cut);
        if (r_exact < numeric_hi) {
            LevyMeasure capped = nu;  // same components; tail_mass respects trunc radius
            double tm = tail_mass(capped, r_exact, quad) -
                        (std::isfinite(band_hi) && band_hi < nu.trunc_radius()
                             ? tail_mass(capped, band_hi, quad)
                             : 0.0);
            // atoms were handled exactly above; subtract their share of the band
            double atom_tail = 0.0;
            for (const auto& a : nu.atoms()) {
                double t = std::abs(a.point(0));
                if (t > r_exact && t <= hi_cap) atom_tail += a.mass;
            }
            out.value += -fx * (tm - atom_tail);
            numeric_hi = r_exact;
        }
    }

    double lo = kNearZeroShellCut;
    double f_scale = std::max(std::abs(fx), std::min(f.sup_norm(), 1e12));
    double band_mass = tail_mass(nu, lo, quad);
    out.eff_tol = std::max(quad.abs_tol, 8.0 * 2.2e-16 * f_scale * band_mass);

    QuadResult q;
    for (int sign : {+1, -1}) {
        auto integrand = [&](double t) {
            double w = dens(t, sign);
            if (w == 0.0) return 0.0;
            double y = sign * t;
            double comp = (t < comp_cut) ? grad_term * y : 0.0;
            return w * (f(x + s_col * y) - fx - comp);
        };
        // split at the compensator cutoff; it is a kink of the integrand
        double mid = std::min(comp_cut, numeric_hi);
        if (lo < mid) q += integrate_adaptive(integrand, lo, mid, out.eff_tol, budget);
        if (mid < numeric_hi) {
            if (std::isfinite(numeric_hi)) {
                q += integrate_adaptive(integrand, mid, numeric_hi, out.eff_tol, budget);
            } else {
                q += integrate_up_to_infinity(integrand, mid, out.eff_tol, budget);
            }
        }
    }
    out.value += q.value;
    out.error += q.error;

    // second-order Taylor term over the dropped shell (0, min(cut, band)]
    double cut = std::min(lo, hi_cap);
    if (cut > 0.0 && s_norm > 0.0 && comp_cut >= cut) {
        double m2 = second_moment_below(nu, cut, quad);
        if (m2 > 0.0) {
            Mat hess = f.hessian(x);
            double h_here = s_col.dot(hess * s_col);
            out.value += 0.5 * h_here * m2;
            // slack: curvature variation across the cut ball
            double dev = 0.0;
            for (int sign : {+1, -1}) {
                Mat h_off = f.hessian(x + s_col * (sign * cut));
                dev = std::max(dev, std::abs(s_col.dot(h_off * s_col) - h_here));
            }
            out.error += 0.5 * dev * m2;
        }
    }
    return out;
}

}  // namespace

double generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                       const TestFunction& f, const Vec& x, const QuadratureSpec& quad) {
    if (f.dim() != sigma.d()) throw InputError("test function dimension mismatch");
    Mat s = sigma.eval(x);
    double fx = f(x);
    Vec grad = f.gradient(x);
    Mat hess = f.hessian(x);

    double result = grad.dot(s * driver.b);
    result += 0.5 * (s * driver.Q * s.transpose() * hess).trace();

    const LevyMeasure& nu = driver.nu;
    if (nu.is_zero()) return result;

    if (nu.dim() == 1) {
        Vec s_col = s.col(0);
        if (s_col.norm() == 0.0) return result;
        double grad_term = grad.dot(s_col);
        JumpAccum jump =
            one_dim_jump_integral(nu, x, s_col, f, fx, grad_term, 1.0, kInf, quad);
        require_tolerance({0.0, jump.error}, jump.eff_tol, "generator jump integral");
        result += jump.value;
    } else {
        for (const auto& a : nu.atoms()) {
            Vec z = s * a.point;
            double comp = (a.point.norm() < 1.0) ? grad.dot(z) : 0.0;
            result += a.mass * (f(x + z) - fx - comp);
        }
        if (nu.density()) {
            const auto& g = *nu.density();
            auto rng = make_stream(quad.mc_seed, 6);
            std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Vec y = g.sampler(rng);
                if (y.norm() > nu.trunc_radius()) continue;
                Vec z = s * y;
                double comp = (y.norm() < 1.0) ? grad.dot(z) : 0.0;
                acc += f(x + z) - fx - comp;
            }
            result += g.total_mass * acc / static_cast<double>(n);
        }
    }
    return result;
}

double generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                       const TestFunction& f, double x, const QuadratureSpec& quad) {
    Vec xv(1);
    xv(0) = x;
    return generator_apply(sigma, driver, f, xv, quad);
}

double truncated_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                                 double r, const TestFunction& f, double x,
                                 const QuadratureSpec& quad) {
    if (sigma.d() != 1 || sigma.k() != 1)
        throw InputError("truncated generator is defined for d = k = 1");
    if (!(r > 0.0 && r < 1.0)) throw InputError("truncated generator needs r in (0, 1)");

    double s = sigma.scalar(x);
    double fx = f(x);
    double fp = f.gradient1(x);
    double fpp = f.hessian1(x);

    // compensator correction for the removed band r < |y| < 1
    double m = signed_moment(driver.nu, r, 1.0, false, false, quad);
    double result = (driver.b(0) - m) * s * fp + 0.5 * s * s * driver.Q(0, 0) * fpp;

    Vec xv(1), s_col(1);
    xv(0) = x;
    s_col(0) = s;
    if (s != 0.0) {
        JumpAccum jump = one_dim_jump_integral(driver.nu, xv, s_col, f, fx, fp * s,
                                               kInf /* fully compensated band */, r, quad);
        require_tolerance({0.0, jump.error}, jump.eff_tol, "small-jump generator integral");
        result += jump.value;
    }
    return result;
}

double tail_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver, double r,
                            const std::function<double(const Vec&)>& u, double u_sup_norm,
                            const Vec& x, const QuadratureSpec& quad) {
    if (!(r > 0.0)) throw InputError("tail generator needs r > 0");
    Mat s = sigma.eval(x);
    double ux = u(x);
    const LevyMeasure& nu = driver.nu;
    double result = 0.0;

    if (nu.dim() == 1) {
        Vec s_col = s.col(0);
        for (const auto& a : nu.atoms()) {
            if (std::abs(a.point(0)) > r) result += a.mass * (u(x + s_col * a.point(0)) - ux);
        }
        RadialDensity dens{&nu};
        if (!dens.empty() && r < nu.trunc_radius()) {
            (void)u_sup_norm;
            EvalBudget budget(quad.max_evals);
            QuadResult q;
            for (int sign : {+1, -1}) {
                auto integrand = [&](double t) {
                    double w = dens(t, sign);
                    if (w == 0.0) return 0.0;
                    return w * (u(x + s_col * (sign * t)) - ux);
                };
                if (std::isfinite(nu.trunc_radius())) {
                    q += integrate_adaptive(integrand, r, nu.trunc_radius(), quad.abs_tol, budget);
                } else {
                    double mid = std::max(2.0 * r, 2.0);
                    q += integrate_adaptive(integrand, r, mid, quad.abs_tol, budget);
                    q += integrate_up_to_infinity(integrand, mid, quad.abs_tol, budget);
                }
            }
            require_tolerance(q, quad.abs_tol, "tail generator integral");
            result += q.value;
        }
    } else {
        for (const auto& a : nu.atoms()) {
            if (a.point.norm() > r) result += a.mass * (u(x + s * a.point) - ux);
        }
        if (nu.density()) {
            const auto& g = *nu.density();
            auto rng = make_stream(quad.mc_seed, 7);
            std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Vec y = g.sampler(rng);
                double m = y.norm();
                if (m > r && m <= nu.trunc_radius()) acc += u(x + s * y) - ux;
            }
            result += g.total_mass * acc / static_cast<double>(n);
        }
    }
    return result;
}

double tail_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver, double r,
                            const TestFunction& u, double x, const QuadratureSpec& quad) {
    Vec xv(1);
    xv(0) = x;
    return tail_generator_apply(
        sigma, driver, r, [&u](const Vec& y) { return u(y); }, u.sup_norm(), xv, quad);
}

// --- growth probe ----------------------------------------------------------------

GrowthProbeResult growth_probe(const CoefficientField& sigma, const LevyTriplet& driver,
                               const std::vector<double>& radii, const QuadratureSpec& quad) {
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) throw InputError("growth probe radii must increase");
    }
    GrowthProbeResult out;
    const int n_mag = 32;

    std::vector<Vec> directions;
    if (sigma.d() == 1) {
        Vec e(1);
        e(0) = 1.0;
        directions.push_back(e);
        directions.push_back(-e);
    } else {
        for (int axis = 0; axis < sigma.d(); ++axis) {
            Vec e = Vec::Zero(sigma.d());
            e(axis) = 1.0;
            directions.push_back(e);
            directions.push_back(-e);
        }
        auto rng = make_stream(quad.mc_seed, 8);
        std::normal_distribution<double> z(0.0, 1.0);
        for (int i = 0; i < 16; ++i) {
            Vec v(sigma.d());
            for (int j = 0; j < sigma.d(); ++j) v(j) = z(rng);
            if (v.norm() > 0.0) directions.push_back(v / v.norm());
        }
    }

    for (double r : radii) {
        if (!(r > 0.0)) throw InputError("growth probe radii must be positive");
        double sup = 0.0;
        for (const auto& dx : directions) {
            for (int i = 0; i < n_mag; ++i) {
                double xm = r * std::pow(1e-3, 1.0 - i / double(n_mag - 1));
                Vec x = xm * dx;
                for (const auto& dxi : directions) {
                    for (int j = 0; j < n_mag; ++j) {
                        double xim = (1.0 / r) * std::pow(1e-3, 1.0 - j / double(n_mag - 1));
                        Vec xi = xim * dxi;
                        sup = std::max(sup, std::abs(state_symbol(sigma, driver, x, xi, quad)));
                    }
                }
            }
        }
        out.rows.push_back({r, sup});
    }

    double max_sup = 0.0;
    for (const auto& row : out.rows) max_sup = std::max(max_sup, row.sup_abs_q);
    double first = out.rows.empty() ? 0.0 : out.rows.front().sup_abs_q;
    double last = out.rows.empty() ? 0.0 : out.rows.back().sup_abs_q;
    bool non_increasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (out.rows[i].sup_abs_q > 1.1 * out.rows[i - 1].sup_abs_q + 1e-15) non_increasing = false;
    }
    if (last <= std::max(0.1 * first, 1e-12) && non_increasing) {
        out.trend = GrowthTrend::vanishing;
    } else if (max_sup > 0.0 && last >= 0.5 * max_sup) {
        out.trend = GrowthTrend::not_vanishing;
    } else {
        out.trend = GrowthTrend::inconclusive;
    }
    return out;
}

}  // namespace feller
