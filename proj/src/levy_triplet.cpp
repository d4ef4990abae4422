#include "feller/levy_triplet.hpp"

#include <cmath>
#include <numbers>

#include "feller/errors.hpp"
#include "feller/random.hpp"

namespace feller {

namespace {

constexpr double kPi = std::numbers::pi;

/// int_0^inf (1 - cos u) u^{-1-alpha} du for alpha in (0, 2).
double stable_cosine_constant(double alpha) {
    return kPi / (2.0 * std::tgamma(1.0 + alpha) * std::sin(kPi * alpha / 2.0));
}

/// Head integral int_0^x (1 - cos(t xi)) t^{-1-alpha} dt; closed form at
/// x = infinity. Band values are head differences, so oscillatory tails are
/// never chased to infinity.
QuadResult stable_cos_head(double alpha, double x, double xi, double abs_tol,
                           EvalBudget& budget) {
    if (!std::isfinite(x)) {
        return {stable_cosine_constant(alpha) * std::pow(std::abs(xi), alpha), 0.0};
    }
    auto f = [alpha, xi](double t) {
        return one_minus_cos(t * xi) * std::pow(t, -1.0 - alpha);
    };
    return integrate_down_to_zero(f, x, abs_tol, budget);
}

std::complex<double> atom_term(const Vec& y, double mass, const Vec& xi) {
    double phase = y.dot(xi);
    double im = (y.norm() < 1.0) ? u_minus_sin(phase) : -std::sin(phase);
    return {mass * one_minus_cos(phase), mass * im};
}

struct JumpIntegral {
    std::complex<double> value{0.0, 0.0};
    double quad_error = 0.0;  // deterministic quadrature error only
    double mc_error = 0.0;    // Monte Carlo standard error (multi-dim densities)
};

/// Jump integrand integrated over the band { band_lo < |y| <= band_hi },
/// intersected with the measure's own truncation radius.
JumpIntegral jump_integral(const LevyMeasure& nu, const Vec& xi, double band_lo, double band_hi,
                           const QuadratureSpec& quad) {
    JumpIntegral out;
    const double hi_cap = std::min(band_hi, nu.trunc_radius());

    for (const auto& a : nu.atoms()) {
        double m = a.point.norm();
        if (m > band_lo && m <= hi_cap) out.value += atom_term(a.point, a.mass, xi);
    }

    if (nu.dim() == 1) {
        const double xi1 = xi(0);
        EvalBudget budget(quad.max_evals);

        if (nu.stable() && band_lo < hi_cap) {
            const auto& st = *nu.stable();
            QuadResult hi_head = stable_cos_head(st.alpha, hi_cap, xi1, quad.abs_tol, budget);
            QuadResult lo_head = (band_lo > 0.0)
                                     ? stable_cos_head(st.alpha, band_lo, xi1, quad.abs_tol, budget)
                                     : QuadResult{0.0, 0.0};
            out.value += 2.0 * st.scale * (hi_head.value - lo_head.value);
            out.quad_error += 2.0 * st.scale * (hi_head.error + lo_head.error);
            // symmetric part: the imaginary contribution cancels exactly
        }

        if (nu.density() && band_lo < hi_cap) {
            const auto& g = *nu.density();
            Vec y(1);
            // sub-segments split at |y| = 1 where the compensator indicator flips
            struct Seg {
                double a, b;
                bool inside_unit;
            };
            std::vector<Seg> segs;
            double split = std::min(hi_cap, 1.0);
            if (band_lo < split) segs.push_back({band_lo, split, true});
            if (std::max(band_lo, 1.0) < hi_cap) segs.push_back({std::max(band_lo, 1.0), hi_cap, false});

            for (int sign : {+1, -1}) {
                for (const auto& seg : segs) {
                    auto re_f = [&g, &y, sign, xi1](double t) mutable {
                        y(0) = sign * t;
                        return g.eval(y) * one_minus_cos(t * xi1);
                    };
                    auto im_f = [&g, &y, sign, xi1, inside = seg.inside_unit](double t) mutable {
                        y(0) = sign * t;
                        double v = inside ? u_minus_sin(t * xi1) : -std::sin(t * xi1);
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
                        if (part == 0) {
                            out.value += std::complex<double>(q.value, 0.0);
                        } else {
                            out.value += std::complex<double>(0.0, q.value);
                        }
                        out.quad_error += q.error;
                    }
                }
            }
        }
    } else if (nu.density()) {
        const auto& g = *nu.density();
        auto rng = make_stream(quad.mc_seed, 3);
        std::size_t n = std::max<std::size_t>(quad.mc_samples, 16);
        std::complex<double> acc{0.0, 0.0};
        double acc_re2 = 0.0, acc_im2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec y = g.sampler(rng);
            double m = y.norm();
            std::complex<double> term{0.0, 0.0};
            if (m > band_lo && m <= hi_cap) term = atom_term(y, 1.0, xi);
            acc += term;
            acc_re2 += term.real() * term.real();
            acc_im2 += term.imag() * term.imag();
        }
        double inv_n = 1.0 / static_cast<double>(n);
        std::complex<double> mean = acc * inv_n;
        out.value += g.total_mass * mean;
        double var_re = std::max(acc_re2 * inv_n - mean.real() * mean.real(), 0.0);
        double var_im = std::max(acc_im2 * inv_n - mean.imag() * mean.imag(), 0.0);
        out.mc_error = g.total_mass * std::sqrt((var_re + var_im) * inv_n);
    }
    return out;
}

}  // namespace

void LevyTriplet::validate() const {
    int d = dim();
    if (Q.rows() != d || Q.cols() != d) throw InputError("Q dimension mismatch");
    if (nu.dim() != d) throw InputError("jump measure dimension mismatch");
    double qnorm = Q.norm();
    if ((Q - Q.transpose()).norm() > 1e-12 * std::max(qnorm, 1.0))
        throw InputError("Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(Q);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(qnorm, 1.0))
        throw InputError("Q must be positive semidefinite");
    nu.validate();
}

std::complex<double> eval_exponent(const LevyTriplet& triplet, const Vec& xi,
                                   const QuadratureSpec& quad) {
    if (xi.size() != triplet.dim()) throw InputError("exponent argument dimension mismatch");
    if (xi.isZero(0.0)) return {0.0, 0.0};

    std::complex<double> psi(0.5 * xi.dot(triplet.Q * xi), -triplet.b.dot(xi));
    JumpIntegral jump = jump_integral(triplet.nu, xi, 0.0, kInf, quad);
    require_tolerance({0.0, jump.quad_error}, quad.abs_tol, "characteristic exponent integral");
    psi += jump.value;

    // clamp tiny negative real parts caused by roundoff
    double floor = 1e-12 * (1.0 + std::abs(psi)) + jump.quad_error + jump.mc_error;
    if (psi.real() < 0.0 && psi.real() > -floor) psi = {0.0, psi.imag()};
    return psi;
}

std::complex<double> eval_exponent(const LevyTriplet& triplet, double xi,
                                   const QuadratureSpec& quad) {
    Vec v(1);
    v(0) = xi;
    return eval_exponent(triplet, v, quad);
}

LevyTriplet truncate(const LevyTriplet& triplet, double r) {
    if (!(r > 0.0)) throw InputError("truncation radius must be positive");
    return LevyTriplet{triplet.b, triplet.Q, triplet.nu.truncated(r)};
}

std::complex<double> tail_exponent(const LevyTriplet& triplet, double r, const Vec& xi,
                                   const QuadratureSpec& quad) {
    if (!(r > 0.0)) throw InputError("tail radius must be positive");
    if (xi.isZero(0.0)) return {0.0, 0.0};
    JumpIntegral jump = jump_integral(triplet.nu, xi, r, kInf, quad);
    require_tolerance({0.0, jump.quad_error}, quad.abs_tol, "tail exponent integral");
    return jump.value;
}

}  // namespace feller
