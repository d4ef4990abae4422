#include "feller/test_function.hpp"

#include <cmath>
#include <memory>

#include "feller/errors.hpp"

namespace feller {

namespace {

/// Radial profile F(rho) with derivatives; lifts to x-space via
///   grad f = F'(rho) n,   hess f = F''(rho) n n^T + F'(rho)/rho (I - n n^T).
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    double d2_at_zero;  // limit of F'(rho)/rho and F''(rho) as rho -> 0
};

double estimate_sup(const std::function<double(double)>& g, double hi) {
    double worst = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        worst = std::max(worst, std::abs(g(hi * i / 2048.0)));
    }
    return worst;
}

// quintic smoothstep and derivatives (C^2 at both ends)
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_d1(double t) { return 30.0 * t * t * (1.0 + t * (-2.0 + t)); }
double smoothstep_d2(double t) { return 60.0 * t * (1.0 + t * (-3.0 + 2.0 * t)); }

}  // namespace

double TestFunction::operator()(double x) const {
    Vec v(1);
    v(0) = x;
    return f_(v);
}

double TestFunction::gradient1(double x) const {
    Vec v(1);
    v(0) = x;
    return grad_(v)(0);
}

double TestFunction::hessian1(double x) const {
    Vec v(1);
    v(0) = x;
    return hess_(v)(0, 0);
}

double TestFunction::max_gradient_fd_error(std::mt19937_64& rng, int n_points) const {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    double scale = support_radius_ * 0.98;
    for (int i = 0; i < n_points; ++i) {
        Vec x(d_);
        for (int j = 0; j < d_; ++j) x(j) = scale * unif(rng) / std::sqrt(double(d_));
        Vec g = grad_(x);
        double h = 1e-6 * (1.0 + x.norm());
        for (int j = 0; j < d_; ++j) {
            Vec xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            double fd = (f_(xp) - f_(xm)) / (2.0 * h);
            double denom = std::max({std::abs(g(j)), sup_norm_ / support_radius_, 1e-12});
            worst = std::max(worst, std::abs(fd - g(j)) / denom);
        }
    }
    return worst;
}

TestFunction TestFunction::bump(int d, const Vec& center, double radius, double amplitude) {
    if (center.size() != d) throw InputError("bump center dimension mismatch");
    if (!(radius > 0.0)) throw InputError("bump radius must be positive");

    const double g0 = std::exp(-1.0);
    RadialProfile p;
    auto g = [](double u) { return (u < 1.0) ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; };
    auto h1 = [](double u) { double w = 1.0 - u * u; return -2.0 * u / (w * w); };
    auto h2 = [](double u) { double w = 1.0 - u * u; return -(2.0 + 6.0 * u * u) / (w * w * w); };
    double A = amplitude, R = radius;
    p.value = [=](double rho) { return A * g(rho / R) / g0; };
    p.d1 = [=](double rho) {
        double u = rho / R;
        if (u >= 1.0) return 0.0;
        return A / (R * g0) * h1(u) * g(u);
    };
    p.d2 = [=](double rho) {
        double u = rho / R;
        if (u >= 1.0) return 0.0;
        return A / (R * R * g0) * (h2(u) + h1(u) * h1(u)) * g(u);
    };
    p.d2_at_zero = -2.0 * A / (R * R);

    TestFunction tf;
    tf.d_ = d;
    tf.support_radius_ = center.norm() + radius;
    tf.sup_norm_ = std::abs(amplitude);

    auto profile = std::make_shared<RadialProfile>(std::move(p));
    Vec c = center;
    tf.f_ = [profile, c](const Vec& x) { return profile->value((x - c).norm()); };
    tf.grad_ = [profile, c](const Vec& x) -> Vec {
        Vec dx = x - c;
        double rho = dx.norm();
        if (rho < 1e-12) return Vec::Zero(x.size());
        return (profile->d1(rho) / rho) * dx;
    };
    tf.hess_ = [profile, c](const Vec& x) -> Mat {
        Vec dx = x - c;
        double rho = dx.norm();
        int n = static_cast<int>(x.size());
        if (rho < 1e-8) return profile->d2_at_zero * Mat::Identity(n, n);
        Vec nvec = dx / rho;
        Mat nn = nvec * nvec.transpose();
        return profile->d2(rho) * nn + (profile->d1(rho) / rho) * (Mat::Identity(n, n) - nn);
    };
    tf.hess_sup_norm_ = std::max(estimate_sup(profile->d2, radius),
                                 std::abs(profile->d2_at_zero));
    // off-diagonal part is bounded by |F'(rho)/rho|, estimate it as well
    tf.hess_sup_norm_ = std::max(
        tf.hess_sup_norm_,
        estimate_sup([&](double rho) { return rho > 1e-9 ? profile->d1(rho) / rho : 0.0; },
                     radius));
    return tf;
}

TestFunction TestFunction::bump1(double center, double radius, double amplitude) {
    Vec c(1);
    c(0) = center;
    return bump(1, c, radius, amplitude);
}

TestFunction TestFunction::windowed(int d, double flat_radius, double support_radius,
                                    const std::function<double(double)>& base,
                                    const std::function<double(double)>& base_d1,
                                    const std::function<double(double)>& base_d2,
                                    double d2_at_zero_base) {
    if (!(0.0 < flat_radius && flat_radius < support_radius))
        throw InputError("need 0 < flat_radius < support_radius");
    double a = flat_radius, R = support_radius;
    double w = R - a;

    RadialProfile p;
    auto window = [=](double rho) {
        if (rho <= a) return 1.0;
        if (rho >= R) return 0.0;
        return 1.0 - smoothstep((rho - a) / w);
    };
    auto window_d1 = [=](double rho) {
        if (rho <= a || rho >= R) return 0.0;
        return -smoothstep_d1((rho - a) / w) / w;
    };
    auto window_d2 = [=](double rho) {
        if (rho <= a || rho >= R) return 0.0;
        return -smoothstep_d2((rho - a) / w) / (w * w);
    };
    p.value = [=](double rho) { return base(rho) * window(rho); };
    p.d1 = [=](double rho) { return base_d1(rho) * window(rho) + base(rho) * window_d1(rho); };
    p.d2 = [=](double rho) {
        return base_d2(rho) * window(rho) + 2.0 * base_d1(rho) * window_d1(rho) +
               base(rho) * window_d2(rho);
    };
    p.d2_at_zero = d2_at_zero_base;

    TestFunction tf;
    tf.d_ = d;
    tf.support_radius_ = R;

    auto profile = std::make_shared<RadialProfile>(std::move(p));
    tf.f_ = [profile](const Vec& x) { return profile->value(x.norm()); };
    tf.grad_ = [profile](const Vec& x) -> Vec {
        double rho = x.norm();
        if (rho < 1e-12) return Vec::Zero(x.size());
        return (profile->d1(rho) / rho) * x;
    };
    tf.hess_ = [profile](const Vec& x) -> Mat {
        double rho = x.norm();
        int n = static_cast<int>(x.size());
        if (rho < 1e-8) return profile->d2_at_zero * Mat::Identity(n, n);
        Vec nvec = x / rho;
        Mat nn = nvec * nvec.transpose();
        return profile->d2(rho) * nn + (profile->d1(rho) / rho) * (Mat::Identity(n, n) - nn);
    };
    tf.sup_norm_ = estimate_sup(profile->value, R);
    tf.hess_sup_norm_ = std::max(estimate_sup(profile->d2, R), std::abs(profile->d2_at_zero));
    return tf;
}

TestFunction TestFunction::smoothed_indicator(int d, double R, double shoulder_frac) {
    if (!(R > 0.0) || !(shoulder_frac > 0.0 && shoulder_frac < 1.0))
        throw InputError("smoothed_indicator needs R > 0 and shoulder_frac in (0,1)");
    return windowed(
        d, R * (1.0 - shoulder_frac), R, [](double) { return 1.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, 0.0);
}

TestFunction TestFunction::capped_quadratic(int d, double flat_radius, double support_radius) {
    return windowed(
        d, flat_radius, support_radius, [](double rho) { return rho * rho; },
        [](double rho) { return 2.0 * rho; }, [](double) { return 2.0; }, 2.0);
}

TestFunction TestFunction::inverse_quadratic() {
    TestFunction tf;
    tf.d_ = 1;
    tf.support_radius_ = kInf;
    tf.sup_norm_ = 1.0;
    tf.hess_sup_norm_ = 2.0;  // |f''| peaks at the origin
    tf.f_ = [](const Vec& x) { return 1.0 / (x(0) * x(0) + 1.0); };
    tf.grad_ = [](const Vec& x) -> Vec {
        double w = x(0) * x(0) + 1.0;
        Vec g(1);
        g(0) = -2.0 * x(0) / (w * w);
        return g;
    };
    tf.hess_ = [](const Vec& x) -> Mat {
        double w = x(0) * x(0) + 1.0;
        Mat h(1, 1);
        h(0, 0) = (6.0 * x(0) * x(0) - 2.0) / (w * w * w);
        return h;
    };
    return tf;
}

TestFunction TestFunction::capped_identity(double flat_radius, double support_radius) {
    if (!(0.0 < flat_radius && flat_radius < support_radius))
        throw InputError("need 0 < flat_radius < support_radius");
    double a = flat_radius, R = support_radius;
    double w = R - a;

    auto window = [=](double t) {  // t = |x|
        if (t <= a) return 1.0;
        if (t >= R) return 0.0;
        return 1.0 - smoothstep((t - a) / w);
    };
    auto window_d1 = [=](double t) {
        if (t <= a || t >= R) return 0.0;
        return -smoothstep_d1((t - a) / w) / w;
    };
    auto window_d2 = [=](double t) {
        if (t <= a || t >= R) return 0.0;
        return -smoothstep_d2((t - a) / w) / (w * w);
    };

    TestFunction tf;
    tf.d_ = 1;
    tf.support_radius_ = R;
    tf.f_ = [=](const Vec& x) { return x(0) * window(std::abs(x(0))); };
    tf.grad_ = [=](const Vec& x) -> Vec {
        double t = std::abs(x(0));
        double s = (x(0) >= 0.0) ? 1.0 : -1.0;
        Vec g(1);
        g(0) = window(t) + x(0) * window_d1(t) * s;
        return g;
    };
    tf.hess_ = [=](const Vec& x) -> Mat {
        double t = std::abs(x(0));
        double s = (x(0) >= 0.0) ? 1.0 : -1.0;
        Mat h(1, 1);
        h(0, 0) = 2.0 * window_d1(t) * s + x(0) * window_d2(t);
        return h;
    };
    tf.sup_norm_ = R;
    tf.hess_sup_norm_ = estimate_sup(
        [&](double t) { return std::abs(2.0 * window_d1(t) + t * window_d2(t)); }, R);
    return tf;
}

}  // namespace feller
