#pragma once

#include <functional>
#include <random>

#include "feller/levy_measure.hpp"

namespace feller {

/// Twice continuously differentiable test function with compact support
/// (f == 0 outside |x| >= support_radius, measured from the origin).
/// Gradients and Hessians are analytic.
class TestFunction {
public:
    double operator()(const Vec& x) const { return f_(x); }
    double operator()(double x) const;
    Vec gradient(const Vec& x) const { return grad_(x); }
    double gradient1(double x) const;
    Mat hessian(const Vec& x) const { return hess_(x); }
    double hessian1(double x) const;

    int dim() const { return d_; }
    double support_radius() const { return support_radius_; }
    double sup_norm() const { return sup_norm_; }
    double hessian_sup_norm() const { return hess_sup_norm_; }

    /// Largest relative mismatch between the analytic gradient and central
    /// finite differences over n random points inside the support.
    double max_gradient_fd_error(std::mt19937_64& rng, int n_points = 100) const;

    // --- builders ---

    /// Smooth radial mollifier: amplitude at `center`, support of radius
    /// `radius` around it.
    static TestFunction bump(int d, const Vec& center, double radius, double amplitude = 1.0);
    static TestFunction bump1(double center, double radius, double amplitude = 1.0);

    /// C^2 surrogate for 1_{|x| <= R}: equals 1 inside R(1 - shoulder_frac),
    /// 0 outside R, quintic smoothstep shoulders.
    static TestFunction smoothed_indicator(int d, double R, double shoulder_frac = 0.05);

    /// Equals |x|^2 on |x| <= flat_radius, rolled off to 0 at support_radius.
    static TestFunction capped_quadratic(int d, double flat_radius, double support_radius);

    /// d = 1: equals x on |x| <= flat_radius, rolled off to 0 at support_radius.
    static TestFunction capped_identity(double flat_radius, double support_radius);

    /// d = 1: f(x) = (x^2 + 1)^{-1}. Not compactly supported (support_radius
    /// is infinite); used as a Lyapunov weight.
    static TestFunction inverse_quadratic();

private:
    static TestFunction windowed(int d, double flat_radius, double support_radius,
                                 const std::function<double(double)>& base,
                                 const std::function<double(double)>& base_d1,
                                 const std::function<double(double)>& base_d2,
                                 double d2_at_zero_base);

    int d_ = 1;
    double support_radius_ = 0.0;
    double sup_norm_ = 0.0;
    double hess_sup_norm_ = 0.0;
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
    std::function<Mat(const Vec&)> hess_;
};

}  // namespace feller
