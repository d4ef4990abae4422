#include "feller/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace feller {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr std::size_t kEvalsPerRule = 15;
constexpr double kShellStopTolFrac = 1.0 / 8.0;

double apply_rule(const Integrand& f, double a, double b) {
    return GK15::integrate(f, a, b, 0, 0.0, nullptr);
}

/// Segment carrying a two-halves (Richardson) error estimate: `value` is the
/// refined two-half sum, `error` its difference from the one-shot rule. This
/// scales with the integral itself, not with the integrand's magnitude, which
/// matters for singular weights where the rule's own estimate is all roundoff.
struct Segment {
    double a, b, half_lo, half_hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment make_segment(const Integrand& f, double a, double b, double coarse) {
    double m = 0.5 * (a + b);
    Segment s{a, b, apply_rule(f, a, m), apply_rule(f, m, b), 0.0, 0.0};
    s.value = s.half_lo + s.half_hi;
    s.error = std::abs(s.value - coarse);
    if (!std::isfinite(s.value)) {
        s.value = 0.0;
        s.error = std::numeric_limits<double>::max();
    }
    return s;
}

}  // namespace

QuadResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                              EvalBudget& budget) {
    if (!(a < b)) return {0.0, 0.0};
    if (!budget.charge(3 * kEvalsPerRule)) return {0.0, std::numeric_limits<double>::max()};

    std::priority_queue<Segment> queue;
    Segment whole = make_segment(f, a, b, apply_rule(f, a, b));
    double total_value = whole.value;
    double total_error = whole.error;
    queue.push(whole);

    const double min_width = 1e-15 * std::max({std::abs(a), std::abs(b), 1.0});
    while (total_error > abs_tol && !queue.empty()) {
        Segment worst = queue.top();
        double width = worst.b - worst.a;
        if (width < min_width) break;
        // roundoff floor: refining below it cannot help
        if (worst.error <= 4e-16 * std::abs(total_value) + 1e-300) break;
        if (!budget.charge(4 * kEvalsPerRule)) break;
        queue.pop();
        double mid = 0.5 * (worst.a + worst.b);
        Segment left = make_segment(f, worst.a, mid, worst.half_lo);
        Segment right = make_segment(f, mid, worst.b, worst.half_hi);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    return {total_value, std::max(total_error, 0.0)};
}

namespace {

QuadResult shells_to_zero(const Integrand& f, double hi, double abs_tol, EvalBudget& budget,
                          bool* diverged, bool detect_divergence) {
    QuadResult total;
    if (diverged) *diverged = false;
    if (!(hi > 0.0)) return total;

    const double shell_tol = abs_tol * kShellStopTolFrac;
    int consecutive_small = 0;
    int non_decreasing = 0;
    double prev_mag = -1.0;
    double outer = hi;
    for (int j = 0; j < 1100; ++j) {
        double inner = 0.5 * outer;
        if (inner < 1e-300) break;
        QuadResult shell = integrate_adaptive(f, inner, outer, shell_tol, budget);
        total += shell;
        double mag = std::abs(shell.value);
        if (detect_divergence) {
            if (prev_mag >= 0.0 && mag >= 0.999 * prev_mag && mag > abs_tol) {
                if (++non_decreasing >= 8 || total.value > 1e15) {
                    if (diverged) *diverged = true;
                    return total;
                }
            } else {
                non_decreasing = 0;
            }
            prev_mag = mag;
        }
        if (mag < shell_tol) {
            if (++consecutive_small >= 3 && j >= 3) {
                total.error += 2.0 * mag;  // geometric remainder slack
                return total;
            }
        } else {
            consecutive_small = 0;
        }
        if (budget.exhausted()) {
            total.error += 4.0 * mag;
            return total;
        }
        outer = inner;
    }
    return total;
}

}  // namespace

QuadResult integrate_down_to_zero(const Integrand& f, double hi, double abs_tol,
                                  EvalBudget& budget) {
    return shells_to_zero(f, hi, abs_tol, budget, nullptr, false);
}

QuadResult integrate_down_to_zero_or_diverge(const Integrand& f, double hi, double abs_tol,
                                             EvalBudget& budget, bool* diverged) {
    return shells_to_zero(f, hi, abs_tol, budget, diverged, true);
}

QuadResult integrate_up_to_infinity(const Integrand& f, double lo, double abs_tol,
                                    EvalBudget& budget) {
    QuadResult total;
    if (!(lo > 0.0)) lo = std::numeric_limits<double>::min();

    const double shell_tol = abs_tol * kShellStopTolFrac;
    int consecutive_small = 0;
    double inner = lo;
    for (int j = 0; j < 1100; ++j) {
        double outer = 2.0 * inner;
        if (outer > 1e300) break;
        QuadResult shell = integrate_adaptive(f, inner, outer, shell_tol, budget);
        total += shell;
        double mag = std::abs(shell.value);
        if (mag < shell_tol) {
            if (++consecutive_small >= 3 && j >= 2) {
                total.error += 2.0 * mag;
                return total;
            }
        } else {
            consecutive_small = 0;
        }
        if (budget.exhausted()) {
            total.error += 4.0 * mag;
            return total;
        }
        inner = outer;
    }
    return total;
}

QuadResult integrate_with_origin_split(const Integrand& f, double a, double b, double abs_tol,
                                       EvalBudget& budget) {
    if (!(a < b)) return {0.0, 0.0};
    QuadResult total;
    if (a >= 0.0) {
        if (a <= 0.0) {
            total += integrate_down_to_zero(f, b, abs_tol, budget);
        } else {
            total += integrate_adaptive(f, a, b, abs_tol, budget);
        }
        return total;
    }
    if (b <= 0.0) {
        // mirror onto the positive axis
        Integrand g = [&f](double y) { return f(-y); };
        if (b >= 0.0) {
            total += integrate_down_to_zero(g, -a, abs_tol, budget);
        } else {
            total += integrate_adaptive(g, -b, -a, abs_tol, budget);
        }
        return total;
    }
    // a < 0 < b: split both sides at the origin
    Integrand g = [&f](double y) { return f(-y); };
    total += integrate_down_to_zero(g, -a, 0.5 * abs_tol, budget);
    total += integrate_down_to_zero(f, b, 0.5 * abs_tol, budget);
    return total;
}

void require_tolerance(const QuadResult& r, double abs_tol, const char* what) {
    if (r.error > 10.0 * abs_tol) {
        throw ToleranceFailure(what, abs_tol, r.error);
    }
}

double one_minus_cos(double u) {
    double s = std::sin(0.5 * u);
    return 2.0 * s * s;
}

double u_minus_sin(double u) {
    if (std::abs(u) < 1e-3) {
        double u2 = u * u;
        return u * u2 * (1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0);
    }
    return u - std::sin(u);
}

}  // namespace feller
