#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "feller/errors.hpp"

namespace feller {

/// Tolerances and budgets for the numerical integration / estimation layer.
struct QuadratureSpec {
    double abs_tol = 1e-9;            // absolute tolerance per integral
    double split_radius = 1.0;        // extra breakpoint for singularity splitting
    std::size_t max_evals = 100000;   // integrand evaluation budget per integral
    std::size_t mc_samples = 20000;   // sample budget for measures needing Monte Carlo
    std::uint64_t mc_seed = 0x5eedf01dULL;  // fixed seed: estimates are deterministic
};

/// Shared evaluation counter. charge() returns false once the budget is spent;
/// integration then stops refining and reports the error it reached.
class EvalBudget {
public:
    explicit EvalBudget(std::size_t max_evals) : remaining_(max_evals) {}

    bool charge(std::size_t n) {
        if (remaining_ < n) {
            remaining_ = 0;
            return false;
        }
        remaining_ -= n;
        return true;
    }
    bool exhausted() const { return remaining_ == 0; }
    std::size_t remaining() const { return remaining_; }

private:
    std::size_t remaining_;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7/K15) on a finite interval. Splits the worst
/// subinterval until the summed error estimate drops below abs_tol or the
/// budget runs out.
QuadResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                              EvalBudget& budget);

/// Integrates f over (0, hi] where f may have an integrable singularity at 0.
/// Works through dyadic shells [hi/2^{j+1}, hi/2^j] until contributions die out.
QuadResult integrate_down_to_zero(const Integrand& f, double hi, double abs_tol,
                                  EvalBudget& budget);

/// Same shell scheme, but for a nonnegative integrand; sets *diverged when the
/// shell contributions do not decay towards 0 (mass accumulating at the origin).
QuadResult integrate_down_to_zero_or_diverge(const Integrand& f, double hi, double abs_tol,
                                             EvalBudget& budget, bool* diverged);

/// Integrates f over [lo, inf) through dyadic shells [lo*2^j, lo*2^{j+1}].
QuadResult integrate_up_to_infinity(const Integrand& f, double lo, double abs_tol,
                                    EvalBudget& budget);

/// Integrates f over an arbitrary finite interval that may touch or cross 0,
/// treating 0 as a potential singularity (both endpoints finite).
QuadResult integrate_with_origin_split(const Integrand& f, double a, double b, double abs_tol,
                                       EvalBudget& budget);

/// Throws ToleranceFailure when the achieved error exceeds the requested
/// tolerance by more than a small safety factor.
void require_tolerance(const QuadResult& r, double abs_tol, const char* what);

/// 1 - cos(u) without cancellation at small |u|.
double one_minus_cos(double u);

/// u - sin(u) without cancellation at small |u|.
double u_minus_sin(double u);

}  // namespace feller
