#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feller/levy_measure.hpp"

namespace feller {

/// Shape tags drive both serialization and the analytic shortcut rules in the
/// classifier. `custom` fields evaluate but serialize only by name.
enum class SigmaForm {
    constant,       // sigma(x) = M0
    power,          // sigma(x) = coef * |x|^beta            (d = k = 1)
    power_shifted,  // sigma(x) = coef * (1 + |x|)^beta      (d = k = 1)
    neg_linear,     // sigma(x) = -x                         (d = k = 1)
    gou,            // sigma(x) = [x, 1]                     (d = 1, k = 2)
    linear_vec,     // sigma(x) = x * c^T                    (d = 1, k = |c|)
    neg_cubic,      // sigma(x) = -x^3                       (d = k = 1)
    quadratic,      // sigma(x) = x^2                        (d = k = 1)
    custom,
};

std::string sigma_form_name(SigmaForm form);
SigmaForm sigma_form_from_name(const std::string& name);

struct SigmaMetadata {
    std::optional<double> lipschitz_const;
    std::optional<double> linear_growth_const;  // |sigma(x)| <= c (1 + |x|)
    std::optional<double> growth_exponent;      // |sigma(x)| ~ |x|^beta at infinity
};

using SigmaParams = std::map<std::string, std::vector<double>>;

/// The coefficient map x in R^d -> sigma(x) in R^{d x k}, with declared
/// growth/regularity metadata. Immutable; evaluation is thread-safe.
class CoefficientField {
public:
    static CoefficientField make(SigmaForm form, const SigmaParams& params, int d, int k);

    /// Arbitrary callable (tests, extensions); serializes only by label.
    static CoefficientField custom(int d, int k, std::function<void(const Vec&, Mat&)> eval,
                                   SigmaMetadata meta, std::string label = "custom");

    int d() const { return d_; }
    int k() const { return k_; }
    SigmaForm form() const { return form_; }
    const SigmaParams& params() const { return params_; }
    const SigmaMetadata& metadata() const { return meta_; }

    Mat eval(const Vec& x) const;
    void eval_into(const Vec& x, Mat& out) const;

    // d = k = 1 convenience
    double scalar(double x) const;

    /// Spot-checks the declared linear growth bound on log-spaced sample
    /// points. Returns the worst ratio |sigma(x)| / (c (1 + |x|)).
    double check_linear_growth(int n_points = 1000) const;

    /// Finite-difference continuity probe; returns the largest relative jump
    /// seen across small perturbations at log-spaced points.
    double check_continuity(int n_points = 100) const;

private:
    CoefficientField(int d, int k, SigmaForm form) : d_(d), k_(k), form_(form) {}

    int d_, k_;
    SigmaForm form_;
    SigmaParams params_;
    SigmaMetadata meta_;
    std::function<void(const Vec&, Mat&)> eval_into_;
};

}  // namespace feller
