#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "feller/quadrature.hpp"

namespace feller {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Point mass of a jump measure. The point is never the origin.
struct Atom {
    Vec point;
    double mass;
};

/// Absolutely continuous component, referenced by registry name so measures
/// round-trip through scenario files. The envelope exponents (p0, p_inf)
/// declare density(y) <= C |y|^{-dim-p0} near 0 and <= C |y|^{-dim-p_inf} at
/// infinity; they are spot-checked, not proven.
struct DensityComponent {
    std::string name;
    std::map<std::string, double> params;
    int dim = 1;
    double p0 = 0.0;
    double p_inf = 1.0;
    std::function<double(const Vec&)> eval;
    // dim >= 2 components must be finite measures with an exact sampler;
    // masses are then estimated by Monte Carlo against that sampler.
    double total_mass = std::numeric_limits<double>::quiet_NaN();
    std::function<Vec(std::mt19937_64&)> sampler;
};

/// Symmetric alpha-stable part: density scale * |y|^{-1-alpha} on R \ {0}
/// (one dimension only).
struct StableComponent {
    double alpha;
    double scale;
};

/// Scale that makes the symmetric alpha-stable exponent exactly |xi|^alpha.
double stable_normalized_scale(double alpha);

// --- measurable sets handed to set_mass -----------------------------------

struct IntervalSet {  // open interval (lo, hi), dim 1
    double lo, hi;
};
struct BallSet {  // open ball |y - center| < radius
    Vec center;
    double radius;
};
struct BallComplementSet {  // |y| > radius
    double radius;
};
struct AffinePreimageSet {  // {y : |M y + v| < radius}
    Mat M;
    Vec v;
    double radius;
};

using SetDescriptor = std::variant<IntervalSet, BallSet, BallComplementSet, AffinePreimageSet>;

bool set_contains(const SetDescriptor& s, const Vec& y);
void validate_set(const SetDescriptor& s, int dim);

/// Mass of a set under a jump measure. Infinite mass is a legitimate value
/// (sets containing a neighborhood of the origin), not an error.
struct MassResult {
    double value = 0.0;
    double std_error = 0.0;
    bool infinite = false;

    static MassResult infinity() { return {kInf, 0.0, true}; }
};

/// Sigma-finite jump measure: finite atoms + optional density + optional
/// symmetric stable part, all restricted to |y| <= trunc_radius.
/// Immutable after construction; shareable across threads.
class LevyMeasure {
public:
    explicit LevyMeasure(int dim = 1) : dim_(dim) {}

    static LevyMeasure zero(int dim) { return LevyMeasure(dim); }

    LevyMeasure& add_atom(const Vec& point, double mass);
    LevyMeasure& add_atom(double point, double mass);  // dim 1 convenience
    LevyMeasure& set_density(DensityComponent dc);
    LevyMeasure& set_stable(double alpha, double scale);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<DensityComponent>& density() const { return density_; }
    const std::optional<StableComponent>& stable() const { return stable_; }
    double trunc_radius() const { return trunc_radius_; }

    bool is_zero() const { return atoms_.empty() && !density_ && !stable_; }
    bool atoms_only() const { return !density_ && !stable_; }

    /// Restriction to the closed ball of radius r (drops atoms beyond r,
    /// clips density and stable parts).
    LevyMeasure truncated(double r) const;

    void validate() const;

private:
    int dim_;
    std::vector<Atom> atoms_;
    std::optional<DensityComponent> density_;
    std::optional<StableComponent> stable_;
    double trunc_radius_ = kInf;

    friend LevyMeasure measure_with_trunc(LevyMeasure m, double r);
};

// --- measure queries --------------------------------------------------------

MassResult set_mass(const LevyMeasure& nu, const SetDescriptor& s,
                    const QuadratureSpec& quad = {});

/// nu({ |y| > r }); always finite for a valid measure.
double tail_mass(const LevyMeasure& nu, double r, const QuadratureSpec& quad = {});

/// Signed first moment int_{lo <|y|< hi} y nu(dy) (dim 1). The include flags
/// control whether atoms sitting exactly on a boundary are counted.
double signed_moment(const LevyMeasure& nu, double lo, double hi, bool include_lo,
                     bool include_hi, const QuadratureSpec& quad = {});

/// int_{|y| <= delta} |y|^2 nu(dy) (dim 1); used for small-jump remainder bounds.
double second_moment_below(const LevyMeasure& nu, double delta, const QuadratureSpec& quad = {});

/// Mass carried by the hyperplane {y : y[axis] == value} (atoms only; density
/// and stable parts are absolutely continuous).
double hyperplane_mass(const LevyMeasure& nu, int axis, double value, double tol = 1e-12);

/// Mass on {y : c . y == value} (atoms only, same reasoning).
double hyperplane_mass(const LevyMeasure& nu, const Vec& c, double value, double tol = 1e-12);

// --- tail sampling ----------------------------------------------------------

/// Samples from the normalized restriction of nu to {|y| > r}. Atoms use a
/// discrete inverse CDF, 1-d densities a 4096-knot monotone table, stable
/// tails the closed-form inverse, and finite multi-dim densities rejection.
class TailSampler {
public:
    TailSampler(const LevyMeasure& nu, double r, const QuadratureSpec& quad = {});

    double total_intensity() const { return total_; }
    Vec sample(std::mt19937_64& rng) const;
    void sample_into(std::mt19937_64& rng, Vec& out) const;

private:
    struct DensitySide {
        double weight = 0.0;
        int sign = +1;
        std::vector<double> knots;  // |y| values, increasing
        std::vector<double> cdf;    // cumulative mass, same length
    };

    int dim_;
    double r_;
    // component weights, in fixed order: atoms, stable+, stable-, density sides..., multi-dim
    std::vector<Atom> tail_atoms_;
    double atom_weight_ = 0.0;
    std::optional<StableComponent> stable_;
    double stable_hi_ = kInf;
    double stable_side_weight_ = 0.0;
    std::vector<DensitySide> density_sides_;
    double multi_weight_ = 0.0;
    std::function<Vec(std::mt19937_64&)> multi_sampler_;
    double multi_trunc_ = kInf;
    double total_ = 0.0;
};

Vec sample_tail_jump(const LevyMeasure& nu, double r, std::mt19937_64& rng,
                     const QuadratureSpec& quad = {});

// --- integrability ----------------------------------------------------------

struct IntegrabilityReport {
    bool near_zero_ok = true;
    bool tail_ok = true;
    double min_integral = 0.0;      // int min(|y|^2, 1) d nu
    double envelope_c_zero = 0.0;   // fitted envelope constant near 0
    double envelope_c_inf = 0.0;    // fitted envelope constant at infinity
    std::string notes;
};

IntegrabilityReport check_levy_integrability(const LevyMeasure& nu,
                                             const QuadratureSpec& quad = {});

// --- density registry -------------------------------------------------------

/// Builds a registered density. Known names:
///   exp_decay   (dim 1): amplitude * exp(-rate * |y|)
///   power_law   (dim 1): amplitude * |y|^{-exponent}, optional cutoff_hi
///   gauss2d     (dim 2): mass * N((center_x, center_y), s^2 I) density
DensityComponent make_density(const std::string& name,
                              const std::map<std::string, double>& params);

}  // namespace feller
