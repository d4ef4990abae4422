#pragma once

#include <complex>

#include "feller/coefficient_field.hpp"
#include "feller/levy_triplet.hpp"
#include "feller/test_function.hpp"

namespace feller {

/// State-dependent symbol q(x, xi) = psi(sigma(x)^T xi). q(x, 0) == 0 exactly.
std::complex<double> state_symbol(const CoefficientField& sigma, const LevyTriplet& driver,
                                  const Vec& x, const Vec& xi, const QuadratureSpec& quad = {});

std::complex<double> state_symbol(const CoefficientField& sigma, const LevyTriplet& driver,
                                  double x, double xi, const QuadratureSpec& quad = {});

/// Image triplet of the driver under y -> sigma(x) y:
///   b(x)  = sigma(x) b_L + drift correction from the cutoff change,
///   Q(x)  = sigma(x) Q_L sigma(x)^T,
///   nu(x, .) = pushforward of nu_L (kept lazily as (sigma(x), nu_L)).
struct StateTriplet {
    Vec b;
    Mat Q;
    Mat sigma_x;
    const LevyMeasure* nu_driver;  // pushforward measure = image of *nu_driver under sigma_x
};

StateTriplet pushforward_triplet(const CoefficientField& sigma, const LevyTriplet& driver,
                                 const Vec& x, const QuadratureSpec& quad = {});

/// Mass of a Borel set under the pushforward measure nu(x, B) (lazy route:
/// pulls B back through sigma(x)).
MassResult state_measure_mass(const StateTriplet& st, const SetDescriptor& set_in_state_space,
                              const QuadratureSpec& quad = {});

/// Characteristic exponent assembled from a StateTriplet (cutoff read on
/// |sigma(x) y|). Cross-validates state_symbol.
std::complex<double> exponent_of_state_triplet(const StateTriplet& st, const Vec& xi,
                                               const QuadratureSpec& quad = {});

/// Integro-differential generator action
///   A f(x) = (sigma(x) b_L) . grad f + 1/2 tr(sigma Q_L sigma^T hess f)
///          + int [ f(x + sigma(x) y) - f(x) - grad f . sigma(x) y 1_{(0,1)}(|y|) ] nu_L(dy).
double generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                       const TestFunction& f, const Vec& x, const QuadratureSpec& quad = {});

double generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                       const TestFunction& f, double x, const QuadratureSpec& quad = {});

/// Small-jump generator (d = k = 1): drift with compensator correction for the
/// removed band, diffusion, and the jump integral over 0 < |y| <= r. Satisfies
/// A = B + N together with tail_generator_apply.
double truncated_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver,
                                 double r, const TestFunction& f, double x,
                                 const QuadratureSpec& quad = {});

/// Large-jump operator N u(x) = int_{|y| > r} (u(x + sigma(x) y) - u(x)) nu_L(dy)
/// for bounded continuous u. |N u| <= 2 ||u||_inf * tail mass.
double tail_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver, double r,
                            const std::function<double(const Vec&)>& u, double u_sup_norm,
                            const Vec& x, const QuadratureSpec& quad = {});

double tail_generator_apply(const CoefficientField& sigma, const LevyTriplet& driver, double r,
                            const TestFunction& u, double x, const QuadratureSpec& quad = {});

/// Grid estimate of sup_{|x| <= r} sup_{|xi| <= 1/r} |q(x, xi)| per radius.
/// A 64 x 64 log grid per radius: a lower bound on the true sup, read as a
/// trend, not a certificate.
struct GrowthProbeRow {
    double r;
    double sup_abs_q;
};

enum class GrowthTrend { vanishing, not_vanishing, inconclusive };

struct GrowthProbeResult {
    std::vector<GrowthProbeRow> rows;
    GrowthTrend trend;
};

GrowthProbeResult growth_probe(const CoefficientField& sigma, const LevyTriplet& driver,
                               const std::vector<double>& radii, const QuadratureSpec& quad = {});

}  // namespace feller
