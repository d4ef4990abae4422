#pragma once

#include <complex>

#include "feller/levy_measure.hpp"

namespace feller {

/// Driving-process triplet (b, Q, nu) under the jump cutoff 1_{(0,1)}(|y|).
/// All inputs using a different cutoff convention must be converted by the
/// caller before construction.
struct LevyTriplet {
    Vec b;
    Mat Q;
    LevyMeasure nu;

    int dim() const { return static_cast<int>(b.size()); }
    void validate() const;

    static LevyTriplet zero(int dim) {
        return LevyTriplet{Vec::Zero(dim), Mat::Zero(dim, dim), LevyMeasure::zero(dim)};
    }
};

/// Characteristic exponent psi(xi) = -i b.xi + xi.Q xi / 2
///   + int (1 - e^{i y.xi} + i y.xi 1_{(0,1)}(|y|)) nu(dy).
/// Atoms are summed exactly, 1-d densities integrated by shell-split
/// quadrature, the stable part evaluated in closed form, and finite
/// multi-dimensional densities estimated against their exact sampler.
std::complex<double> eval_exponent(const LevyTriplet& triplet, const Vec& xi,
                                   const QuadratureSpec& quad = {});

std::complex<double> eval_exponent(const LevyTriplet& triplet, double xi,
                                   const QuadratureSpec& quad = {});

/// Removes all jumps of modulus larger than r: (b, Q, nu restricted to the
/// closed ball of radius r). The drift is unchanged; compensator corrections
/// for r < 1 are applied by the consumers that need them.
LevyTriplet truncate(const LevyTriplet& triplet, double r);

/// Exponent of the compound tail part: int_{|y|>r} (1 - e^{i y.xi}
/// + i y.xi 1_{(0,1)}(|y|)) nu(dy). Together with the truncated triplet this
/// reassembles the full exponent.
std::complex<double> tail_exponent(const LevyTriplet& triplet, double r, const Vec& xi,
                                   const QuadratureSpec& quad = {});

}  // namespace feller
