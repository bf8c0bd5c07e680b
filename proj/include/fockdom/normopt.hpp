#pragma once

#include <vector>

#include "fockdom/types.hpp"

namespace fockdom::normopt {

struct Result {
    RealVector x;          // optimal real coefficients
    double norm = 0.0;     // ||M0 + sum x_j M_j||
    double bound_gap = 0.0; // final barrier duality gap
    int newton_steps = 0;
};

/// Minimizes the spectral norm of the affine map x -> M0 + sum_j x_j M_j over
/// real x, by a log-barrier method on the constraint
/// [[t I, M(x)], [M(x)^*, t I]] >= 0.
Result minimize_spectral_norm(const Matrix& m0, const std::vector<Matrix>& basis, double rel_gap = 1e-11);

} // namespace fockdom::normopt
