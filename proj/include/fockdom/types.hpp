#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fockdom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Coefficient scalar for formal power series. Extended precision keeps the
/// inversion recursion accurate for families whose inverse coefficients are
/// tiny compared with the partial products that cancel into them.
using Coeff = long double;

/// Thrown for precondition and validation failures (bad input, exceeded caps,
/// violated hypotheses). Mathematical verdicts are never reported this way.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default truncation cap on the number of basis words.
inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

} // namespace fockdom
