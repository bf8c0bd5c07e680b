#pragma once

#include <cstdint>
#include <random>

#include "fockdom/types.hpp"

namespace fockdom::linalg {

Matrix hermitian_part(const Matrix& a);

/// Smallest eigenvalue of the Hermitian part.
double min_eig(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Largest absolute entry.
double max_abs(const Matrix& a);

struct EigenPair {
    RealVector values;  // ascending
    Matrix vectors;
};
EigenPair hermitian_eig(const Matrix& a);

/// Positive square root of a Hermitian matrix. Eigenvalues in [-tol, 0) are
/// clipped to zero; anything below -tol throws.
Matrix psd_sqrt(const Matrix& a, double tol);

/// Orthonormal basis of the column space, keeping singular values above
/// rel_tol * sigma_max (and above abs_floor). Each basis vector is
/// normalized so its first entry of non-negligible size is positive real.
Matrix orthonormal_range(const Matrix& a, double rel_tol = 1e-10, double abs_floor = 0.0);

/// Orthonormal basis of the null space of `a` (complement of the row space).
Matrix null_space(const Matrix& a, double rel_tol = 1e-10, double abs_floor = 0.0);

/// Singular values above rel_tol * sigma_max and above abs_floor.
Eigen::Index numerical_rank(const Matrix& a, double rel_tol = 1e-10, double abs_floor = 0.0);

Matrix pinv(const Matrix& a, double rel_tol = 1e-12);

/// Spectral-norm distance between the orthogonal projections onto range(q1)
/// and range(q2); both arguments must have orthonormal columns.
double subspace_distance(const Matrix& q1, const Matrix& q2);

/// Fixes the phase of each column so its first non-negligible entry is positive real.
void normalize_phases(Matrix& q);

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-like random unitary via QR of a complex Gaussian matrix.
Matrix random_unitary(Rng& rng, Eigen::Index d);

} // namespace fockdom::linalg
