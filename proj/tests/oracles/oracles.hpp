#pragma once

// Independent reference computations used only by the test suites. They go
// through Eigen rather than the library's own kernels.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "paa/dense_matrix.hpp"

namespace paa::oracle {

/// Equality-constrained QP  min a^T (F^T F) a  s.t.  sum a = 1, solved through
/// the dense KKT system with full-pivot LU.
Vector kkt_alpha(const DenseMatrix& columns);

/// GMRES residual norms ||b - A x_k|| for k = 0..max_steps, x_k minimising
/// over x0 + K_k(A, r0). Arnoldi with modified Gram-Schmidt plus a dense
/// least-squares solve per step. Stops early on breakdown.
std::vector<double> gmres_residuals(const DenseMatrix& a, const Vector& b, const Vector& x0,
                                    std::size_t max_steps);

/// Spectral radius of a general square matrix via a dense eigensolve.
double spectral_radius(const DenseMatrix& m);

/// Exact solution of A x = b via Eigen's partial-pivot LU.
Vector dense_solve(const DenseMatrix& a, const Vector& b);

/// Deterministic helpers for seeded test data.
DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                          double lo = -1.0, double hi = 1.0);
Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);
/// Q diag(eigs) Q^T with a random orthogonal Q.
DenseMatrix random_spd(std::size_t n, std::uint64_t seed, double eig_lo, double eig_hi);
/// Symmetric matrix with non-positive off-diagonal entries and
/// a_ii = dominance * sum_j |a_ij|.
DenseMatrix random_diag_dominant(std::size_t n, std::uint64_t seed, double dominance);

}  // namespace paa::oracle
