#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "paa/dense_matrix.hpp"

namespace paa {

/// Residual map x -> f(x).
using ResidualFn = std::function<Vector(std::span<const double>)>;

/// LU factors with partial pivoting, P M = L U. L has a unit diagonal and
/// shares storage with U.
struct LUFactors {
  DenseMatrix lu;
  std::vector<std::size_t> pivots;  // row swapped with row k at step k

  std::size_t size() const noexcept { return lu.rows(); }
};

/// Pivot threshold relative to max|M| below which lu_factor reports SingularMatrix.
inline constexpr double kSingularPivotRatio = 1e-14;

LUFactors lu_factor(const DenseMatrix& m);
Vector lu_solve(const LUFactors& factors, std::span<const double> b);

/// Compact Householder QR (LAPACK geqrf layout): R on and above the
/// diagonal, reflector tails below it, implicit unit leading entries.
class QRFactors {
 public:
  explicit QRFactors(DenseMatrix a);

  std::size_t rows() const noexcept { return qr_.rows(); }
  std::size_t cols() const noexcept { return qr_.cols(); }

  double r(std::size_t i, std::size_t j) const noexcept { return i <= j ? qr_(i, j) : 0.0; }
  DenseMatrix r_matrix() const;
  /// Thin orthogonal factor (rows x cols).
  DenseMatrix q_matrix() const;

  /// Overwrites b with Q^T b.
  void apply_qt(std::span<double> b) const;
  /// Least-squares solution of min ||A x - b|| assuming full column rank.
  Vector solve_least_squares(std::span<const double> b) const;

 private:
  DenseMatrix qr_;
  Vector tau_;
};

/// Relative diagonal threshold of R under which the oldest difference
/// column is dropped from the Anderson least-squares problem.
inline constexpr double kRankDropRatio = 1e-10;

struct MixingWeights {
  /// One weight per input column (oldest first); sums to one.
  Vector alpha;
  /// Number of leading (oldest) columns excluded by the rank safeguard.
  /// Their weights are exactly zero.
  std::size_t dropped = 0;
};

/// Weights minimising ||sum_i alpha_i F_i|| subject to sum_i alpha_i = 1,
/// for columns F_0..F_m ordered oldest to newest.
///
/// Solved in unconstrained difference form, gamma = argmin ||F_m - W gamma||
/// with W = [F_1-F_0, ..., F_m-F_{m-1}], via Householder QR. While any
/// |R_jj| <= kRankDropRatio * |R_00| the oldest difference is discarded.
MixingWeights constrained_ls_alpha(const DenseMatrix& columns);

/// alpha_0 = g_1, alpha_j = g_{j+1} - g_j, alpha_m = 1 - g_m.
Vector gamma_to_alpha(std::span<const double> gamma);
/// Inverse of gamma_to_alpha: g_j = alpha_0 + ... + alpha_{j-1}.
Vector alpha_to_gamma(std::span<const double> alpha);

/// Forward-difference Jacobian with h_j = sqrt(eps) * max(|x_j|, 1).
DenseMatrix fd_jacobian(const ResidualFn& f, std::span<const double> x);

}  // namespace paa
