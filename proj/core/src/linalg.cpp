#include "paa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "paa/errors.hpp"

namespace paa {

LUFactors lu_factor(const DenseMatrix& m) {
  if (!m.square() || m.rows() == 0) throw DimensionMismatch("lu_factor: matrix must be square");
  if (!m.all_finite()) throw NonFiniteEvaluation("lu_factor: non-finite matrix entry");

  const std::size_t n = m.rows();
  const double threshold = kSingularPivotRatio * m.max_abs();
  LUFactors f{m, std::vector<std::size_t>(n)};
  DenseMatrix& a = f.lu;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best == 0.0 || best < threshold)
      throw SingularMatrix("lu_factor: pivot " + std::to_string(best) + " at column " +
                           std::to_string(k) + " below threshold");
    f.pivots[k] = p;
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));

    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double akj = a(k, j);
      if (akj == 0.0) continue;
      auto cj = a.col(j);
      auto ck = a.col(k);
      for (std::size_t i = k + 1; i < n; ++i) cj[i] -= ck[i] * akj;
    }
  }
  return f;
}

Vector lu_solve(const LUFactors& factors, std::span<const double> b) {
  const std::size_t n = factors.size();
  if (b.size() != n) throw DimensionMismatch("lu_solve: right-hand side has wrong length");
  const DenseMatrix& a = factors.lu;
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k)
    if (factors.pivots[k] != k) std::swap(x[k], x[factors.pivots[k]]);
  // L y = P b, column oriented
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    auto c = a.col(j);
    for (std::size_t i = j + 1; i < n; ++i) x[i] -= c[i] * xj;
  }
  // U x = y
  for (std::size_t j = n; j-- > 0;) {
    x[j] /= a(j, j);
    const double xj = x[j];
    if (xj == 0.0) continue;
    auto c = a.col(j);
    for (std::size_t i = 0; i < j; ++i) x[i] -= c[i] * xj;
  }
  return x;
}

QRFactors::QRFactors(DenseMatrix a) : qr_(std::move(a)), tau_(std::min(qr_.rows(), qr_.cols())) {
  const std::size_t m = qr_.rows();
  const std::size_t n = qr_.cols();
  for (std::size_t k = 0; k < tau_.size(); ++k) {
    auto ck = qr_.col(k);
    double tail = 0.0;
    for (std::size_t i = k + 1; i < m; ++i) tail += ck[i] * ck[i];
    const double x0 = ck[k];
    if (tail == 0.0) {
      tau_[k] = 0.0;
      continue;
    }
    const double norm = std::sqrt(x0 * x0 + tail);
    const double beta = x0 >= 0.0 ? -norm : norm;
    tau_[k] = (beta - x0) / beta;
    const double scale = 1.0 / (x0 - beta);
    for (std::size_t i = k + 1; i < m; ++i) ck[i] *= scale;
    ck[k] = beta;

    for (std::size_t j = k + 1; j < n; ++j) {
      auto cj = qr_.col(j);
      double s = cj[k];
      for (std::size_t i = k + 1; i < m; ++i) s += ck[i] * cj[i];
      s *= tau_[k];
      cj[k] -= s;
      for (std::size_t i = k + 1; i < m; ++i) cj[i] -= s * ck[i];
    }
  }
}

DenseMatrix QRFactors::r_matrix() const {
  const std::size_t n = cols();
  DenseMatrix r(std::min(rows(), n), n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j && i < r.rows(); ++i) r(i, j) = qr_(i, j);
  return r;
}

void QRFactors::apply_qt(std::span<double> b) const {
  if (b.size() != rows()) throw DimensionMismatch("QR: vector length mismatch");
  const std::size_t m = rows();
  for (std::size_t k = 0; k < tau_.size(); ++k) {
    if (tau_[k] == 0.0) continue;
    auto ck = qr_.col(k);
    double s = b[k];
    for (std::size_t i = k + 1; i < m; ++i) s += ck[i] * b[i];
    s *= tau_[k];
    b[k] -= s;
    for (std::size_t i = k + 1; i < m; ++i) b[i] -= s * ck[i];
  }
}

DenseMatrix QRFactors::q_matrix() const {
  const std::size_t m = rows();
  const std::size_t n = tau_.size();
  DenseMatrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  // Q = H_0 H_1 ... H_{n-1}; apply in reverse to the leading identity columns.
  for (std::size_t k = n; k-- > 0;) {
    if (tau_[k] == 0.0) continue;
    auto ck = qr_.col(k);
    for (std::size_t j = 0; j < n; ++j) {
      auto qj = q.col(j);
      double s = qj[k];
      for (std::size_t i = k + 1; i < m; ++i) s += ck[i] * qj[i];
      s *= tau_[k];
      qj[k] -= s;
      for (std::size_t i = k + 1; i < m; ++i) qj[i] -= s * ck[i];
    }
  }
  return q;
}

Vector QRFactors::solve_least_squares(std::span<const double> b) const {
  Vector y(b.begin(), b.end());
  apply_qt(y);
  const std::size_t n = cols();
  Vector x(n);
  for (std::size_t j = n; j-- > 0;) {
    double s = y[j];
    for (std::size_t k = j + 1; k < n; ++k) s -= qr_(j, k) * x[k];
    x[j] = s / qr_(j, j);
  }
  return x;
}

namespace {

bool rank_deficient(const QRFactors& qr) {
  const double r00 = std::abs(qr.r(0, 0));
  for (std::size_t j = 0; j < qr.cols(); ++j)
    if (std::abs(qr.r(j, j)) <= kRankDropRatio * r00) return true;
  return false;
}

}  // namespace

MixingWeights constrained_ls_alpha(const DenseMatrix& columns) {
  const std::size_t ncols = columns.cols();
  if (ncols == 0) throw DimensionMismatch("constrained_ls_alpha: no columns");
  MixingWeights out{Vector(ncols, 0.0), 0};
  if (ncols == 1) {
    out.alpha[0] = 1.0;
    return out;
  }

  const std::size_t n = columns.rows();
  const auto newest = columns.col(ncols - 1);

  // Differences W[:, j] = F_{j+1} - F_j for j = dropped .. ncols-2.
  for (std::size_t first = 0; first + 1 < ncols; ++first) {
    const std::size_t nd = ncols - 1 - first;
    DenseMatrix w(n, nd);
    for (std::size_t j = 0; j < nd; ++j) {
      auto dst = w.col(j);
      auto hi = columns.col(first + j + 1);
      auto lo = columns.col(first + j);
      for (std::size_t i = 0; i < n; ++i) dst[i] = hi[i] - lo[i];
    }
    if (nd > n) continue;  // more differences than rows: necessarily rank deficient
    QRFactors qr(std::move(w));
    if (rank_deficient(qr)) continue;

    const Vector gamma = qr.solve_least_squares(newest);
    const Vector local = gamma_to_alpha(gamma);
    std::copy(local.begin(), local.end(), out.alpha.begin() + static_cast<std::ptrdiff_t>(first));
    out.dropped = first;
    return out;
  }
  out.alpha.back() = 1.0;
  out.dropped = ncols - 1;
  return out;
}

Vector gamma_to_alpha(std::span<const double> gamma) {
  const std::size_t m = gamma.size();
  Vector alpha(m + 1);
  if (m == 0) {
    alpha[0] = 1.0;
    return alpha;
  }
  alpha[0] = gamma[0];
  for (std::size_t j = 1; j < m; ++j) alpha[j] = gamma[j] - gamma[j - 1];
  alpha[m] = 1.0 - gamma[m - 1];
  return alpha;
}

Vector alpha_to_gamma(std::span<const double> alpha) {
  if (alpha.empty()) throw DimensionMismatch("alpha_to_gamma: empty weight vector");
  Vector gamma(alpha.size() - 1);
  double s = 0.0;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    s += alpha[j];
    gamma[j] = s;
  }
  return gamma;
}

DenseMatrix fd_jacobian(const ResidualFn& f, std::span<const double> x) {
  if (!all_finite(x)) throw NonFiniteEvaluation("fd_jacobian: non-finite point");
  const Vector f0 = f(x);
  if (!all_finite(f0)) throw NonFiniteEvaluation("fd_jacobian: non-finite residual at base point");

  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  DenseMatrix jac(f0.size(), x.size());
  Vector xp(x.begin(), x.end());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    const double h_nominal = root_eps * std::max(std::abs(xj), 1.0);
    xp[j] = xj + h_nominal;
    // Divide by the step that was actually representable.
    const double h = xp[j] - xj;
    const Vector fp = f(xp);
    xp[j] = xj;
    if (fp.size() != f0.size()) throw DimensionMismatch("fd_jacobian: residual length changed");
    if (!all_finite(fp))
      throw NonFiniteEvaluation("fd_jacobian: non-finite residual probing column " +
                                std::to_string(j));
    auto c = jac.col(j);
    for (std::size_t i = 0; i < f0.size(); ++i) c[i] = (fp[i] - f0[i]) / h;
  }
  return jac;
}

}  // namespace paa
