#include "oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <random>

namespace paa::oracle {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
  return out;
}

Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
  return out;
}

}  // namespace

Vector kkt_alpha(const DenseMatrix& columns) {
  const Eigen::MatrixXd f = to_eigen(columns);
  const Eigen::Index k = f.cols();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
  kkt.topLeftCorner(k, k) = 2.0 * f.transpose() * f;
  kkt.block(0, k, k, 1).setOnes();
  kkt.block(k, 0, 1, k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  return Vector(sol.data(), sol.data() + k);
}

std::vector<double> gmres_residuals(const DenseMatrix& a_in, const Vector& b_in,
                                    const Vector& x0_in, std::size_t max_steps) {
  const Eigen::MatrixXd a = to_eigen(a_in);
  const Eigen::VectorXd r0 = to_eigen(b_in) - a * to_eigen(x0_in);
  const double beta = r0.norm();
  std::vector<double> out{beta};
  if (beta == 0.0) return out;

  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(max_steps) + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(max_steps) + 1,
                                            static_cast<Eigen::Index>(max_steps));
  v.col(0) = r0 / beta;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(max_steps); ++k) {
    Eigen::VectorXd w = a * v.col(k);
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalise once
      for (Eigen::Index i = 0; i <= k; ++i) {
        const double hik = v.col(i).dot(w);
        h(i, k) += hik;
        w -= hik * v.col(i);
      }
    h(k + 1, k) = w.norm();

    const Eigen::MatrixXd hk = h.topLeftCorner(k + 2, k + 1);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(k + 2);
    e1(0) = beta;
    const Eigen::VectorXd y = hk.colPivHouseholderQr().solve(e1);
    out.push_back((e1 - hk * y).norm());

    if (h(k + 1, k) <= 1e-14 * beta) break;
    v.col(k + 1) = w / h(k + 1, k);
  }
  return out;
}

double spectral_radius(const DenseMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector dense_solve(const DenseMatrix& a, const Vector& b) {
  const Eigen::VectorXd x = to_eigen(a).partialPivLu().solve(to_eigen(b));
  return Vector(x.data(), x.data() + x.size());
}

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo,
                          double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = dist(gen);
  return m;
}

Vector random_vector(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

DenseMatrix random_spd(std::size_t n, std::uint64_t seed, double eig_lo, double eig_hi) {
  const Eigen::MatrixXd g = to_eigen(random_matrix(n, n, seed));
  const Eigen::MatrixXd q = g.householderQr().householderQ();
  const Eigen::VectorXd eigs = to_eigen(random_vector(n, seed + 1, eig_lo, eig_hi));
  const Eigen::MatrixXd spd = q * eigs.asDiagonal() * q.transpose();
  return from_eigen(0.5 * (spd + spd.transpose()));
}

DenseMatrix random_diag_dominant(std::size_t n, std::uint64_t seed, double dominance) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) {
      const double v = -dist(gen);
      a(i, j) = v;
      a(j, i) = v;
    }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += std::abs(a(i, j));
    a(i, i) = dominance * s;
  }
  return a;
}

}  // namespace paa::oracle
