#include "paa/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <utility>

#include "paa/errors.hpp"
#include "paa/linalg.hpp"

namespace paa {

void SolverConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidSpec("beta must lie in (0, 1]");
  if (!(tol > 0.0)) throw InvalidSpec("tol must be positive");
  if (n_max < 1) throw InvalidSpec("n_max must be at least 1");
  if (n_update < 1) throw InvalidSpec("n_update must be at least 1");
  if (!(divergence_threshold > tol)) throw InvalidSpec("divergence threshold must exceed tol");
  if (kind.type == PreconditionerKind::Type::ConstantScalar &&
      (kind.alpha == 0.0 || !std::isfinite(kind.alpha)))
    throw InvalidSpec("constant preconditioner needs a finite non-zero alpha");
  if (kind.type == PreconditionerKind::Type::BlockDiagJacobian && kind.block < 1)
    throw InvalidSpec("block size must be at least 1");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::PreconditionerFailure: return "preconditioner_failure";
  }
  return "unknown";
}

SolveStatus parse_status(const std::string& text) {
  for (auto s : {SolveStatus::Converged, SolveStatus::Diverged, SolveStatus::MaxIterations,
                 SolveStatus::PreconditionerFailure})
    if (to_string(s) == text) return s;
  throw InvalidSpec("unknown solve status '" + text + "'");
}

Vector anderson_update(const AAHistory& history, std::span<const double> alpha, double beta) {
  if (alpha.size() != history.size())
    throw DimensionMismatch("anderson_update: " + std::to_string(alpha.size()) +
                            " weights for " + std::to_string(history.size()) + " entries");
  if (history.empty()) throw DimensionMismatch("anderson_update: empty history");
  const std::size_t n = history.x(0).size();
  Vector out(n, 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    axpy(alpha[i], history.x(i), out);
    axpy(alpha[i] * beta, history.preconditioned(i), out);
  }
  return out;
}

Vector ck_step_oracle(const AAHistory& history, const FactoredPreconditioner& precond,
                      std::span<const double> f_k, double beta) {
  if (history.empty()) throw DimensionMismatch("ck_step_oracle: empty history");
  const std::size_t len = history.size();
  const std::size_t n = history.x(0).size();
  const std::size_t m = len - 1;

  // w_j = -M^{-1} f_j with the given (fixed) preconditioner.
  std::vector<Vector> w(len);
  for (std::size_t j = 0; j + 1 < len; ++j)
    w[j] = history.keeps_raw() ? precond.apply(history.raw(j)) : history.preconditioned(j);
  w[m] = precond.apply(f_k);

  DenseMatrix e(n, m);
  DenseMatrix wd(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      e(i, j) = history.x(j + 1)[i] - history.x(j)[i];
      wd(i, j) = w[j + 1][i] - w[j][i];
    }
  }

  DenseMatrix c = (-1.0) * DenseMatrix::identity(n);
  if (m > 0) {
    const DenseMatrix wt = wd.transpose();
    LUFactors gram;
    try {
      gram = lu_factor(wt.multiply(wd));
    } catch (const SingularMatrix& err) {
      throw RankDeficient(std::string("ck_step_oracle: ") + err.what());
    }
    // (W^T W)^{-1} W^T, column by column of W^T.
    DenseMatrix pinv(m, n);
    for (std::size_t j = 0; j < n; ++j) {
      const Vector col = lu_solve(gram, wt.col(j));
      std::copy(col.begin(), col.end(), pinv.col(j).begin());
    }
    DenseMatrix lead = e + beta * wd;
    c += (1.0 / beta) * lead.multiply(pinv);
  }

  // x_{k+1} = x_k - beta C_k w_k
  Vector out = history.x(m);
  axpy(-beta, c.multiply(w[m]), out);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

bool is_finite_norm(double v) { return std::isfinite(v); }

}  // namespace

SolveReport paa_solve(const NonlinearProblem& problem, std::span<const double> x0,
                      const SolverConfig& config) {
  config.validate();
  if (x0.size() != problem.dimension)
    throw DimensionMismatch("paa_solve: x0 has length " + std::to_string(x0.size()) +
                            ", problem dimension is " + std::to_string(problem.dimension));
  if (!all_finite(x0)) throw NonFiniteEvaluation("paa_solve: non-finite initial guess");

  const auto start = Clock::now();
  SolveReport report;
  AAHistory history(config.m, config.recompute_history);
  std::optional<FactoredPreconditioner> precond;
  const BuildOptions build_options{config.diag_floor};

  Vector x(x0.begin(), x0.end());
  if (config.record_iterates) report.iterates.push_back(x);

  for (std::size_t k = 0;; ++k) {
    Vector f = problem.residual(x);
    const double fnorm = norm2(f);
    report.residual_norms.push_back(fnorm);

    if (!is_finite_norm(fnorm) || !all_finite(f)) {
      report.status = SolveStatus::Diverged;
      report.message = "non-finite residual";
      break;
    }
    if (fnorm < config.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (fnorm > config.divergence_threshold) {
      report.status = SolveStatus::Diverged;
      break;
    }
    if (k == config.n_max) {
      report.status = SolveStatus::MaxIterations;
      break;
    }

    const bool rebuild =
        config.kind.is_constant() ? !precond.has_value() : due_for_update(k, config.n_update);
    if (rebuild) {
      try {
        precond.emplace(build(config.kind, problem, x, k, build_options));
      } catch (const Error& err) {
        report.status = SolveStatus::PreconditionerFailure;
        report.message = err.what();
        break;
      }
      ++report.preconditioner_builds;
      if (config.kind.uses_jacobian()) ++report.jacobian_builds;
      if (config.recompute_history)
        for (std::size_t j = 0; j < history.size(); ++j)
          history.set_preconditioned(j, precond->apply(history.raw(j)));
    }

    Vector F = precond->apply(f);
    history.push(x, std::move(F), config.recompute_history ? std::move(f) : Vector{});

    const MixingWeights weights = constrained_ls_alpha(history.preconditioned_columns());

    Vector mixed(x.size(), 0.0);
    for (std::size_t i = 0; i < weights.alpha.size(); ++i)
      axpy(weights.alpha[i], history.preconditioned(i), mixed);
    report.mixed_norms.push_back(norm2(mixed));

    x = anderson_update(history, weights.alpha, config.beta);
    if (config.record_alpha) report.alpha_log.push_back(weights.alpha);
    if (config.record_iterates) report.iterates.push_back(x);
    report.iterations = k + 1;
  }

  report.x = std::move(x);
  report.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

double spectral_norm_estimate(const DenseMatrix& b, std::size_t max_steps, double rel_tol) {
  if (b.empty()) return 0.0;
  std::mt19937_64 gen(0x5eed);
  Vector v(b.cols());
  for (double& e : v) e = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  double vn = norm2(v);
  for (double& e : v) e /= vn;

  const DenseMatrix bt = b.transpose();
  double sigma = 0.0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Vector u = b.multiply(v);
    const double next = norm2(u);
    Vector w = bt.multiply(u);
    const double wn = norm2(w);
    const bool settled = step > 0 && std::abs(next - sigma) <= rel_tol * next;
    sigma = next;
    if (wn == 0.0 || settled) break;
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
  }
  return sigma;
}

std::vector<double> observed_orders(std::span<const Vector> iterates,
                                    std::span<const double> solution) {
  std::vector<double> errors;
  errors.reserve(iterates.size());
  for (const auto& it : iterates) errors.push_back(norm2(subtract(it, solution)));
  std::vector<double> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double a = errors[k];
    const double b = errors[k + 1];
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) continue;
    orders.push_back(std::log(b) / std::log(a));
  }
  return orders;
}

TheoremProbe probe_theorem(const NonlinearProblem& problem, std::span<const double> x,
                           const FactoredPreconditioner& precond,
                           std::span<const Vector> iterates) {
  const DenseMatrix jac = problem.jacobian_at(x);
  const std::size_t n = jac.rows();
  // B = I - M^{-1} J; apply() returns -M^{-1} v.
  DenseMatrix b = DenseMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector col = precond.apply(jac.col(j));
    auto bj = b.col(j);
    for (std::size_t i = 0; i < n; ++i) bj[i] += col[i];
  }
  TheoremProbe probe;
  probe.contraction_estimate = spectral_norm_estimate(b);
  if (problem.known_solution && !iterates.empty())
    probe.orders = observed_orders(iterates, *problem.known_solution);
  return probe;
}

}  // namespace paa
