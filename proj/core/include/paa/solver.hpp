#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paa/dense_matrix.hpp"
#include "paa/preconditioner.hpp"
#include "paa/problems.hpp"

namespace paa {

struct SolverConfig {
  std::size_t m = 0;                  // window size
  double beta = 1.0;                  // damping, (0, 1]
  double tol = 1e-10;                 // stop when ||f(x_k)|| < tol
  std::size_t n_max = 100;            // maximum number of accepted updates
  std::size_t n_update = 1;           // rebuild M every n_update iterations
  PreconditionerKind kind = PreconditionerKind::constant(1.0);
  double divergence_threshold = 1e10;
  /// Re-apply the current M to every stored raw residual whenever M is
  /// rebuilt, instead of keeping each F_j as computed at iteration j.
  bool recompute_history = false;
  bool diag_floor = false;
  bool record_alpha = false;
  bool record_iterates = false;

  /// Throws InvalidSpec when a field is out of range.
  void validate() const;
};

/// Sliding window of the most recent (x_j, F_j) pairs, oldest first.
/// Optionally also keeps the raw residuals f_j.
class AAHistory {
 public:
  explicit AAHistory(std::size_t window, bool keep_raw = false);

  /// Appends a pair, evicting the oldest entry once m+1 are stored.
  void push(Vector x, Vector preconditioned, Vector raw = {});

  std::size_t size() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return slots_.size(); }
  bool keeps_raw() const noexcept { return keep_raw_; }
  bool empty() const noexcept { return count_ == 0; }

  const Vector& x(std::size_t i) const { return slots_[slot(i)].x; }
  const Vector& preconditioned(std::size_t i) const { return slots_[slot(i)].F; }
  const Vector& raw(std::size_t i) const { return slots_[slot(i)].f; }
  void set_preconditioned(std::size_t i, Vector F) { slots_[slot(i)].F = std::move(F); }

  /// n x size() matrix of preconditioned residuals, oldest column first.
  DenseMatrix preconditioned_columns() const;

 private:
  struct Entry {
    Vector x;
    Vector F;
    Vector f;
  };
  std::size_t slot(std::size_t i) const;

  std::vector<Entry> slots_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  bool keep_raw_;
};

enum class SolveStatus { Converged, Diverged, MaxIterations, PreconditionerFailure };

std::string to_string(SolveStatus status);
SolveStatus parse_status(const std::string& text);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  Vector x;
  /// ||f(x_k)|| for k = 0..iterations; the first entry is the initial residual.
  std::vector<double> residual_norms;
  /// ||sum_i alpha_i F_i|| of the least-squares combination at each update.
  std::vector<double> mixed_norms;
  std::size_t iterations = 0;
  std::size_t jacobian_builds = 0;
  std::size_t preconditioner_builds = 0;
  double wall_time_s = 0.0;
  std::vector<Vector> alpha_log;  // when SolverConfig::record_alpha
  std::vector<Vector> iterates;   // x_0..x_final when SolverConfig::record_iterates
  std::string message;            // failure detail, empty on success
};

/// Preconditioned Anderson acceleration PAA(m).
///
/// Per iteration k: evaluate f_k and test for convergence or divergence,
/// rebuild M when due, solve M F_k = -f_k, choose weights alpha minimising
/// ||sum alpha_i F_i|| with sum alpha_i = 1 over the last min(m, k) + 1
/// entries, then x_{k+1} = sum alpha_i x_i + beta sum alpha_i F_i.
///
/// m = 0 reduces to the quasi-Newton iteration x_{k+1} = x_k - M^{-1} f(x_k);
/// with M = I that is the Picard iteration and with M = J(x_k) Newton.
/// Preconditioner failures are reported in the status, never thrown.
SolveReport paa_solve(const NonlinearProblem& problem, std::span<const double> x0,
                      const SolverConfig& config);

/// sum_i alpha_i x_i + beta * sum_i alpha_i F_i over the history window.
Vector anderson_update(const AAHistory& history, std::span<const double> alpha, double beta);

/// Closed-form step x_k - beta C_k F_k with
/// C_k = (1/beta) [(E_k + beta W_k)(W_k^T W_k)^{-1} W_k^T - beta I], built
/// from explicit difference matrices and the normal equations. Test oracle
/// for anderson_update; valid only for a fixed preconditioner. Throws
/// RankDeficient when W_k^T W_k cannot be factored.
Vector ck_step_oracle(const AAHistory& history, const FactoredPreconditioner& precond,
                      std::span<const double> f_k, double beta);

struct TheoremProbe {
  /// Power-iteration estimate of ||I - M^{-1} J(x)||_2.
  double contraction_estimate = 0.0;
  /// log e_{k+1} / log e_k for consecutive iterates with 0 < e < 1.
  std::vector<double> orders;
};

/// Probes the local contraction factor and, given iterates and a known
/// solution, the observed convergence orders.
TheoremProbe probe_theorem(const NonlinearProblem& problem, std::span<const double> x,
                           const FactoredPreconditioner& precond,
                           std::span<const Vector> iterates = {});

/// Observed orders from a sequence of iterates; pairs whose errors are not
/// in (0, 1) are skipped.
std::vector<double> observed_orders(std::span<const Vector> iterates,
                                    std::span<const double> solution);

/// Largest singular value of a dense matrix by power iteration on B^T B.
double spectral_norm_estimate(const DenseMatrix& b, std::size_t max_steps = 100,
                              double rel_tol = 1e-6);

}  // namespace paa
