#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paa/dense_matrix.hpp"
#include "paa/linalg.hpp"

namespace paa {

using JacobianFn = std::function<DenseMatrix(std::span<const double>)>;
using DiagonalFn = std::function<Vector(std::span<const double>)>;

/// A square nonlinear system f(x) = 0 together with whatever structure the
/// preconditioners can exploit. Immutable after construction; the linear
/// part is shared so copies stay cheap.
struct NonlinearProblem {
  std::string name;
  std::size_t dimension = 0;
  ResidualFn residual;
  JacobianFn jacobian;        // empty when no analytic Jacobian exists
  DiagonalFn jacobian_diag;   // empty when no analytic diagonal exists
  std::shared_ptr<const DenseMatrix> linear_part;
  std::optional<Vector> known_solution;

  bool has_jacobian() const noexcept { return static_cast<bool>(jacobian); }
  bool has_jacobian_diag() const noexcept { return static_cast<bool>(jacobian_diag); }

  /// Analytic Jacobian when available, finite differences otherwise.
  DenseMatrix jacobian_at(std::span<const double> x) const;
  Vector jacobian_diag_at(std::span<const double> x) const;
};

/// Box of initial guesses, sampled uniformly per coordinate.
struct InitialGuessBox {
  Vector lower;
  Vector upper;
  std::uint64_t seed = 0;

  static InitialGuessBox uniform(std::size_t n, double lo, double hi, std::uint64_t seed = 0);
};

/// Two-dimensional polynomial system with roots (1, 3) and
/// (1 - eta^2, 3 + eta), eta = 1 - sqrt(1 + 2 eps).
NonlinearProblem make_kelley(double eps);

/// Trigonometric system f_i(x) = h_i(x) - h_i(pi/4) with
/// h_i(x) = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i.
NonlinearProblem make_trig(std::size_t n);

/// Bratu problem -Laplace(u) = lambda exp(u) on the unit square with zero
/// Dirichlet data, scaled by h^2. grid_n x grid_n interior unknowns,
/// lexicographic ordering (x index fastest).
NonlinearProblem make_bratu(std::size_t grid_n, double lambda);

/// Steady convection-diffusion eps*(-Laplace u) + u_x + u_y + k u^2 = f with
/// f = 2 pi^2 sin(pi x) sin(pi y), centred differences, scaled by h^2.
NonlinearProblem make_convdiff(std::size_t grid_n, double eps, double k);

/// f(x) = A x - b. Exposes A both as Jacobian and as linear part.
NonlinearProblem make_linear(DenseMatrix a, Vector b, std::string name = "linear");

/// Unscaled 5-point stencil of -h^2 Laplace (4 on the diagonal, -1 per
/// interior neighbour).
DenseMatrix laplacian_5pt(std::size_t grid_n);
/// Centred first-derivative stencil (u_E - u_W) + (u_N - u_S).
DenseMatrix convection_5pt(std::size_t grid_n);

Vector random_guess(const InitialGuessBox& box);

using ProblemParams = std::map<std::string, std::string>;

/// Builds a problem by registry name ("kelley", "trig", "bratu", "convdiff").
/// Recognised keys: kelley: eps; trig: n; bratu: grid, lambda;
/// convdiff: grid, eps, k. Throws InvalidSpec on unknown names or keys.
NonlinearProblem make_problem(const std::string& name, const ProblemParams& params);

struct ProblemInfo {
  std::string name;
  std::string parameters;
  std::string description;
};
std::vector<ProblemInfo> list_problems();

/// Default starting point policy for a registered problem: either a box to
/// sample from, or a fixed x0.
struct DefaultGuess {
  std::optional<InitialGuessBox> box;
  std::optional<Vector> fixed;
};
DefaultGuess default_guess(const NonlinearProblem& problem);

}  // namespace paa
