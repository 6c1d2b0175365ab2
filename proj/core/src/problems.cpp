#include "paa/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "paa/errors.hpp"

namespace paa {

DenseMatrix NonlinearProblem::jacobian_at(std::span<const double> x) const {
  if (jacobian) return jacobian(x);
  return fd_jacobian(residual, x);
}

Vector NonlinearProblem::jacobian_diag_at(std::span<const double> x) const {
  if (jacobian_diag) return jacobian_diag(x);
  return jacobian_at(x).diag();
}

InitialGuessBox InitialGuessBox::uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  return {Vector(n, lo), Vector(n, hi), seed};
}

NonlinearProblem make_kelley(double eps) {
  NonlinearProblem p;
  p.name = "kelley";
  p.dimension = 2;
  p.residual = [eps](std::span<const double> x) {
    const double a = x[0] - 1.0;
    const double b = x[1] - 3.0;
    return Vector{a + b * b, eps * b + 1.5 * a * b + b * b + b * b * b};
  };
  p.jacobian = [eps](std::span<const double> x) {
    const double a = x[0] - 1.0;
    const double b = x[1] - 3.0;
    return DenseMatrix::from_rows(
        {{1.0, 2.0 * b}, {1.5 * b, eps + 1.5 * a + 2.0 * b + 3.0 * b * b}});
  };
  p.jacobian_diag = [eps](std::span<const double> x) {
    const double a = x[0] - 1.0;
    const double b = x[1] - 3.0;
    return Vector{1.0, eps + 1.5 * a + 2.0 * b + 3.0 * b * b};
  };
  p.known_solution = Vector{1.0, 3.0};
  return p;
}

namespace {

// h_i(x) for i = 1..n stored at index i-1.
Vector trig_h(std::span<const double> x) {
  const std::size_t n = x.size();
  double cos_sum = 0.0;
  for (double v : x) cos_sum += std::cos(v);
  Vector h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k + 1);
    h[k] = static_cast<double>(n) - cos_sum + i * (1.0 - std::cos(x[k])) - std::sin(x[k]);
  }
  return h;
}

}  // namespace

NonlinearProblem make_trig(std::size_t n) {
  if (n == 0) throw InvalidSpec("make_trig: n must be at least 1");
  const Vector star(n, std::numbers::pi / 4.0);
  auto h_star = std::make_shared<const Vector>(trig_h(star));

  NonlinearProblem p;
  p.name = "trig";
  p.dimension = n;
  p.residual = [h_star](std::span<const double> x) {
    Vector f = trig_h(x);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] -= (*h_star)[k];
    return f;
  };
  p.jacobian = [](std::span<const double> x) {
    const std::size_t n = x.size();
    DenseMatrix j(n, n);
    for (std::size_t c = 0; c < n; ++c) {
      const double s = std::sin(x[c]);
      for (std::size_t r = 0; r < n; ++r) j(r, c) = s;
      j(c, c) = (static_cast<double>(c) + 2.0) * s - std::cos(x[c]);
    }
    return j;
  };
  p.jacobian_diag = [](std::span<const double> x) {
    Vector d(x.size());
    for (std::size_t c = 0; c < x.size(); ++c)
      d[c] = (static_cast<double>(c) + 2.0) * std::sin(x[c]) - std::cos(x[c]);
    return d;
  };
  p.known_solution = star;
  return p;
}

DenseMatrix laplacian_5pt(std::size_t grid_n) {
  const std::size_t n = grid_n * grid_n;
  DenseMatrix a(n, n);
  for (std::size_t jy = 0; jy < grid_n; ++jy) {
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      const std::size_t row = jy * grid_n + ix;
      a(row, row) = 4.0;
      if (ix > 0) a(row, row - 1) = -1.0;
      if (ix + 1 < grid_n) a(row, row + 1) = -1.0;
      if (jy > 0) a(row, row - grid_n) = -1.0;
      if (jy + 1 < grid_n) a(row, row + grid_n) = -1.0;
    }
  }
  return a;
}

DenseMatrix convection_5pt(std::size_t grid_n) {
  const std::size_t n = grid_n * grid_n;
  DenseMatrix d(n, n);
  for (std::size_t jy = 0; jy < grid_n; ++jy) {
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      const std::size_t row = jy * grid_n + ix;
      if (ix + 1 < grid_n) d(row, row + 1) = 1.0;
      if (ix > 0) d(row, row - 1) = -1.0;
      if (jy + 1 < grid_n) d(row, row + grid_n) = 1.0;
      if (jy > 0) d(row, row - grid_n) = -1.0;
    }
  }
  return d;
}

namespace {

// (A u) for the 5-point stencil, and (D u) for the centred convection stencil,
// evaluated without touching the dense matrices.
void apply_stencils(std::size_t g, std::span<const double> u, std::span<double> lap,
                    std::span<double> conv) {
  for (std::size_t jy = 0; jy < g; ++jy) {
    for (std::size_t ix = 0; ix < g; ++ix) {
      const std::size_t k = jy * g + ix;
      const double w = ix > 0 ? u[k - 1] : 0.0;
      const double e = ix + 1 < g ? u[k + 1] : 0.0;
      const double s = jy > 0 ? u[k - g] : 0.0;
      const double nn = jy + 1 < g ? u[k + g] : 0.0;
      lap[k] = 4.0 * u[k] - w - e - s - nn;
      if (!conv.empty()) conv[k] = (e - w) + (nn - s);
    }
  }
}

void check_grid(std::size_t grid_n, const char* who) {
  if (grid_n < 2) throw InvalidSpec(std::string(who) + ": grid must be at least 2");
}

}  // namespace

NonlinearProblem make_bratu(std::size_t grid_n, double lambda) {
  check_grid(grid_n, "make_bratu");
  const std::size_t n = grid_n * grid_n;
  const double h = 1.0 / static_cast<double>(grid_n + 1);
  const double c = h * h * lambda;
  auto a = std::make_shared<const DenseMatrix>(laplacian_5pt(grid_n));

  NonlinearProblem p;
  p.name = "bratu";
  p.dimension = n;
  p.residual = [grid_n, c](std::span<const double> u) {
    Vector f(u.size());
    apply_stencils(grid_n, u, f, {});
    for (std::size_t k = 0; k < f.size(); ++k) f[k] -= c * std::exp(u[k]);
    return f;
  };
  p.jacobian = [a, c](std::span<const double> u) {
    DenseMatrix j = *a;
    for (std::size_t k = 0; k < u.size(); ++k) j(k, k) -= c * std::exp(u[k]);
    return j;
  };
  p.jacobian_diag = [c](std::span<const double> u) {
    Vector d(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d[k] = 4.0 - c * std::exp(u[k]);
    return d;
  };
  p.linear_part = std::move(a);
  return p;
}

NonlinearProblem make_convdiff(std::size_t grid_n, double eps, double k) {
  check_grid(grid_n, "make_convdiff");
  if (!(eps > 0.0)) throw InvalidSpec("make_convdiff: eps must be positive");
  const std::size_t n = grid_n * grid_n;
  const double h = 1.0 / static_cast<double>(grid_n + 1);
  const double h2 = h * h;
  const double pi = std::numbers::pi;

  auto source = std::make_shared<Vector>(n);
  for (std::size_t jy = 0; jy < grid_n; ++jy)
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      const double x = static_cast<double>(ix + 1) * h;
      const double y = static_cast<double>(jy + 1) * h;
      (*source)[jy * grid_n + ix] = 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y);
    }

  DenseMatrix lin = eps * laplacian_5pt(grid_n);
  lin += (0.5 * h) * convection_5pt(grid_n);
  auto linear = std::make_shared<const DenseMatrix>(std::move(lin));

  NonlinearProblem p;
  p.name = "convdiff";
  p.dimension = n;
  p.residual = [grid_n, eps, k, h, h2, source](std::span<const double> u) {
    Vector lap(u.size());
    Vector conv(u.size());
    apply_stencils(grid_n, u, lap, conv);
    Vector f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = eps * lap[i] + 0.5 * h * conv[i] + h2 * k * u[i] * u[i] - h2 * (*source)[i];
    return f;
  };
  p.jacobian = [linear, k, h2](std::span<const double> u) {
    DenseMatrix j = *linear;
    for (std::size_t i = 0; i < u.size(); ++i) j(i, i) += 2.0 * h2 * k * u[i];
    return j;
  };
  p.jacobian_diag = [eps, k, h2](std::span<const double> u) {
    Vector d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = 4.0 * eps + 2.0 * h2 * k * u[i];
    return d;
  };
  p.linear_part = std::move(linear);
  return p;
}

NonlinearProblem make_linear(DenseMatrix a, Vector b, std::string name) {
  if (!a.square() || a.rows() != b.size())
    throw DimensionMismatch("make_linear: A must be square and match b");
  auto mat = std::make_shared<const DenseMatrix>(std::move(a));
  auto rhs = std::make_shared<const Vector>(std::move(b));

  NonlinearProblem p;
  p.name = std::move(name);
  p.dimension = rhs->size();
  p.residual = [mat, rhs](std::span<const double> x) {
    Vector f = mat->multiply(x);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= (*rhs)[i];
    return f;
  };
  p.jacobian = [mat](std::span<const double>) { return *mat; };
  p.jacobian_diag = [mat](std::span<const double>) { return mat->diag(); };
  p.linear_part = std::move(mat);
  return p;
}

Vector random_guess(const InitialGuessBox& box) {
  if (box.lower.size() != box.upper.size())
    throw DimensionMismatch("random_guess: bounds have different lengths");
  std::mt19937_64 gen(box.seed);
  Vector x(box.lower.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (box.lower[j] > box.upper[j]) throw InvalidSpec("random_guess: lower bound exceeds upper");
    // 53 random mantissa bits, u in [0, 1); independent of the library's distributions
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    x[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * u;
  }
  return x;
}

namespace {

double param_real(const ProblemParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw InvalidSpec("parameter '" + key + "' is not a number: " + it->second);
  }
}

std::size_t param_count(const ProblemParams& params, const std::string& key,
                        std::size_t fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size() || v < 0) throw std::invalid_argument(it->second);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InvalidSpec("parameter '" + key + "' is not a non-negative integer: " + it->second);
  }
}

void check_keys(const std::string& name, const ProblemParams& params,
                std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : params)
    if (!ok.contains(key)) throw InvalidSpec("problem '" + name + "' has no parameter '" + key + "'");
}

}  // namespace

NonlinearProblem make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "kelley") {
    check_keys(name, params, {"eps"});
    return make_kelley(param_real(params, "eps", 1e-6));
  }
  if (name == "trig") {
    check_keys(name, params, {"n"});
    return make_trig(param_count(params, "n", 50));
  }
  if (name == "bratu") {
    check_keys(name, params, {"grid", "lambda"});
    return make_bratu(param_count(params, "grid", 32), param_real(params, "lambda", 6.0));
  }
  if (name == "convdiff") {
    check_keys(name, params, {"grid", "eps", "k"});
    return make_convdiff(param_count(params, "grid", 32), param_real(params, "eps", 0.01),
                         param_real(params, "k", 3.0));
  }
  throw InvalidSpec("unknown problem '" + name + "'");
}

std::vector<ProblemInfo> list_problems() {
  return {
      {"kelley", "eps=1e-6", "2-D polynomial system with a (near-)singular root at (1, 3)"},
      {"trig", "n=50", "trigonometric system with manufactured root pi/4 * ones"},
      {"bratu", "grid=32 lambda=6", "Bratu problem on grid x grid interior nodes"},
      {"convdiff", "grid=32 eps=0.01 k=3", "nonlinear convection-diffusion, centred differences"},
  };
}

DefaultGuess default_guess(const NonlinearProblem& problem) {
  const std::size_t n = problem.dimension;
  if (problem.name == "kelley") return {InitialGuessBox{{-1.0, 1.0}, {3.0, 5.0}, 0}, {}};
  if (problem.name == "trig") {
    const double c = std::numbers::pi / 4.0;
    return {InitialGuessBox::uniform(n, c - 0.05, c + 0.05), {}};
  }
  return {{}, Vector(n, 1.0)};
}

}  // namespace paa
