#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "oracles.hpp"
#include "paa/errors.hpp"
#include "paa/problems.hpp"

namespace paa {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Kelley, PrimaryRootForAnyEps) {
  for (double eps : {0.0, 1e-6, 0.5}) {
    const auto p = make_kelley(eps);
    EXPECT_EQ(p.residual(Vector{1.0, 3.0}), (Vector{0.0, 0.0}));
    EXPECT_EQ(*p.known_solution, (Vector{1.0, 3.0}));
  }
}

TEST(Kelley, SecondRoot) {
  const double eps = 1e-6;
  const double eta = 1.0 - std::sqrt(1.0 + 2.0 * eps);
  const auto p = make_kelley(eps);
  EXPECT_LE(norm2(p.residual(Vector{1.0 - eta * eta, 3.0 + eta})), 1e-12);
}

TEST(Kelley, SingularJacobianAtRootWhenEpsZero) {
  const auto p = make_kelley(0.0);
  EXPECT_EQ(p.jacobian(Vector{1.0, 3.0}), DenseMatrix::from_rows({{1, 0}, {0, 0}}));
}

TEST(Trig, ManufacturedRoot) {
  for (std::size_t n : {1u, 5u, 50u}) {
    const auto p = make_trig(n);
    EXPECT_EQ(norm_inf(p.residual(*p.known_solution)), 0.0);
  }
}

TEST(Trig, DiagonalAtRoot) {
  const auto p = make_trig(5);
  const Vector d = p.jacobian_diag(*p.known_solution);
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_NEAR(d[i], static_cast<double>(i + 1) * std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Trig, HandEvaluatedScalarCase) {
  const auto p = make_trig(1);
  const double expected = -(2.0 - 3.0 * std::sqrt(2.0) / 2.0);
  EXPECT_NEAR(p.residual(Vector{0.0})[0], expected, 1e-15);
  EXPECT_NEAR(expected, 0.12132, 1e-5);
}

TEST(Trig, RejectsZeroDimension) { EXPECT_THROW(make_trig(0), InvalidSpec); }

TEST(Bratu, ZeroInput) {
  const std::size_t g = 6;
  const double lambda = 6.0;
  const double h = 1.0 / static_cast<double>(g + 1);
  const auto p = make_bratu(g, lambda);
  const Vector f = p.residual(Vector(g * g, 0.0));
  for (double v : f) EXPECT_DOUBLE_EQ(v, -h * h * lambda);

  DenseMatrix expected = *p.linear_part;
  for (std::size_t i = 0; i < g * g; ++i) expected(i, i) -= h * h * lambda;
  EXPECT_EQ(p.jacobian(Vector(g * g, 0.0)), expected);
}

TEST(Bratu, StencilRowSums) {
  const std::size_t g = 32;
  const DenseMatrix a = laplacian_5pt(g);
  auto row_sum = [&](std::size_t ix, std::size_t jy) {
    double s = 0.0;
    const std::size_t r = jy * g + ix;
    for (std::size_t c = 0; c < g * g; ++c) s += a(r, c);
    return s;
  };
  EXPECT_EQ(row_sum(0, 0), 2.0);
  EXPECT_EQ(row_sum(g - 1, g - 1), 2.0);
  EXPECT_EQ(row_sum(5, 0), 1.0);
  EXPECT_EQ(row_sum(5, 7), 0.0);
}

TEST(Bratu, LinearPartSymmetric) {
  const auto p = make_bratu(7, 6.0);
  EXPECT_EQ(*p.linear_part, p.linear_part->transpose());
}

// The eight symmetries of the square act on lexicographic grid fields.
Vector transform(const Vector& u, std::size_t g, int t) {
  Vector out(u.size());
  for (std::size_t jy = 0; jy < g; ++jy)
    for (std::size_t ix = 0; ix < g; ++ix) {
      std::size_t a = ix, b = jy;
      if (t & 1) a = g - 1 - a;
      if (t & 2) b = g - 1 - b;
      if (t & 4) std::swap(a, b);
      out[b * g + a] = u[jy * g + ix];
    }
  return out;
}

TEST(Bratu, DihedralEquivariance) {
  const std::size_t g = 9;
  const auto p = make_bratu(g, 6.0);
  const Vector u = oracle::random_vector(g * g, 77, -1.0, 1.0);
  const Vector fu = p.residual(u);
  for (int t = 0; t < 8; ++t) {
    const Vector lhs = p.residual(transform(u, g, t));
    const Vector rhs = transform(fu, g, t);
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-14) << t;
  }
  // A symmetric field yields a symmetric residual.
  Vector sym(g * g, 0.0);
  for (int t = 0; t < 8; ++t) {
    const Vector tu = transform(u, g, t);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] += tu[i] / 8.0;
  }
  const Vector fs = p.residual(sym);
  for (int t = 0; t < 8; ++t) {
    const Vector tf = transform(fs, g, t);
    for (std::size_t i = 0; i < fs.size(); ++i) EXPECT_NEAR(tf[i], fs[i], 1e-14);
  }
}

TEST(ConvDiff, ZeroInputIsScaledSource) {
  const std::size_t g = 5;
  const double h = 1.0 / 6.0;
  const auto p = make_convdiff(g, 0.1, 3.0);
  const Vector f = p.residual(Vector(g * g, 0.0));
  for (std::size_t jy = 0; jy < g; ++jy)
    for (std::size_t ix = 0; ix < g; ++ix) {
      const double x = static_cast<double>(ix + 1) * h;
      const double y = static_cast<double>(jy + 1) * h;
      EXPECT_NEAR(f[jy * g + ix], -h * h * 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y),
                  1e-15);
    }
}

TEST(ConvDiff, CentreSourceOnOddGrid) {
  const std::size_t g = 3;
  const double h = 0.25;
  const auto p = make_convdiff(g, 0.1, 3.0);
  EXPECT_NEAR(p.residual(Vector(g * g, 0.0))[4], -h * h * 2.0 * kPi * kPi, 1e-14);
}

TEST(ConvDiff, NonlinearJacobianTerm) {
  const std::size_t g = 4;
  const double k = 3.0;
  const double h = 0.2;
  const auto p = make_convdiff(g, 0.01, k);
  const DenseMatrix j = p.jacobian(Vector(g * g, 1.0));
  for (std::size_t i = 0; i < g * g; ++i)
    EXPECT_NEAR(j(i, i) - (*p.linear_part)(i, i), 2.0 * h * h * k, 1e-15);
}

TEST(ConvDiff, LinearPartSymmetricPart) {
  const std::size_t g = 6;
  const double eps = 0.01;
  const auto p = make_convdiff(g, eps, 3.0);
  const DenseMatrix& l = *p.linear_part;
  EXPECT_NE(l, l.transpose());
  const DenseMatrix sym = 0.5 * (l + l.transpose());
  EXPECT_LE((sym - eps * laplacian_5pt(g)).max_abs(), 1e-16);
}

TEST(ConvDiff, RejectsNonPositiveEps) { EXPECT_THROW(make_convdiff(4, 0.0, 3.0), InvalidSpec); }

TEST(Problems, AnalyticJacobiansMatchFiniteDifferences) {
  const std::vector<std::pair<NonlinearProblem, std::function<Vector(std::uint64_t)>>> cases = {
      {make_kelley(0.0),
       [](std::uint64_t s) { return random_guess({{-1.0, 1.0}, {3.0, 5.0}, s}); }},
      {make_kelley(1e-6),
       [](std::uint64_t s) { return random_guess({{-1.0, 1.0}, {3.0, 5.0}, s}); }},
      {make_trig(7), [](std::uint64_t s) { return oracle::random_vector(7, s, -2.0, 2.0); }},
      {make_bratu(6, 6.0), [](std::uint64_t s) { return oracle::random_vector(36, s, 0.0, 2.0); }},
      {make_convdiff(6, 0.01, 3.0),
       [](std::uint64_t s) { return oracle::random_vector(36, s, -1.0, 2.0); }},
  };
  for (const auto& [p, sample] : cases) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Vector x = sample(s);
      const DenseMatrix ja = p.jacobian(x);
      const DenseMatrix jf = fd_jacobian(p.residual, x);
      EXPECT_LE((ja - jf).frobenius_norm(), 1e-5 * (1.0 + ja.frobenius_norm())) << p.name;
      const Vector d = p.jacobian_diag(x);
      for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], ja(i, i), 1e-14) << p.name;
    }
  }
}

TEST(RandomGuess, DegenerateBox) {
  const InitialGuessBox box{{2.5, -1.0}, {2.5, -1.0}, 9};
  EXPECT_EQ(random_guess(box), (Vector{2.5, -1.0}));
}

TEST(RandomGuess, DeterministicUnderSeed) {
  const auto box = InitialGuessBox::uniform(20, -1.0, 3.0, 1234);
  EXPECT_EQ(random_guess(box), random_guess(box));
  auto other = box;
  other.seed = 1235;
  EXPECT_NE(random_guess(box), random_guess(other));
}

TEST(RandomGuess, TrigBoxBounds) {
  const double c = kPi / 4.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Vector x = random_guess(InitialGuessBox::uniform(50, c - 0.05, c + 0.05, s));
    for (double v : x) {
      EXPECT_GE(v, c - 0.05);
      EXPECT_LT(v, c + 0.05);
    }
  }
}

TEST(RandomGuess, InvertedBoxRejected) {
  EXPECT_THROW(random_guess({{1.0}, {0.0}, 0}), InvalidSpec);
}

TEST(Registry, BuildsByName) {
  EXPECT_EQ(make_problem("kelley", {{"eps", "0"}}).dimension, 2u);
  EXPECT_EQ(make_problem("trig", {{"n", "12"}}).dimension, 12u);
  EXPECT_EQ(make_problem("bratu", {{"grid", "4"}, {"lambda", "1"}}).dimension, 16u);
  EXPECT_EQ(make_problem("convdiff", {{"grid", "3"}}).dimension, 9u);
  EXPECT_EQ(list_problems().size(), 4u);
}

TEST(Registry, Errors) {
  EXPECT_THROW(make_problem("nope", {}), InvalidSpec);
  EXPECT_THROW(make_problem("trig", {{"size", "3"}}), InvalidSpec);
  EXPECT_THROW(make_problem("trig", {{"n", "three"}}), InvalidSpec);
  EXPECT_THROW(make_problem("bratu", {{"grid", "1"}}), InvalidSpec);
}

TEST(Registry, DefaultGuesses) {
  const auto kelley = default_guess(make_kelley(0.0));
  ASSERT_TRUE(kelley.box);
  EXPECT_EQ(kelley.box->lower, (Vector{-1.0, 1.0}));
  EXPECT_EQ(kelley.box->upper, (Vector{3.0, 5.0}));
  const auto bratu = default_guess(make_bratu(4, 6.0));
  ASSERT_TRUE(bratu.fixed);
  EXPECT_EQ(*bratu.fixed, Vector(16, 1.0));
}

}  // namespace
}  // namespace paa
