#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "paa/errors.hpp"
#include "paa/preconditioner.hpp"

namespace paa {
namespace {

using Kind = PreconditionerKind;

TEST(Preconditioner, IdentityGivesNegatedResidual) {
  const auto p = make_trig(4);
  const auto m = build(Kind::constant(1.0), p, Vector(4, 0.3));
  const Vector f{1.5, -2.25, 0.0, 1e-300};
  EXPECT_EQ(m.apply(f), (Vector{-1.5, 2.25, -0.0, -1e-300}));
}

TEST(Preconditioner, ScalarTwo) {
  const auto p = make_trig(2);
  const auto m = build(Kind::constant(2.0), p, Vector(2, 0.0));
  EXPECT_EQ(m.apply(Vector{4.0, -2.0}), (Vector{-2.0, 1.0}));
}

TEST(Preconditioner, FullLinearPart) {
  const auto p = make_linear(DenseMatrix::from_rows({{2, 1}, {1, 3}}), Vector{0.0, 0.0});
  const auto m = build(Kind::linear_full(), p, Vector{0.0, 0.0});
  const Vector F = m.apply(Vector{-3.0, -4.0});
  EXPECT_NEAR(F[0], 1.0, 1e-15);
  EXPECT_NEAR(F[1], 1.0, 1e-15);
}

TEST(Preconditioner, DiagJacobianOnTrig) {
  const auto p = make_trig(5);
  const auto m = build(Kind::diag_jacobian(), p, *p.known_solution);
  const Vector d = m.dense().diag();
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_NEAR(d[i], static_cast<double>(i + 1) * std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Preconditioner, SingularFullJacobian) {
  EXPECT_THROW(build(Kind::full_jacobian(), make_kelley(0.0), Vector{1.0, 3.0}),
               SingularPreconditioner);
}

TEST(Preconditioner, ZeroDiagonalAndFloor) {
  const auto p = make_kelley(0.0);
  EXPECT_THROW(build(Kind::diag_jacobian(), p, Vector{1.0, 3.0}), SingularPreconditioner);
  const auto m = build(Kind::diag_jacobian(), p, Vector{1.0, 3.0}, 0, BuildOptions{true});
  EXPECT_EQ(m.dense().diag(), (Vector{1.0, kDiagFloor}));
}

TEST(Preconditioner, MissingLinearPart) {
  EXPECT_THROW(build(Kind::linear_full(), make_trig(3), Vector(3, 0.0)), MissingLinearPart);
  EXPECT_THROW(build(Kind::linear_diag(), make_kelley(0.0), Vector(2, 0.0)), MissingLinearPart);
}

TEST(Preconditioner, ApplyDimensionMismatch) {
  const auto m = build(Kind::full_jacobian(), make_trig(3), Vector(3, 0.5));
  EXPECT_THROW(m.apply(Vector{1.0}), DimensionMismatch);
}

TEST(Preconditioner, BlockPartitionWithRemainder) {
  const auto p = make_trig(7);
  const Vector x = oracle::random_vector(7, 3, 0.5, 1.0);
  const auto m = build(Kind::block_diag_jacobian(3), p, x);
  const auto& blocks = std::get<FactoredPreconditioner::Blocks>(m.data());
  ASSERT_EQ(blocks.factors.size(), 3u);
  EXPECT_EQ(blocks.factors[2].size(), 1u);
  const DenseMatrix jac = p.jacobian(x);
  const DenseMatrix dense = m.dense();
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t i = 0; i < 7; ++i) {
      const bool same_block = i / 3 == j / 3;
      EXPECT_NEAR(dense(i, j), same_block ? jac(i, j) : 0.0, 1e-14);
    }
}

TEST(Preconditioner, BlockExtremesMatchDiagAndFull) {
  const auto p = make_bratu(4, 6.0);
  const Vector x = oracle::random_vector(16, 8, 0.0, 1.0);
  const Vector f = oracle::random_vector(16, 9);

  const Vector by_block1 = build(Kind::block_diag_jacobian(1), p, x).apply(f);
  const Vector by_diag = build(Kind::diag_jacobian(), p, x).apply(f);
  EXPECT_EQ(by_block1, by_diag);

  const Vector by_blockn = build(Kind::block_diag_jacobian(16), p, x).apply(f);
  const Vector by_full = build(Kind::full_jacobian(), p, x).apply(f);
  EXPECT_LE(norm2(subtract(by_blockn, by_full)), 1e-12 * norm2(by_full));
}

TEST(Preconditioner, ApplyResidualBoundForEveryKind) {
  const std::vector<Kind> kinds = {Kind::constant(0.1),        Kind::diag_jacobian(),
                                   Kind::block_diag_jacobian(5), Kind::full_jacobian(),
                                   Kind::linear_full(),          Kind::linear_diag()};
  const std::vector<NonlinearProblem> problems = {make_bratu(5, 6.0), make_convdiff(5, 0.01, 3.0)};
  for (const auto& p : problems) {
    for (const auto& kind : kinds) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Vector x = oracle::random_vector(p.dimension, 10 + s, 0.0, 1.0);
        const Vector f = oracle::random_vector(p.dimension, 20 + s);
        const auto m = build(kind, p, x);
        const DenseMatrix dense = m.dense();
        const Vector F = m.apply(f);
        const Vector r = add(dense.multiply(F), f);
        EXPECT_LE(norm2(r), 1e-10 * (dense.frobenius_norm() * norm2(F) + norm2(f)))
            << p.name << " " << kind.to_string();
      }
    }
  }
}

TEST(Preconditioner, RecordsBuildIteration) {
  const auto m = build(Kind::diag_jacobian(), make_trig(3), Vector(3, 0.5), 7);
  EXPECT_EQ(m.build_iteration(), 7u);
}

TEST(DueForUpdate, Policy) {
  for (std::size_t n : {1u, 2u, 5u}) EXPECT_TRUE(due_for_update(0, n));
  for (std::size_t k = 0; k < 10; ++k) EXPECT_TRUE(due_for_update(k, 1));
  EXPECT_TRUE(due_for_update(2, 2));
  EXPECT_TRUE(due_for_update(4, 2));
  EXPECT_FALSE(due_for_update(1, 2));
  EXPECT_FALSE(due_for_update(3, 2));
  EXPECT_THROW(due_for_update(3, 0), InvalidSpec);
}

TEST(KindParsing, RoundTripAndErrors) {
  for (const char* text : {"const:0.1", "diag", "block:4", "full", "linfull", "lindiag"})
    EXPECT_EQ(Kind::parse(text).to_string(), text);
  EXPECT_EQ(Kind::parse("const:1").alpha, 1.0);
  EXPECT_EQ(Kind::parse("block:8").block, 8u);
  for (const char* bad : {"const:0", "const:", "const:x", "block:0", "block:-2", "diag:3", "lu", ""})
    EXPECT_THROW(Kind::parse(bad), InvalidSpec) << bad;
}

TEST(KindParsing, JacobianClassification) {
  EXPECT_TRUE(Kind::full_jacobian().uses_jacobian());
  EXPECT_TRUE(Kind::block_diag_jacobian(2).uses_jacobian());
  EXPECT_TRUE(Kind::diag_jacobian().uses_jacobian());
  EXPECT_TRUE(Kind::linear_full().is_constant());
  EXPECT_TRUE(Kind::linear_diag().is_constant());
  EXPECT_TRUE(Kind::constant(3.0).is_constant());
}

}  // namespace
}  // namespace paa
