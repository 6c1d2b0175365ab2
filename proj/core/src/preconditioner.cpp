#include "paa/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "paa/errors.hpp"

namespace paa {

PreconditionerKind PreconditionerKind::constant(double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw InvalidSpec("constant preconditioner needs a finite non-zero alpha");
  return {Type::ConstantScalar, alpha, 1};
}

PreconditionerKind PreconditionerKind::block_diag_jacobian(std::size_t block) {
  if (block == 0) throw InvalidSpec("block preconditioner needs block size >= 1");
  return {Type::BlockDiagJacobian, 1.0, block};
}

PreconditionerKind PreconditionerKind::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw InvalidSpec("preconditioner '" + text + "' needs an argument");
  };
  auto no_arg = [&] {
    if (colon != std::string::npos)
      throw InvalidSpec("preconditioner '" + head + "' takes no argument");
  };
  try {
    if (head == "const") {
      need_arg();
      std::size_t used = 0;
      const double a = std::stod(arg, &used);
      if (used != arg.size()) throw InvalidSpec("bad constant: " + arg);
      return constant(a);
    }
    if (head == "block") {
      need_arg();
      std::size_t used = 0;
      const long long b = std::stoll(arg, &used);
      if (used != arg.size() || b < 1) throw InvalidSpec("bad block size: " + arg);
      return block_diag_jacobian(static_cast<std::size_t>(b));
    }
  } catch (const std::logic_error&) {
    throw InvalidSpec("cannot parse preconditioner '" + text + "'");
  }
  no_arg();
  if (head == "diag") return diag_jacobian();
  if (head == "full") return full_jacobian();
  if (head == "linfull") return linear_full();
  if (head == "lindiag") return linear_diag();
  throw InvalidSpec("unknown preconditioner '" + text + "'");
}

std::string PreconditionerKind::to_string() const {
  switch (type) {
    case Type::ConstantScalar: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "const:%g", alpha);
      return buf;
    }
    case Type::DiagJacobian: return "diag";
    case Type::BlockDiagJacobian: return "block:" + std::to_string(block);
    case Type::FullJacobian: return "full";
    case Type::LinearPartFull: return "linfull";
    case Type::LinearPartDiag: return "lindiag";
  }
  return "?";
}

bool PreconditionerKind::uses_jacobian() const noexcept {
  return type == Type::DiagJacobian || type == Type::BlockDiagJacobian ||
         type == Type::FullJacobian;
}

FactoredPreconditioner::FactoredPreconditioner(PreconditionerKind kind, Data data,
                                               std::size_t dimension, std::size_t build_iteration)
    : kind_(kind), data_(std::move(data)), dimension_(dimension), build_iteration_(build_iteration) {}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Reassembles P^T L U.
DenseMatrix reassemble(const LUFactors& f) {
  const std::size_t n = f.size();
  DenseMatrix l = DenseMatrix::identity(n);
  DenseMatrix u(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) (i > j ? l(i, j) : u(i, j)) = f.lu(i, j);
  DenseMatrix m = l.multiply(u);
  for (std::size_t k = n; k-- > 0;)
    if (f.pivots[k] != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(f.pivots[k], j));
  return m;
}

}  // namespace

Vector FactoredPreconditioner::apply(std::span<const double> f) const {
  if (f.size() != dimension_)
    throw DimensionMismatch("preconditioner apply: residual has length " +
                            std::to_string(f.size()) + ", expected " +
                            std::to_string(dimension_));
  return std::visit(
      overloaded{
          [&](const Scalar& s) {
            Vector out(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) out[i] = -f[i] / s.alpha;
            return out;
          },
          [&](const Diagonal& d) {
            Vector out(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) out[i] = -f[i] / d.d[i];
            return out;
          },
          [&](const Blocks& b) {
            Vector out(f.size());
            std::size_t start = 0;
            for (const auto& lu : b.factors) {
              const std::size_t len = lu.size();
              Vector rhs(len);
              for (std::size_t i = 0; i < len; ++i) rhs[i] = -f[start + i];
              const Vector x = lu_solve(lu, rhs);
              std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
              start += len;
            }
            return out;
          },
          [&](const Full& full) {
            Vector out = lu_solve(full.factors, f);
            for (double& v : out) v = -v;
            return out;
          },
      },
      data_);
}

DenseMatrix FactoredPreconditioner::dense() const {
  return std::visit(
      overloaded{
          [&](const Scalar& s) { return s.alpha * DenseMatrix::identity(dimension_); },
          [&](const Diagonal& d) { return DenseMatrix::diagonal(d.d); },
          [&](const Blocks& b) {
            DenseMatrix m(dimension_, dimension_);
            std::size_t start = 0;
            for (const auto& lu : b.factors) {
              const DenseMatrix blk = reassemble(lu);
              for (std::size_t j = 0; j < blk.cols(); ++j)
                for (std::size_t i = 0; i < blk.rows(); ++i) m(start + i, start + j) = blk(i, j);
              start += lu.size();
            }
            return m;
          },
          [&](const Full& full) { return reassemble(full.factors); },
      },
      data_);
}

namespace {

Vector checked_diagonal(Vector d, const BuildOptions& options, const char* what) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]))
      throw SingularPreconditioner(std::string(what) + ": non-finite diagonal entry " +
                                   std::to_string(i));
    if (options.diag_floor && std::abs(d[i]) < kDiagFloor) {
      d[i] = d[i] < 0.0 ? -kDiagFloor : kDiagFloor;
    } else if (d[i] == 0.0) {
      throw SingularPreconditioner(std::string(what) + ": zero diagonal entry " +
                                   std::to_string(i));
    }
  }
  return d;
}

LUFactors checked_lu(const DenseMatrix& m, const char* what) {
  try {
    return lu_factor(m);
  } catch (const SingularMatrix& e) {
    throw SingularPreconditioner(std::string(what) + ": " + e.what());
  } catch (const NonFiniteEvaluation& e) {
    throw SingularPreconditioner(std::string(what) + ": " + e.what());
  }
}

const DenseMatrix& require_linear_part(const NonlinearProblem& problem) {
  if (!problem.linear_part)
    throw MissingLinearPart("problem '" + problem.name + "' exposes no linear part");
  return *problem.linear_part;
}

}  // namespace

FactoredPreconditioner build(const PreconditionerKind& kind, const NonlinearProblem& problem,
                             std::span<const double> x, std::size_t iteration,
                             const BuildOptions& options) {
  using Type = PreconditionerKind::Type;
  const std::size_t n = problem.dimension;
  if (x.size() != n) throw DimensionMismatch("build: point has wrong dimension");

  switch (kind.type) {
    case Type::ConstantScalar:
      if (kind.alpha == 0.0) throw SingularPreconditioner("constant preconditioner with alpha 0");
      return {kind, FactoredPreconditioner::Scalar{kind.alpha}, n, iteration};

    case Type::DiagJacobian:
      return {kind,
              FactoredPreconditioner::Diagonal{
                  checked_diagonal(problem.jacobian_diag_at(x), options, "diagonal Jacobian")},
              n, iteration};

    case Type::BlockDiagJacobian: {
      if (kind.block == 0 || kind.block > n)
        throw InvalidSpec("block size must lie in [1, n]");
      const DenseMatrix jac = problem.jacobian_at(x);
      FactoredPreconditioner::Blocks blocks{kind.block, {}};
      for (std::size_t start = 0; start < n; start += kind.block) {
        const std::size_t len = std::min(kind.block, n - start);
        DenseMatrix blk(len, len);
        for (std::size_t j = 0; j < len; ++j)
          for (std::size_t i = 0; i < len; ++i) blk(i, j) = jac(start + i, start + j);
        blocks.factors.push_back(checked_lu(blk, "block-diagonal Jacobian"));
      }
      return {kind, std::move(blocks), n, iteration};
    }

    case Type::FullJacobian:
      return {kind,
              FactoredPreconditioner::Full{checked_lu(problem.jacobian_at(x), "full Jacobian")},
              n, iteration};

    case Type::LinearPartFull:
      return {kind,
              FactoredPreconditioner::Full{checked_lu(require_linear_part(problem), "linear part")},
              n, iteration};

    case Type::LinearPartDiag:
      return {kind,
              FactoredPreconditioner::Diagonal{
                  checked_diagonal(require_linear_part(problem).diag(), options, "linear part")},
              n, iteration};
  }
  throw InvalidSpec("unknown preconditioner kind");
}

bool due_for_update(std::size_t k, std::size_t n_update) {
  if (n_update == 0) throw InvalidSpec("n_update must be at least 1");
  return k % n_update == 0;
}

}  // namespace paa
