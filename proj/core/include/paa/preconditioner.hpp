#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "paa/dense_matrix.hpp"
#include "paa/linalg.hpp"
#include "paa/problems.hpp"

namespace paa {

/// Which matrix M_k is used to precondition the residual.
struct PreconditionerKind {
  enum class Type {
    ConstantScalar,     // M = alpha I
    DiagJacobian,       // M = diag(J(x))
    BlockDiagJacobian,  // M = contiguous diagonal blocks of J(x)
    FullJacobian,       // M = J(x)
    LinearPartFull,     // M = A
    LinearPartDiag,     // M = diag(A)
  };

  Type type = Type::ConstantScalar;
  double alpha = 1.0;
  std::size_t block = 1;

  static PreconditionerKind constant(double alpha);
  static PreconditionerKind diag_jacobian() { return {Type::DiagJacobian}; }
  static PreconditionerKind block_diag_jacobian(std::size_t block);
  static PreconditionerKind full_jacobian() { return {Type::FullJacobian}; }
  static PreconditionerKind linear_full() { return {Type::LinearPartFull}; }
  static PreconditionerKind linear_diag() { return {Type::LinearPartDiag}; }

  /// Parses "const:<alpha>", "diag", "block:<b>", "full", "linfull", "lindiag".
  static PreconditionerKind parse(const std::string& text);
  std::string to_string() const;

  /// True when building requires evaluating (part of) the Jacobian.
  bool uses_jacobian() const noexcept;
  /// True when M does not depend on x, so one build serves a whole solve.
  bool is_constant() const noexcept { return !uses_jacobian(); }

  friend bool operator==(const PreconditionerKind&, const PreconditionerKind&) = default;
};

struct BuildOptions {
  /// Clamp diagonal entries with magnitude below kDiagFloor to +-kDiagFloor
  /// instead of failing.
  bool diag_floor = false;
};

inline constexpr double kDiagFloor = 1e-12;

/// A built and factored M_k. Immutable; apply() is reentrant.
class FactoredPreconditioner {
 public:
  struct Scalar {
    double alpha;
  };
  struct Diagonal {
    Vector d;
  };
  struct Blocks {
    std::size_t block;
    std::vector<LUFactors> factors;
  };
  struct Full {
    LUFactors factors;
  };
  using Data = std::variant<Scalar, Diagonal, Blocks, Full>;

  FactoredPreconditioner(PreconditionerKind kind, Data data, std::size_t dimension,
                         std::size_t build_iteration);

  /// Returns the preconditioned residual F solving M F = -f.
  Vector apply(std::span<const double> f) const;

  /// M reassembled as a dense matrix, for verification.
  DenseMatrix dense() const;

  const PreconditionerKind& kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t build_iteration() const noexcept { return build_iteration_; }
  const Data& data() const noexcept { return data_; }

 private:
  PreconditionerKind kind_;
  Data data_;
  std::size_t dimension_;
  std::size_t build_iteration_;
};

/// Builds M for `kind` at the point x. Throws SingularPreconditioner or
/// MissingLinearPart.
FactoredPreconditioner build(const PreconditionerKind& kind, const NonlinearProblem& problem,
                             std::span<const double> x, std::size_t iteration = 0,
                             const BuildOptions& options = {});

/// Preconditioner refresh policy: true iff k is a multiple of n_update.
bool due_for_update(std::size_t k, std::size_t n_update);

}  // namespace paa
