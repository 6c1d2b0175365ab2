#include "paa/solver.hpp"

#include <algorithm>
#include <utility>

#include "paa/errors.hpp"

namespace paa {

AAHistory::AAHistory(std::size_t window, bool keep_raw)
    : slots_(window + 1), keep_raw_(keep_raw) {}

void AAHistory::push(Vector x, Vector preconditioned, Vector raw) {
  if (x.size() != preconditioned.size())
    throw DimensionMismatch("AAHistory: iterate and residual lengths differ");
  if (count_ > 0 && x.size() != this->x(0).size())
    throw DimensionMismatch("AAHistory: dimension changed");
  if (keep_raw_ && raw.size() != x.size())
    throw DimensionMismatch("AAHistory: raw residual required");

  std::size_t target;
  if (count_ < slots_.size()) {
    target = (head_ + count_) % slots_.size();
    ++count_;
  } else {
    target = head_;
    head_ = (head_ + 1) % slots_.size();
  }
  slots_[target] = Entry{std::move(x), std::move(preconditioned),
                         keep_raw_ ? std::move(raw) : Vector{}};
}

std::size_t AAHistory::slot(std::size_t i) const {
  if (i >= count_) throw DimensionMismatch("AAHistory: index out of range");
  return (head_ + i) % slots_.size();
}

DenseMatrix AAHistory::preconditioned_columns() const {
  if (count_ == 0) return {};
  const std::size_t n = x(0).size();
  DenseMatrix out(n, count_);
  for (std::size_t j = 0; j < count_; ++j) {
    const Vector& F = preconditioned(j);
    std::copy(F.begin(), F.end(), out.col(j).begin());
  }
  return out;
}

}  // namespace paa
