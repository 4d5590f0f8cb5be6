#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qkd::detail {

// Neumaier-compensated accumulator. Order-sensitive like any float sum, so
// callers that need run-to-run determinism must feed it in a fixed order.
class NeumaierSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Fixed-order pairwise summation: the reduction tree depends only on the
// element order and count, never on thread partitioning.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBase = 64;
  if (xs.size() <= kBase) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace qkd::detail
