#pragma once

#include <cmath>
#include <complex>
#include <span>

namespace barnes {

/// Neumaier-compensated accumulator. The running error term is folded back in
/// on read, so large cancellations between a few big terms do not wipe out the
/// small ones.
class Accumulator {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  Accumulator& operator+=(double v) noexcept {
    add(v);
    return *this;
  }

  Accumulator& operator+=(const Accumulator& other) noexcept {
    add(other.sum_);
    add(other.comp_);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexAccumulator {
 public:
  void add(std::complex<double> v) noexcept {
    re_.add(v.real());
    im_.add(v.imag());
  }

  ComplexAccumulator& operator+=(std::complex<double> v) noexcept {
    add(v);
    return *this;
  }

  ComplexAccumulator& operator+=(const ComplexAccumulator& other) noexcept {
    re_ += other.re_;
    im_ += other.im_;
    return *this;
  }

  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  Accumulator re_;
  Accumulator im_;
};

/// Pairwise tree reduction of per-block partial sums. The result depends only on
/// the order of `parts`, never on how they were produced.
inline ComplexAccumulator pairwise_reduce(std::span<const ComplexAccumulator> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts.front();
  const auto half = parts.size() / 2;
  auto left = pairwise_reduce(parts.first(half));
  left += pairwise_reduce(parts.subspan(half));
  return left;
}

}  // namespace barnes
