#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace barnes::detail {

using Complex = std::complex<double>;

struct EmValue {
  Complex value;
  double err = 0.0;
};

/// Nested Euler–Maclaurin summation of Z_j(s, b) = Σ_{m in N^j} (b + m·w)^(-s),
/// one axis at a time. Along the last axis the first M terms are summed
/// explicitly and the tail is replaced by
///
///   Z_{j-1}(s-1, b_M)/((s-1) w_j) + Z_{j-1}(s, b_M)/2
///     + Σ_{k<=K} B_2k/(2k)! (s)_{2k-1} w_j^{2k-1} Z_{j-1}(s+2k-1, b_M),
///
/// with b_M = b + M w_j. Every identity holds by analytic continuation, so the
/// engine is valid for σ > j - 1 as long as s avoids {1, ..., j}.
class EmEngine {
 public:
  EmEngine(std::span<const double> w, std::uint64_t leaf_cap);

  /// Z_level(s, b) using weights w[0..level), to absolute accuracy abs_tol.
  /// Requires Re(s) > level - 1.
  EmValue sum(std::size_t level, Complex s, double b, double abs_tol);

  std::uint64_t leaves() const noexcept { return leaves_; }

  /// Rigorous upper bound for Z_level(x, c) at real x > level.
  double upper_bound(std::size_t level, double x, double c) const;

  /// B_2k / (2k)! for k = 1..kMaxOrder (index 0 unused).
  static double bernoulli_ratio(int k);
  static constexpr int kMaxOrder = 30;

 private:
  struct Cutoff {
    int order = 1;
    std::uint64_t m = 0;
    double remainder = 0.0;
  };

  Cutoff choose_cutoff(std::size_t level, Complex s, double b, double tol) const;
  void count_leaves(std::uint64_t n);

  std::span<const double> w_;
  std::uint64_t leaf_cap_;
  std::uint64_t leaves_ = 0;
};

}  // namespace barnes::detail
