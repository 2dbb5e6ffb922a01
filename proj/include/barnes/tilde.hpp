#pragma once

#include <cstdint>

#include "barnes/eval.hpp"
#include "barnes/params.hpp"

namespace barnes {

enum class TildePath { IndependentReduction, RationalSeries };

const char* to_string(TildePath path) noexcept;

struct TildeResult {
  double value = 0.0;
  double err_estimate = 0.0;
  TildePath path = TildePath::IndependentReduction;
};

/// Diagonal constant Σ_{m·w = n·w} (a+m·w)^-σ (a+n·w)^-σ.
///
/// AssumedIndependent weights collapse the diagonal to m = n, i.e. ζ_r(2σ);
/// this needs 2σ > r. Rational weights w = p/q sum R(k)^2 (a + k/q)^-2σ over
/// the denumerant R, which needs σ > r - 1/2.
TildeResult tilde_zeta(const BarnesParams& params, double sigma, const WeightStructure& structure, double rel_tol,
                       const EvalOptions& opts = {});

/// Σ_{k <= k_max} R(k)^2 (a + k/q)^-2σ with no tail; used to cross-check the
/// full rational series against brute-force enumeration.
double rational_tilde_partial(double a, double sigma, const WeightStructure& structure, std::uint64_t k_max);

}  // namespace barnes
