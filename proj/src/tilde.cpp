#include "barnes/tilde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "barnes/compensated.hpp"
#include "barnes/error.hpp"

namespace barnes {

const char* to_string(TildePath path) noexcept {
  return path == TildePath::IndependentReduction ? "IndependentReduction" : "RationalSeries";
}

namespace {

using Poly = std::vector<long double>;  // coefficients in increasing degree

Poly multiply(const Poly& x, const Poly& y) {
  Poly out(x.size() + y.size() - 1, 0.0L);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  }
  return out;
}

void check_structure(const BarnesParams& params, const WeightStructure& structure) {
  if (structure.p.size() != params.r() || structure.q == 0) {
    throw Error(ErrorCode::UnsupportedWeightStructure, "rational structure does not match the weight count");
  }
  const auto w = params.w();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double expected = static_cast<double>(structure.p[i]) / static_cast<double>(structure.q);
    if (structure.p[i] == 0 || std::fabs(w[i] - expected) > 1e-12 * expected) {
      throw Error(ErrorCode::UnsupportedWeightStructure,
                  "weight w_" + std::to_string(i + 1) + " is not p/q of the supplied lattice data");
    }
  }
}

TildeResult independent_path(const BarnesParams& params, double sigma, double rel_tol, const EvalOptions& opts) {
  if (!(2.0 * sigma > static_cast<double>(params.r()))) {
    throw Error(ErrorCode::SigmaTooSmall, "independent reduction needs 2*sigma > r");
  }
  const auto res = eval_direct(params, Complex(2.0 * sigma, 0.0), rel_tol, opts);
  return {res.value.real(), res.err_estimate, TildePath::IndependentReduction};
}

// The denumerant is a quasi-polynomial of degree r-1 with period L = lcm(p):
// on each class k = c + jL it is a polynomial R_c(j), valid for all j >= 0.
// The head j < head_rows is summed from the DP table; the tail becomes
// Σ_e P_e ζ(2σ - e, α_c + head_rows) with P = R_c^2 written in y = j + α_c.
TildeResult rational_path(const BarnesParams& params, double sigma, const WeightStructure& structure, double rel_tol,
                          const EvalOptions& opts) {
  check_structure(params, structure);
  const std::size_t r = params.r();
  if (!(sigma > static_cast<double>(r) - 0.5)) {
    throw Error(ErrorCode::SigmaTooSmall, "rational series needs sigma > r - 1/2");
  }

  std::uint64_t period = 1;
  for (auto p : structure.p) {
    const auto g = std::gcd(period, p);
    if (__builtin_mul_overflow(period / g, p, &period)) throw Error(ErrorCode::Overflow, "lcm of parts overflows");
  }
  const std::uint64_t head_rows = r + 3;
  const long double table_size = static_cast<long double>(period) * head_rows;
  if (table_size > static_cast<long double>(std::min<std::uint64_t>(opts.term_cap, 100'000'000))) {
    throw Error(ErrorCode::BudgetExceeded, "denumerant table for period " + std::to_string(period) + " is too large");
  }
  const std::uint64_t k_head = period * head_rows;
  const auto counts = denumerant_table(structure.p, k_head - 1);

  const double a = params.a();
  const double q = static_cast<double>(structure.q);
  const double two_sigma = 2.0 * sigma;

  Accumulator head;
  for (std::uint64_t k = 0; k < k_head; ++k) {
    if (counts[k] == 0) continue;
    const double rk = static_cast<double>(counts[k]);
    head += rk * rk * std::pow(a + static_cast<double>(k) / q, -two_sigma);
  }

  const double scale = std::pow(static_cast<double>(period) / q, -two_sigma);
  Accumulator tail;
  double err = 0.0;
  for (std::uint64_t c = 0; c < period; ++c) {
    // Newton forward differences of R_c over j = 0..r-1.
    std::vector<__int128> diff(r);
    for (std::size_t j = 0; j < r; ++j) diff[j] = static_cast<__int128>(counts[c + j * period]);
    for (std::size_t d = 1; d < r; ++d) {
      for (std::size_t j = r - 1; j >= d; --j) diff[j] -= diff[j - 1];
    }
    // Remaining rows must match the fitted polynomial exactly.
    for (std::size_t j = r; j < head_rows; ++j) {
      __int128 predicted = 0;
      __int128 binom = 1;
      for (std::size_t d = 0; d < r; ++d) {
        predicted += diff[d] * binom;
        binom = binom * static_cast<__int128>(j - d) / static_cast<__int128>(d + 1);
      }
      if (predicted != static_cast<__int128>(counts[c + j * period])) {
        throw Error(ErrorCode::InvalidArgument, "denumerant quasi-polynomial check failed");
      }
    }
    const bool all_zero = std::all_of(diff.begin(), diff.end(), [](__int128 v) { return v == 0; });
    if (all_zero) continue;

    const long double alpha = (static_cast<long double>(a) * q + static_cast<long double>(c)) / period;
    // R_c(y) = Σ_d Δ^d Π_{i<d} (y - α - i) / d!
    Poly rc{0.0L};
    Poly falling{1.0L};
    long double factorial = 1.0L;
    for (std::size_t d = 0; d < r; ++d) {
      if (d > 0) {
        falling = multiply(falling, Poly{-alpha - static_cast<long double>(d - 1), 1.0L});
        factorial *= static_cast<long double>(d);
      }
      rc.resize(std::max(rc.size(), falling.size()), 0.0L);
      for (std::size_t e = 0; e < falling.size(); ++e) {
        rc[e] += static_cast<long double>(diff[d]) * falling[e] / factorial;
      }
    }
    const Poly squared = multiply(rc, rc);
    const double shift = static_cast<double>(alpha) + static_cast<double>(head_rows);
    const auto hurwitz_params = validate_params(shift, {1.0});
    for (std::size_t e = 0; e < squared.size(); ++e) {
      const double coef = static_cast<double>(squared[e]);
      if (coef == 0.0) continue;
      const auto z = eval_direct(hurwitz_params, Complex(two_sigma - static_cast<double>(e), 0.0), std::max(0.1 * rel_tol, 2e-14), opts);
      tail += coef * z.value.real();
      err += std::fabs(coef) * (z.err_estimate + 4e-16 * std::fabs(z.value.real()));
    }
  }

  const double value = head.value() + scale * tail.value();
  err = scale * err + 4e-16 * std::fabs(value);
  return {value, err, TildePath::RationalSeries};
}

}  // namespace

TildeResult tilde_zeta(const BarnesParams& params, double sigma, const WeightStructure& structure, double rel_tol,
                       const EvalOptions& opts) {
  if (!(rel_tol > 1e-14 && rel_tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must lie in (1e-14, 1)");
  if (structure.kind == WeightKind::AssumedIndependent) return independent_path(params, sigma, rel_tol, opts);
  return rational_path(params, sigma, structure, rel_tol, opts);
}

double rational_tilde_partial(double a, double sigma, const WeightStructure& structure, std::uint64_t k_max) {
  if (structure.kind != WeightKind::Rational) {
    throw Error(ErrorCode::UnsupportedWeightStructure, "partial rational series needs rational weights");
  }
  const auto counts = denumerant_table(structure.p, k_max);
  const double q = static_cast<double>(structure.q);
  Accumulator acc;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    const double rk = static_cast<double>(counts[k]);
    acc += rk * rk * std::pow(a + static_cast<double>(k) / q, -2.0 * sigma);
  }
  return acc.value();
}

}  // namespace barnes
