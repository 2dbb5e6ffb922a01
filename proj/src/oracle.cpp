#include "barnes/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "barnes/compensated.hpp"
#include "barnes/error.hpp"

namespace barnes::oracle {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_2, B_4, B_6, B_8 divided by (2k)!.
constexpr std::array<double, 4> kBernoulliOverFactorial = {
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
};

Complex power(double base, Complex exponent) { return std::exp(exponent * std::log(base)); }

}  // namespace

OracleValue hurwitz_zeta(Complex s, double alpha, double abs_tol) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "Hurwitz parameter must be positive");
  if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "abs_tol must be positive");
  if (std::abs(s - 1.0) < 1e-6) throw Error(ErrorCode::NearPole, "Hurwitz zeta pole at s = 1");
  const double sigma = s.real();
  if (!(sigma > -1.0)) throw Error(ErrorCode::SigmaTooSmall, "oracle supports Re(s) > -1 only");

  // Remainder after the B_8 term: |B_8|/8! |(s)_8| ∫_N^∞ (u+α)^(-σ-8) du.
  double poch8 = 1.0;
  for (int i = 0; i < 8; ++i) poch8 *= std::abs(s + double(i));
  const double expo = sigma + 7.0;
  const double coef = std::fabs(kBernoulliOverFactorial[3]) * poch8 / expo;
  const double base_needed = std::pow(coef / abs_tol, 1.0 / expo);
  const double n = std::max(1.0, std::ceil(base_needed - alpha));
  const double tail_base = n + alpha;
  const double remainder = coef * std::pow(tail_base, -expo);

  ComplexAccumulator acc;
  double magnitude = 0.0;
  for (double k = n - 1.0; k >= 0.0; k -= 1.0) {
    const Complex v = power(k + alpha, -s);
    acc += v;
    magnitude += std::abs(v);
  }
  acc += power(tail_base, 1.0 - s) / (s - 1.0);
  acc += 0.5 * power(tail_base, -s);
  Complex poch = s;  // (s)_{2k-1}
  for (int k = 1; k <= 4; ++k) {
    acc += kBernoulliOverFactorial[k - 1] * poch * power(tail_base, -s - (2.0 * k - 1.0));
    poch *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
  }
  const double rounding = 8.0 * kEps * (magnitude + std::abs(acc.value())) * (1.0 + std::abs(s.imag()) * std::log(tail_base));
  return {acc.value(), remainder + rounding};
}

Complex naive_multisum(const BarnesParams& params, Complex s, std::uint64_t cutoff) {
  const std::size_t r = params.r();
  const double terms = std::pow(static_cast<double>(cutoff) + 1.0, static_cast<double>(r));
  if (terms > 1e7) throw Error(ErrorCode::BudgetExceeded, "naive multisum limited to 1e7 terms");
  const auto w = params.w();
  std::vector<std::uint64_t> m(r, 0);
  ComplexAccumulator acc;
  while (true) {
    double base = params.a();
    for (std::size_t i = 0; i < r; ++i) base += static_cast<double>(m[i]) * w[i];
    acc += power(base, -s);
    std::size_t i = 0;
    for (; i < r; ++i) {
      if (++m[i] <= cutoff) break;
      m[i] = 0;
    }
    if (i == r) break;
  }
  return acc.value();
}

OracleValue equal_weight_reduction(int r, Complex s, double a, double abs_tol) {
  if (r < 1 || r > 4) throw Error(ErrorCode::InvalidArgument, "equal-weight reduction supports 1 <= r <= 4");
  if (!(s.real() > r)) throw Error(ErrorCode::SigmaTooSmall, "equal-weight reduction needs Re(s) > r");
  if (!(a > 0.0)) throw Error(ErrorCode::NonPositiveShift, "a must be positive");

  // C(N+r-1, r-1) = Π_{i=1}^{r-1} (y + i - a) / (r-1)!  with y = N + a.
  std::vector<double> coef{1.0};
  double factorial = 1.0;
  for (int i = 1; i < r; ++i) {
    std::vector<double> next(coef.size() + 1, 0.0);
    for (std::size_t j = 0; j < coef.size(); ++j) {
      next[j + 1] += coef[j];
      next[j] += coef[j] * (i - a);
    }
    coef = std::move(next);
    factorial *= i;
  }
  double coef_scale = 0.0;
  for (auto& c : coef) {
    c /= factorial;
    coef_scale = std::max(coef_scale, std::fabs(c));
  }

  OracleValue out;
  const double each_tol = abs_tol / (static_cast<double>(r) * coef_scale);
  for (std::size_t j = 0; j < coef.size(); ++j) {
    if (coef[j] == 0.0) continue;
    const auto h = hurwitz_zeta(s - static_cast<double>(j), a, each_tol);
    out.value += coef[j] * h.value;
    out.claimed_abs_error += std::fabs(coef[j]) * h.claimed_abs_error;
  }
  return out;
}

}  // namespace barnes::oracle
