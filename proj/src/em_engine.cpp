#include "em_engine.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "barnes/compensated.hpp"
#include "barnes/error.hpp"

namespace barnes::detail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_2k/(2k)! = (-1)^(k+1) 2 ζ(2k) / (2π)^(2k).
std::array<double, EmEngine::kMaxOrder + 1> make_bernoulli_ratios() {
  std::array<double, EmEngine::kMaxOrder + 1> out{};
  constexpr int n = 1000;
  for (int k = 1; k <= EmEngine::kMaxOrder; ++k) {
    const double p = 2.0 * k;
    double zeta = 0.0;
    if (k == 1) {
      zeta = std::numbers::pi * std::numbers::pi / 6.0;
    } else {
      for (int i = n - 1; i >= 1; --i) zeta += std::pow(static_cast<double>(i), -p);
      zeta += std::pow(n, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(n, -p) + p * std::pow(n, -p - 1.0) / 12.0;
    }
    const double mag = 2.0 * zeta * std::exp(-p * std::log(2.0 * std::numbers::pi));
    out[k] = (k % 2 == 1) ? mag : -mag;
  }
  return out;
}

const std::array<double, EmEngine::kMaxOrder + 1>& bernoulli_table() {
  static const auto table = make_bernoulli_ratios();
  return table;
}

double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == -std::numeric_limits<double>::infinity()) return x;
  return x + std::log1p(std::exp(y - x));
}

double leaf_rounding(Complex s, double base, double magnitude) {
  return kEps * (4.0 + std::abs(s) * std::fabs(std::log(base))) * magnitude;
}

}  // namespace

double EmEngine::bernoulli_ratio(int k) { return bernoulli_table().at(static_cast<std::size_t>(k)); }

EmEngine::EmEngine(std::span<const double> w, std::uint64_t leaf_cap) : w_(w), leaf_cap_(leaf_cap) {}

void EmEngine::count_leaves(std::uint64_t n) {
  leaves_ += n;
  if (leaves_ > leaf_cap_) {
    throw Error(ErrorCode::BudgetExceeded, "Euler-Maclaurin summation needs more than " +
                                               std::to_string(leaf_cap_) + " terms");
  }
}

namespace {

// log U_level(x, c) where U_0 = c^-x and
// U_i(x, c) = U_{i-1}(x, c) + U_{i-1}(x-1, c) / ((x-1) w_i).
// Σ_{m>=0} f(m) <= f(0) + ∫_0^∞ f for decreasing f, so U bounds Z at real x > level.
double log_upper_bound(std::span<const double> w, std::size_t level, double x, double c) {
  if (level == 0) return -x * std::log(c);
  const double head = log_upper_bound(w, level - 1, x, c);
  const double tail = log_upper_bound(w, level - 1, x - 1.0, c) - std::log((x - 1.0) * w[level - 1]);
  return log_add(head, tail);
}

}  // namespace

double EmEngine::upper_bound(std::size_t level, double x, double c) const {
  return std::exp(log_upper_bound(w_, level, x, c));
}

EmEngine::Cutoff EmEngine::choose_cutoff(std::size_t level, Complex s, double b, double tol) const {
  const double w = w_[level - 1];
  const double sigma = s.real();
  const double log_tol = std::log(tol);
  const double log_w = std::log(w);
  const auto max_m = static_cast<double>(leaf_cap_);

  Cutoff best;
  double best_cost = std::numeric_limits<double>::infinity();
  double log_poch = 0.0;  // log |(s)_{2K}|
  for (int k = 1; k <= kMaxOrder; ++k) {
    log_poch += std::log(std::abs(s + double(2 * k - 2))) + std::log(std::abs(s + double(2 * k - 1)));
    const double x = sigma + 2.0 * k - 1.0;
    const double log_coef = std::log(std::fabs(bernoulli_ratio(k))) + log_poch + (2.0 * k - 1.0) * log_w - std::log(x);
    auto log_bound = [&](double m) { return log_coef + log_upper_bound(w_, level - 1, x, b + m * w); };

    double m = 0.0;
    if (level == 1) {
      const double c_req = std::exp((log_coef - log_tol) / x);
      m = c_req <= b ? 0.0 : std::ceil((c_req - b) / w);
    } else if (log_bound(0.0) > log_tol) {
      double lo = 0.0;
      double hi = 1.0;
      while (hi <= max_m && log_bound(hi) > log_tol) {
        lo = hi;
        hi *= 2.0;
      }
      if (hi > max_m) continue;
      while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        (log_bound(mid) > log_tol ? lo : hi) = mid;
      }
      m = hi;
    }
    if (m > max_m) continue;
    const double cost = m + k;
    if (cost < best_cost) {
      best_cost = cost;
      best.order = k;
      best.m = static_cast<std::uint64_t>(m);
      best.remainder = std::exp(log_bound(m));
    } else if (k > best.order + 4) {
      break;
    }
  }
  if (!std::isfinite(best_cost)) {
    throw Error(ErrorCode::BudgetExceeded, "no Euler-Maclaurin cutoff fits the term cap");
  }
  return best;
}

EmValue EmEngine::sum(std::size_t level, Complex s, double b, double abs_tol) {
  if (level == 0) {
    count_leaves(1);
    const Complex v = std::exp(-s * std::log(b));
    return {v, leaf_rounding(s, b, std::abs(v))};
  }

  const double w = w_[level - 1];
  const Cutoff cut = choose_cutoff(level, s, b, 0.5 * abs_tol);
  const auto n_children = static_cast<double>(cut.m + static_cast<std::uint64_t>(cut.order) + 2);
  const double child_tol = 0.5 * abs_tol / n_children;
  const double b_m = b + static_cast<double>(cut.m) * w;

  ComplexAccumulator acc;
  double err = cut.remainder;

  // Tail coefficients: integral, half endpoint, then the Bernoulli terms.
  // Each multiplies Z_{level-1}(s + shift, b_m).
  struct TailTerm {
    Complex coef;
    double shift;
  };
  std::array<TailTerm, kMaxOrder + 2> tail{};
  std::size_t n_tail = 0;
  tail[n_tail++] = {1.0 / ((s - 1.0) * w), -1.0};
  tail[n_tail++] = {0.5, 0.0};
  Complex poch = s;  // (s)_{2k-1}
  double w_pow = w;  // w^{2k-1}
  for (int k = 1; k <= cut.order; ++k) {
    tail[n_tail++] = {bernoulli_ratio(k) * poch * w_pow, 2.0 * k - 1.0};
    poch *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    w_pow *= w * w;
  }

  if (level == 1) {
    count_leaves(cut.m + n_tail);
    for (std::uint64_t m = 0; m < cut.m; ++m) {
      const double c = b + static_cast<double>(m) * w;
      const Complex v = std::exp(-s * std::log(c));
      acc += v;
      err += leaf_rounding(s, c, std::abs(v));
    }
    const double log_bm = std::log(b_m);
    for (std::size_t i = 0; i < n_tail; ++i) {
      const Complex v = tail[i].coef * std::exp(-(s + tail[i].shift) * log_bm);
      acc += v;
      err += leaf_rounding(s + tail[i].shift, b_m, std::abs(v));
    }
  } else {
    for (std::uint64_t m = 0; m < cut.m; ++m) {
      const auto child = sum(level - 1, s, b + static_cast<double>(m) * w, child_tol);
      acc += child.value;
      err += child.err;
    }
    for (std::size_t i = 0; i < n_tail; ++i) {
      const double scale = std::abs(tail[i].coef);
      const auto child = sum(level - 1, s + tail[i].shift, b_m, child_tol / scale);
      const Complex v = tail[i].coef * child.value;
      acc += v;
      err += scale * child.err + kEps * std::abs(v);
    }
  }
  return {acc.value(), err};
}

}  // namespace barnes::detail
