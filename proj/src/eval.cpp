#include "barnes/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "barnes/compensated.hpp"
#include "barnes/error.hpp"
#include "em_engine.hpp"

namespace barnes {

const char* to_string(ErrKind kind) noexcept {
  return kind == ErrKind::RigorousBound ? "RigorousBound" : "HeuristicEstimate";
}

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::DirectSeries: return "DirectSeries";
    case Method::ApproxFormula: return "ApproxFormula";
    case Method::EulerMaclaurin: return "EulerMaclaurin";
  }
  return "Unknown";
}

const char* to_string(AutoMode mode) noexcept {
  return mode == AutoMode::Accurate ? "accurate" : "truncation";
}

BoxRange::BoxRange(std::vector<std::pair<double, double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error(ErrorCode::EmptyWeights, "box needs at least one axis");
  for (const auto& [p, q] : axes_) {
    if (!(p >= 0.0) || !(p < q) || !std::isfinite(q)) {
      throw Error(ErrorCode::InvalidArgument, "box axes need 0 <= p < q");
    }
  }
}

namespace {

double rank(const BarnesParams& params) { return static_cast<double>(params.r()); }

void check_rel_tol(double rel_tol) {
  if (!(rel_tol > 1e-14 && rel_tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "rel_tol must lie in (1e-14, 1)");
  }
}

void require_sigma_above(const BarnesParams& params, Complex s, double bound, const char* what) {
  if (!(s.real() > bound)) {
    throw Error(ErrorCode::SigmaTooSmall,
                std::string(what) + " needs Re(s) > " + std::to_string(bound) + ", got " + std::to_string(s.real()));
  }
  (void)params;
}

void check_poles(const BarnesParams& params, Complex s, double guard) {
  for (std::size_t j = 1; j <= params.r(); ++j) {
    if (std::abs(s - static_cast<double>(j)) < guard) {
      throw Error(ErrorCode::NearPole, "s is within " + std::to_string(guard) + " of the pole at " + std::to_string(j));
    }
  }
}

// (s-1)(s-2)···(s-r) w_1···w_r
Complex pole_denominator(const BarnesParams& params, Complex s) {
  Complex d = params.weight_product();
  for (std::size_t j = 1; j <= params.r(); ++j) d *= s - static_cast<double>(j);
  return d;
}

// Weights in ascending order, so permuted inputs take identical arithmetic paths.
BarnesParams canonical(const BarnesParams& params) {
  std::vector<double> w(params.w().begin(), params.w().end());
  std::sort(w.begin(), w.end());
  return validate_params(params.a(), std::move(w));
}

EvalResult run_engine(const BarnesParams& input, Complex s, double rel_tol, const EvalOptions& opts, Method method) {
  const BarnesParams params = canonical(input);
  const double sigma = s.real();
  const double a = params.a();
  // Rough size of the value: first term or the leading continuation term.
  const double guess = std::max(std::pow(a, -sigma),
                                std::pow(a, rank(params) - sigma) / std::abs(pole_denominator(params, s)));
  double abs_tol = 0.5 * rel_tol * guess;

  EvalResult out;
  out.method = method;
  out.err_kind = ErrKind::RigorousBound;
  for (int attempt = 0; attempt < 4; ++attempt) {
    detail::EmEngine engine(params.w(), opts.term_cap);
    const auto res = engine.sum(params.r(), s, a, abs_tol);
    out.value = res.value;
    out.err_estimate = res.err;
    out.terms_used += engine.leaves();
    const double target = rel_tol * std::abs(res.value);
    if (res.err <= target || target == 0.0) break;
    const double next = 0.5 * target;
    if (next >= abs_tol) break;
    abs_tol = next;
  }
  return out;
}

}  // namespace

EvalResult eval_direct(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts) {
  check_rel_tol(rel_tol);
  require_sigma_above(params, s, rank(params), "direct series");
  return run_engine(params, s, rel_tol, opts, Method::DirectSeries);
}

EvalResult eval_continued(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts) {
  check_rel_tol(rel_tol);
  require_sigma_above(params, s, rank(params) - 1.0, "continuation");
  check_poles(params, s, opts.pole_guard);
  return run_engine(params, s, rel_tol, opts, Method::EulerMaclaurin);
}

Complex box_sum(const BarnesParams& params, Complex s, std::uint64_t m_max, const EvalOptions& opts) {
  const auto w = params.w();
  const std::size_t r = params.r();
  const double a = params.a();
  const std::uint64_t rows = m_max + 1;
  const std::uint64_t block_rows = std::max<std::uint64_t>(1, opts.block_rows);
  const std::uint64_t n_blocks = (rows + block_rows - 1) / block_rows;
  std::vector<ComplexAccumulator> blocks(n_blocks);

  auto run_block = [&](std::uint64_t blk) {
    ComplexAccumulator acc;
    const std::uint64_t first = blk * block_rows;
    const std::uint64_t last = std::min(rows, first + block_rows);
    std::vector<std::uint64_t> m(r, 0);
    for (std::uint64_t m0 = first; m0 < last; ++m0) {
      std::fill(m.begin() + 1, m.end(), 0);
      m[0] = m0;
      while (true) {
        double base = a;
        for (std::size_t i = 0; i < r; ++i) base += static_cast<double>(m[i]) * w[i];
        acc += real_pow(base, -s);
        std::size_t i = 1;
        for (; i < r; ++i) {
          if (++m[i] <= m_max) break;
          m[i] = 0;
        }
        if (i == r) break;
      }
    }
    blocks[blk] = acc;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    for (std::uint64_t blk = 0; blk < n_blocks; ++blk) run_block(blk);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned id = 0; id < workers; ++id) {
      pool.emplace_back([&, id] {
        for (std::uint64_t blk = id; blk < n_blocks; blk += workers) run_block(blk);
      });
    }
  }
  return pairwise_reduce(blocks).value();
}

BlockSum em_block_sum(const BarnesParams& params, Complex s, const BoxRange& box, const EvalOptions& opts) {
  const std::size_t r = params.r();
  if (box.size() != r) throw Error(ErrorCode::InvalidArgument, "box dimension must equal r");
  require_sigma_above(params, s, rank(params) - 1.0, "block sum");
  check_poles(params, s, opts.pole_guard);

  const auto w = params.w();
  const Complex exponent = rank(params) - s;
  ComplexAccumulator acc;
  for (std::uint32_t pick = 0; pick < (1u << r); ++pick) {
    double base = params.a();
    for (std::size_t i = 0; i < r; ++i) base += ((pick >> i) & 1u ? box[i].second : box[i].first) * w[i];
    const Complex term = real_pow(base, exponent);
    acc += (std::popcount(pick) % 2 == 0) ? term : -term;
  }

  // Surrogate for Σ_i Σ_{c_j in {p_j, q_j}} O(c_1···c_{i-1} c_i^(r-i-σ)).
  // Endpoints at 0 are clamped to 1 since the true endpoint terms stay bounded there.
  const double sigma = s.real();
  double remainder = 0.0;
  for (std::size_t i = 1; i <= r; ++i) {
    for (std::uint32_t pick = 0; pick < (1u << i); ++pick) {
      double term = 1.0;
      for (std::size_t j = 0; j + 1 < i; ++j) {
        term *= std::max(1.0, (pick >> j) & 1u ? box[j].second : box[j].first);
      }
      const double ci = std::max(1.0, (pick >> (i - 1)) & 1u ? box[i - 1].second : box[i - 1].first);
      term *= std::pow(ci, rank(params) - static_cast<double>(i) - sigma);
      remainder += term;
    }
  }
  return {acc.value() / pole_denominator(params, s), opts.k_err * remainder};
}

Complex boundary_correction(const BarnesParams& params, Complex s, double x, const EvalOptions& opts) {
  if (!(x > 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be positive");
  check_poles(params, s, opts.pole_guard);
  const std::size_t r = params.r();
  const auto w = params.w();
  const Complex exponent = rank(params) - s;
  ComplexAccumulator acc;
  for (std::uint32_t subset = 1; subset < (1u << r); ++subset) {
    double weight = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      if ((subset >> i) & 1u) weight += w[i];
    }
    const Complex term = real_pow(params.a() + x * weight, exponent);
    // -(-1)^#E
    acc += (std::popcount(subset) % 2 == 1) ? term : -term;
  }
  return acc.value() / pole_denominator(params, s);
}

EvalResult eval_approx(const BarnesParams& input, Complex s, double x, const EvalOptions& opts) {
  const BarnesParams params = canonical(input);
  if (!(opts.truncation_c > 1.0)) throw Error(ErrorCode::InvalidArgument, "truncation constant C must exceed 1");
  if (!(x >= 1.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "x must be >= 1");
  require_sigma_above(params, s, rank(params) - 1.0, "approximate formula");
  if (std::fabs(s.imag()) > 2.0 * std::numbers::pi * x / opts.truncation_c) {
    throw Error(ErrorCode::TruncationTooShort, "|t| exceeds 2*pi*x/C; increase x");
  }
  check_poles(params, s, opts.pole_guard);

  const auto m_max = static_cast<std::uint64_t>(std::floor(x));
  const double terms = std::pow(static_cast<double>(m_max + 1), rank(params));
  if (terms > static_cast<double>(opts.term_cap)) {
    throw Error(ErrorCode::BudgetExceeded, "box sum needs " + std::to_string(terms) + " terms");
  }

  EvalResult out;
  out.value = box_sum(params, s, m_max, opts) + boundary_correction(params, s, x, opts);
  out.err_estimate = opts.k_err * std::pow(x, rank(params) - 1.0 - s.real());
  out.err_kind = ErrKind::HeuristicEstimate;
  out.method = Method::ApproxFormula;
  out.terms_used = static_cast<std::uint64_t>(terms);
  out.x_used = x;
  return out;
}

EvalResult eval_auto(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts) {
  check_rel_tol(rel_tol);
  require_sigma_above(params, s, rank(params) - 1.0, "evaluation");
  check_poles(params, s, opts.pole_guard);

  const double t = std::fabs(s.imag());
  if (s.real() > rank(params) + 0.1 && t <= 5.0) return eval_direct(params, s, rel_tol, opts);
  if (opts.auto_mode == AutoMode::Accurate) return eval_continued(params, s, rel_tol, opts);

  double x = std::max(opts.x_min, opts.truncation_c * t / (2.0 * std::numbers::pi)) * opts.x_safety;
  auto fits = [&](double xv) {
    return std::pow(std::floor(xv) + 1.0, rank(params)) <= static_cast<double>(opts.term_cap);
  };
  if (!fits(x)) throw Error(ErrorCode::BudgetExceeded, "initial truncation point exceeds the term cap");
  EvalResult prev = eval_approx(params, s, x, opts);
  std::uint64_t total_terms = prev.terms_used;
  if (prev.err_estimate < rel_tol * std::abs(prev.value)) return prev;
  while (fits(2.0 * x)) {
    x *= 2.0;
    EvalResult next = eval_approx(params, s, x, opts);
    total_terms += next.terms_used;
    const double scale = rel_tol * std::abs(next.value);
    if (std::abs(next.value - prev.value) < scale || next.err_estimate < scale) {
      next.terms_used = total_terms;
      return next;
    }
    prev = next;
  }
  throw Error(ErrorCode::BudgetExceeded, "approximate formula did not converge before the term cap");
}

LemmaBSides lemma_b_check(const BarnesParams& params, Complex s, double x, double big_n) {
  const std::size_t r = params.r();
  if (r > 5) throw Error(ErrorCode::InvalidArgument, "identity check supports r <= 5");
  if (!(x >= 1.0 && x <= big_n) || !std::isfinite(big_n)) {
    throw Error(ErrorCode::InvalidArgument, "identity check needs 1 <= x <= N");
  }
  const auto w = params.w();
  const Complex exponent = rank(params) - s;
  const std::uint32_t full = 1u << r;

  // Left side: interval tuples (bit set = (x, N), clear = (0, x)), skipping
  // the all-(0, x) tuple, then every endpoint choice (bit set = q_i).
  ComplexAccumulator lhs;
  for (std::uint32_t intervals = 1; intervals < full; ++intervals) {
    for (std::uint32_t pick = 0; pick < full; ++pick) {
      double base = params.a();
      for (std::size_t i = 0; i < r; ++i) {
        const bool upper_interval = (intervals >> i) & 1u;
        const bool take_q = (pick >> i) & 1u;
        const double p = upper_interval ? x : 0.0;
        const double q = upper_interval ? big_n : x;
        base += (take_q ? q : p) * w[i];
      }
      const Complex term = real_pow(base, exponent);
      lhs += (std::popcount(pick) % 2 == 0) ? term : -term;
    }
  }

  ComplexAccumulator rhs;
  for (std::uint32_t subset = 1; subset < full; ++subset) {
    double weight = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      if ((subset >> i) & 1u) weight += w[i];
    }
    const Complex bracket = real_pow(params.a() + big_n * weight, exponent) - real_pow(params.a() + x * weight, exponent);
    rhs += (std::popcount(subset) % 2 == 1) ? -bracket : bracket;
  }
  return {lhs.value(), rhs.value()};
}

IdentitySuiteResult run_lemma_b_suite(std::uint64_t seed, std::size_t cases_per_rank) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  IdentitySuiteResult out;
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t i = 0; i < cases_per_rank; ++i) {
      std::vector<double> w(r);
      for (auto& wi : w) wi = 0.1 + 2.9 * unit(rng);
      const auto params = validate_params(0.1 + 2.9 * unit(rng), std::move(w));
      const Complex s(0.5 + (static_cast<double>(r) + 2.0) * unit(rng), -20.0 + 40.0 * unit(rng));
      const double x = 1.0 + 49.0 * unit(rng);
      const double big_n = x + 450.0 * unit(rng);
      const auto sides = lemma_b_check(params, s, x, big_n);
      const double ratio = std::abs(sides.lhs - sides.rhs) / std::max(1.0, std::abs(sides.rhs));
      ++out.cases;
      if (!(ratio <= 1e-12)) ++out.failures;
      out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
  }
  return out;
}

}  // namespace barnes
