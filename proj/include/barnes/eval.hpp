#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "barnes/params.hpp"

namespace barnes {

using Complex = std::complex<double>;

enum class ErrKind { RigorousBound, HeuristicEstimate };

/// DirectSeries: the convergent series (σ > r). ApproxFormula: truncated box
/// sum plus boundary correction. EulerMaclaurin: axis-by-axis Euler–Maclaurin
/// continuation into r-1 < σ <= r.
enum class Method { DirectSeries, ApproxFormula, EulerMaclaurin };

/// How eval_auto fills in the region the direct series does not cover.
/// TruncationFormula runs the truncation formula with x doubling; Accurate uses the
/// Euler–Maclaurin continuation, which reaches tight tolerances everywhere.
enum class AutoMode { Accurate, TruncationFormula };

const char* to_string(ErrKind kind) noexcept;
const char* to_string(Method method) noexcept;
const char* to_string(AutoMode mode) noexcept;

struct EvalOptions {
  std::uint64_t term_cap = 100'000'000;
  double pole_guard = 1e-6;
  /// Truncation constant of the approximate formula; |t| <= 2πx/C, C > 1.
  double truncation_c = 2.0;
  /// Heuristic constant in err_estimate = k_err * x^(r-1-σ).
  double k_err = 10.0;
  double x_min = 50.0;
  double x_safety = 2.0;
  AutoMode auto_mode = AutoMode::Accurate;
  /// Box sums are split into blocks of this many first-axis rows; blocks are
  /// compensated independently and pairwise reduced.
  std::uint64_t block_rows = 64;
  unsigned workers = 1;
};

struct EvalResult {
  Complex value;
  double err_estimate = 0.0;
  ErrKind err_kind = ErrKind::RigorousBound;
  Method method = Method::DirectSeries;
  std::uint64_t terms_used = 0;
  /// Truncation point for ApproxFormula results, 0 otherwise.
  double x_used = 0.0;
};

/// Per-axis integer ranges p_i <= m_i <= q_i with 0 <= p_i < q_i.
class BoxRange {
 public:
  explicit BoxRange(std::vector<std::pair<double, double>> axes);

  std::size_t size() const noexcept { return axes_.size(); }
  const std::pair<double, double>& operator[](std::size_t i) const { return axes_[i]; }

 private:
  std::vector<std::pair<double, double>> axes_;
};

struct BlockSum {
  Complex main_term;
  double remainder_estimate = 0.0;
};

struct LemmaBSides {
  Complex lhs;
  Complex rhs;
};

/// (base)^z for a positive real base, through the real logarithm.
inline Complex real_pow(double base, Complex z) { return std::exp(z * std::log(base)); }

/// Σ over all m >= 0 of (a + m·w)^(-s), σ > r. The bound in err_estimate is
/// rigorous up to floating-point rounding.
EvalResult eval_direct(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts = {});

/// Euler–Maclaurin continuation, valid for σ > r-1 away from the poles.
EvalResult eval_continued(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts = {});

/// Σ over 0 <= m_i <= m_max of (a + m·w)^(-s), summed block-wise.
Complex box_sum(const BarnesParams& params, Complex s, std::uint64_t m_max, const EvalOptions& opts = {});

/// Leading Euler–Maclaurin term of the sum over a box, plus a heuristic size
/// for the dropped endpoint terms.
BlockSum em_block_sum(const BarnesParams& params, Complex s, const BoxRange& box, const EvalOptions& opts = {});

/// Signed inclusion–exclusion correction added to the truncated box sum:
/// -Σ_{E≠∅} (-1)^#E (a + xΣ_E e)^(r-s) / ((s-1)···(s-r) w_1···w_r).
Complex boundary_correction(const BarnesParams& params, Complex s, double x, const EvalOptions& opts = {});

/// Truncated box sum (m_i <= floor(x)) plus boundary correction.
EvalResult eval_approx(const BarnesParams& params, Complex s, double x, const EvalOptions& opts = {});

EvalResult eval_auto(const BarnesParams& params, Complex s, double rel_tol, const EvalOptions& opts = {});

/// Both sides of the endpoint-cancellation identity, computed independently.
LemmaBSides lemma_b_check(const BarnesParams& params, Complex s, double x, double big_n);

struct IdentitySuiteResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  // max |lhs - rhs| / max(1, |rhs|)
};

/// lemma_b_check on `cases_per_rank` random instances for each r in {1, 2, 3},
/// passing when |lhs - rhs| <= 1e-12 max(1, |rhs|).
IdentitySuiteResult run_lemma_b_suite(std::uint64_t seed, std::size_t cases_per_rank);

}  // namespace barnes
