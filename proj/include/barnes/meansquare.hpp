#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barnes/eval.hpp"
#include "barnes/params.hpp"
#include "barnes/tilde.hpp"

namespace barnes {

struct Checkpoint {
  double T = 0.0;
  double I = 0.0;
  /// Inner evaluations spent on [1, T].
  std::uint64_t evals = 0;
};

struct MeanSquareOptions {
  /// Inner evaluator settings. truncation_c, x_min and x_safety form the
  /// x-policy x = x_safety * max(x_min, C|t|/2π) used by the truncation formula.
  EvalOptions eval = [] {
    EvalOptions o;
    o.truncation_c = 6.283185307179586;
    return o;
  }();
  double inner_rel_tol = 1e-10;
  unsigned workers = 1;
  /// 0 selects the default: 1e7 inner evaluations for r = 1, 1e5 otherwise.
  std::uint64_t eval_cap = 0;
};

/// Running values of I(T) = ∫_1^T |ζ_r(σ+it, a, w)|^2 dt.
struct MeanSquareTrace {
  double sigma = 0.0;
  BarnesParams params;
  std::vector<Checkpoint> checkpoints;
  double quad_tol = 0.0;
  MeanSquareOptions options;
};

/// Composite Gauss–Legendre quadrature on [1, T]. Panels start at width
/// min(0.25, 2π / (3 log(a + T Σw))) and are bisected until the 4-point and
/// 7-point rules agree to quad_tol * width * max(1, mean |f|). Panel results
/// are reduced in a fixed order, so the trace does not depend on `workers`.
MeanSquareTrace integrate_mean_square(const BarnesParams& params, double sigma, double T, double quad_tol,
                                      std::vector<double> checkpoint_grid, const MeanSquareOptions& opts = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Checkpoints dropped because the residual was exactly zero.
  std::size_t dropped = 0;
};

/// Least squares of log|I(T) - tilde*T| against log T.
ExponentFit fit_residual_exponent(const MeanSquareTrace& trace, double tilde_value);

enum class Regime { SigmaAboveR, UpperRange, MidRange, LowerRange };

const char* to_string(Regime regime) noexcept;

/// Error regime of the mean-square asymptotics for (σ, r); intervals are
/// closed on the right.
Regime classify_regime(double sigma, std::size_t r);

struct Residual {
  double T = 0.0;
  double value = 0.0;
};

struct VerificationReport {
  double sigma = 0.0;
  Regime regime = Regime::SigmaAboveR;
  /// Unset in LowerRange, where only the growth bound on I(T) is checked and
  /// the residuals are I(T) itself.
  std::optional<double> tilde_value;
  std::optional<TildePath> tilde_path;
  std::vector<Residual> residuals;
  double fitted_slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double predicted_slope_bound = 0.0;
  double slope_tolerance = 0.35;
  bool pass = false;
  std::vector<std::string> notes;
  MeanSquareTrace trace;
};

struct VerifyOptions {
  double quad_tol = 1e-6;
  double tilde_rel_tol = 1e-10;
  double slope_tolerance = 0.35;
  MeanSquareOptions meansquare;
};

VerificationReport verify_theorems(const BarnesParams& params, double sigma, std::vector<double> T_grid,
                                   const WeightStructure& structure, const VerifyOptions& opts = {});

}  // namespace barnes
