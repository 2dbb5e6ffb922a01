#include "barnes/meansquare.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "barnes/compensated.hpp"
#include "barnes/error.hpp"

namespace barnes {

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::SigmaAboveR: return "SigmaAboveR";
    case Regime::UpperRange: return "UpperRange";
    case Regime::MidRange: return "MidRange";
    case Regime::LowerRange: return "LowerRange";
  }
  return "Unknown";
}

namespace {

struct Rule {
  std::array<double, 7> nodes;
  std::array<double, 7> weights;
  int size;
};

constexpr Rule kGauss4 = {{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
                          {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538},
                          4};
constexpr Rule kGauss7 = {{-0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0, 0.4058451513773972,
                           0.7415311855993945, 0.9491079123427585},
                          {0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
                           0.3818300505051189, 0.2797053914892766, 0.1294849661688697},
                          7};

constexpr int kMaxDepth = 24;

struct PanelResult {
  Accumulator integral;
  std::uint64_t evals = 0;
};

class Integrand {
 public:
  Integrand(const BarnesParams& params, double sigma, const MeanSquareOptions& opts, std::uint64_t cap)
      : params_(params), sigma_(sigma), opts_(opts), cap_(cap) {}

  double operator()(double t) {
    if (evals_.fetch_add(1, std::memory_order_relaxed) + 1 > cap_) {
      throw Error(ErrorCode::BudgetExceeded, "mean-square integration exceeded " + std::to_string(cap_) + " evaluations");
    }
    return std::norm(eval_auto(params_, Complex(sigma_, t), opts_.inner_rel_tol, opts_.eval).value);
  }

 private:
  const BarnesParams& params_;
  double sigma_;
  const MeanSquareOptions& opts_;
  std::uint64_t cap_;
  std::atomic<std::uint64_t> evals_{0};
};

double apply_rule(const Rule& rule, Integrand& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (int i = 0; i < rule.size; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

void integrate_panel(Integrand& f, double lo, double hi, double quad_tol, int depth, PanelResult& out) {
  const double fine = apply_rule(kGauss7, f, lo, hi);
  const double coarse = apply_rule(kGauss4, f, lo, hi);
  out.evals += 11;
  const double width = hi - lo;
  const double mean_abs = std::fabs(fine) / width;
  if (std::fabs(fine - coarse) <= quad_tol * width * std::max(1.0, mean_abs) || depth >= kMaxDepth) {
    out.integral += fine;
    return;
  }
  const double mid = 0.5 * (lo + hi);
  integrate_panel(f, lo, mid, quad_tol, depth + 1, out);
  integrate_panel(f, mid, hi, quad_tol, depth + 1, out);
}

}  // namespace

MeanSquareTrace integrate_mean_square(const BarnesParams& params, double sigma, double T, double quad_tol,
                                      std::vector<double> checkpoint_grid, const MeanSquareOptions& opts) {
  const double r = static_cast<double>(params.r());
  if (!(sigma > r - 1.0)) throw Error(ErrorCode::SigmaTooSmall, "mean square needs sigma > r - 1");
  if (!(T > 1.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "T must exceed 1");
  if (!(quad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quad_tol must be positive");
  if (checkpoint_grid.empty()) checkpoint_grid.push_back(T);
  for (std::size_t i = 0; i < checkpoint_grid.size(); ++i) {
    const double c = checkpoint_grid[i];
    if (!(c > 1.0 && c <= T) || (i > 0 && !(c > checkpoint_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "checkpoints must be strictly increasing within (1, T]");
    }
  }
  if (checkpoint_grid.back() != T) throw Error(ErrorCode::InvalidArgument, "last checkpoint must equal T");

  const std::uint64_t cap = opts.eval_cap != 0 ? opts.eval_cap : (params.r() == 1 ? 10'000'000 : 100'000);
  const double h0 = std::min(0.25, 2.0 * std::numbers::pi / (3.0 * std::log(params.a() + T * params.weight_sum())));

  struct Panel {
    double lo, hi;
    std::size_t segment;
  };
  std::vector<Panel> panels;
  double seg_lo = 1.0;
  for (std::size_t seg = 0; seg < checkpoint_grid.size(); ++seg) {
    const double seg_hi = checkpoint_grid[seg];
    const auto n = static_cast<std::size_t>(std::ceil((seg_hi - seg_lo) / h0));
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = seg_lo + (seg_hi - seg_lo) * static_cast<double>(i) / static_cast<double>(n);
      const double hi = (i + 1 == n) ? seg_hi : seg_lo + (seg_hi - seg_lo) * static_cast<double>(i + 1) / static_cast<double>(n);
      panels.push_back({lo, hi, seg});
    }
    seg_lo = seg_hi;
  }

  Integrand f(params, sigma, opts, cap);
  std::vector<PanelResult> results(panels.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < panels.size(); i = next.fetch_add(1)) {
        integrate_panel(f, panels[i].lo, panels[i].hi, quad_tol, 0, results[i]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(panels.size());
    }
  };
  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  MeanSquareTrace trace{sigma, params, {}, quad_tol, opts};
  Accumulator running;
  std::uint64_t evals = 0;
  std::size_t p = 0;
  for (std::size_t seg = 0; seg < checkpoint_grid.size(); ++seg) {
    for (; p < panels.size() && panels[p].segment == seg; ++p) {
      running += results[p].integral;
      evals += results[p].evals;
    }
    trace.checkpoints.push_back({checkpoint_grid[seg], std::max(0.0, running.value()), evals});
  }
  return trace;
}

namespace {

ExponentFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
  ExponentFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (y == 0.0) {
      ++fit.dropped;
      continue;
    }
    logs.emplace_back(std::log(x), std::log(std::fabs(y)));
  }
  if (logs.size() < 4) {
    throw Error(ErrorCode::InsufficientCheckpoints,
                "need at least 4 nonzero residuals, have " + std::to_string(logs.size()));
  }
  const double n = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientCheckpoints, "checkpoints need distinct T");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace

ExponentFit fit_residual_exponent(const MeanSquareTrace& trace, double tilde_value) {
  if (trace.checkpoints.size() < 4) {
    throw Error(ErrorCode::InsufficientCheckpoints, "need at least 4 checkpoints");
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& c : trace.checkpoints) points.emplace_back(c.T, c.I - tilde_value * c.T);
  return fit_loglog(points);
}

Regime classify_regime(double sigma, std::size_t r) {
  const double rr = static_cast<double>(r);
  if (sigma > rr) return Regime::SigmaAboveR;
  if (sigma > rr - 0.25) return Regime::UpperRange;
  if (sigma > rr - 0.5) return Regime::MidRange;
  if (sigma > rr - 1.0) return Regime::LowerRange;
  throw Error(ErrorCode::SigmaTooSmall, "sigma must exceed r - 1");
}

VerificationReport verify_theorems(const BarnesParams& params, double sigma, std::vector<double> T_grid,
                                   const WeightStructure& structure, const VerifyOptions& opts) {
  const std::size_t r = params.r();
  const Regime regime = classify_regime(sigma, r);
  for (std::size_t j = 1; j <= r; ++j) {
    if (std::fabs(sigma - static_cast<double>(j)) < opts.meansquare.eval.pole_guard) {
      throw Error(ErrorCode::NearPole, "sigma sits on the pole line Re(s) = " + std::to_string(j));
    }
  }
  std::sort(T_grid.begin(), T_grid.end());
  if (T_grid.size() < 4 || !(T_grid.front() > 1.0) || T_grid.back() < 8.0 * T_grid.front()) {
    throw Error(ErrorCode::InvalidArgument, "T grid needs >= 4 points above 1 with max >= 8 * min");
  }

  std::optional<TildeResult> tilde;
  if (regime != Regime::LowerRange) {
    tilde = tilde_zeta(params, sigma, structure, opts.tilde_rel_tol, opts.meansquare.eval);
  }

  auto trace = integrate_mean_square(params, sigma, T_grid.back(), opts.quad_tol, T_grid, opts.meansquare);
  const double lead = tilde ? tilde->value : 0.0;
  const ExponentFit fit = fit_residual_exponent(trace, lead);

  VerificationReport report{.sigma = sigma, .regime = regime, .tilde_value = {}, .tilde_path = {}, .residuals = {},
                            .notes = {}, .trace = std::move(trace)};
  if (tilde) {
    report.tilde_value = tilde->value;
    report.tilde_path = tilde->path;
  }
  for (const auto& c : report.trace.checkpoints) report.residuals.push_back({c.T, std::fabs(c.I - lead * c.T)});
  report.fitted_slope = fit.slope;
  report.intercept = fit.intercept;
  report.r_squared = fit.r_squared;
  report.slope_tolerance = opts.slope_tolerance;

  const double rr = static_cast<double>(r);
  switch (regime) {
    case Regime::SigmaAboveR: report.predicted_slope_bound = 0.0; break;
    case Regime::UpperRange: report.predicted_slope_bound = 0.5; break;
    case Regime::MidRange:
    case Regime::LowerRange: report.predicted_slope_bound = 2.0 * rr - 2.0 * sigma; break;
  }
  if (sigma == rr - 0.25) {
    report.notes.push_back("sigma = r - 1/4: bounds T^(2r-2sigma) log T and T^(1/2) both apply; slope bound 0.5");
  }
  if (regime == Regime::LowerRange) {
    report.notes.push_back("lower range: residuals are I(T) itself, checked against T^(2r-2sigma) log T");
  }
  if (fit.dropped > 0) report.notes.push_back(std::to_string(fit.dropped) + " zero residuals dropped from the fit");
  report.pass = report.fitted_slope <= report.predicted_slope_bound + report.slope_tolerance;
  return report;
}

}  // namespace barnes
