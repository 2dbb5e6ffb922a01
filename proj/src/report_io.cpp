#include "barnes/report_io.hpp"

#include <array>
#include <charconv>

namespace barnes {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

nlohmann::json to_json(const EvalResult& result) {
  return {
      {"re", result.value.real()},
      {"im", result.value.imag()},
      {"err_estimate", result.err_estimate},
      {"err_kind", to_string(result.err_kind)},
      {"method", to_string(result.method)},
      {"terms_used", result.terms_used},
      {"x_used", result.x_used},
  };
}

nlohmann::json to_json(const TildeResult& result) {
  return {{"value", result.value}, {"err_estimate", result.err_estimate}, {"path", to_string(result.path)}};
}

nlohmann::json to_json(const MeanSquareTrace& trace) {
  nlohmann::json checkpoints = nlohmann::json::array();
  for (const auto& c : trace.checkpoints) checkpoints.push_back({{"T", c.T}, {"I", c.I}, {"evals", c.evals}});
  const auto& eval = trace.options.eval;
  return {
      {"sigma", trace.sigma},
      {"params", {{"a", trace.params.a()}, {"w", std::vector<double>(trace.params.w().begin(), trace.params.w().end())}}},
      {"checkpoints", checkpoints},
      {"quad_tol", trace.quad_tol},
      {"x_policy",
       {{"C", eval.truncation_c},
        {"x_rule", "x = x_safety * max(x_min, C|t|/(2 pi))"},
        {"x_min", eval.x_min},
        {"x_safety", eval.x_safety},
        {"auto_mode", to_string(eval.auto_mode)},
        {"inner_rel_tol", trace.options.inner_rel_tol}}},
  };
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json residuals = nlohmann::json::array();
  for (const auto& r : report.residuals) residuals.push_back({{"T", r.T}, {"residual", r.value}});
  nlohmann::json out = {
      {"sigma", report.sigma},
      {"regime", to_string(report.regime)},
      {"tilde_value", report.tilde_value ? nlohmann::json(*report.tilde_value) : nlohmann::json(nullptr)},
      {"tilde_path", report.tilde_path ? nlohmann::json(to_string(*report.tilde_path)) : nlohmann::json(nullptr)},
      {"residuals", residuals},
      {"fitted_slope", report.fitted_slope},
      {"intercept", report.intercept},
      {"r_squared", report.r_squared},
      {"predicted_slope_bound", report.predicted_slope_bound},
      {"slope_tolerance", report.slope_tolerance},
      {"pass", report.pass},
      {"notes", report.notes},
      {"trace", to_json(report.trace)},
  };
  return out;
}

void write_trace_csv(std::ostream& out, const MeanSquareTrace& trace, const nlohmann::json* config) {
  if (config != nullptr) out << "# config: " << config->dump() << '\n';
  out << "T,I,evals\n";
  for (const auto& c : trace.checkpoints) {
    out << format_number(c.T) << ',' << format_number(c.I) << ',' << c.evals << '\n';
  }
}

}  // namespace barnes
