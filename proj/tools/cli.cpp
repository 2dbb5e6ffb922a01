#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "barnes/error.hpp"
#include "barnes/eval.hpp"
#include "barnes/meansquare.hpp"
#include "barnes/params.hpp"
#include "barnes/report_io.hpp"
#include "barnes/tilde.hpp"

namespace barnes::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw UsageError("empty entry in list '" + text + "'");
    out.push_back(item.substr(first, last - first + 1));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

double parse_real(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw UsageError("not a number: '" + token + "'");
  return v;
}

/// Weights as given: exact when every entry is written p/q.
struct WeightInput {
  std::vector<double> values;
  std::optional<std::vector<Rational>> exact;
};

WeightInput parse_weights(const std::string& text) {
  WeightInput in;
  const auto tokens = split_list(text);
  bool all_exact = true;
  for (const auto& t : tokens) all_exact = all_exact && t.find('/') != std::string::npos;
  if (all_exact) {
    std::vector<Rational> exact;
    for (const auto& t : tokens) {
      exact.push_back(Rational::parse(t));
      in.values.push_back(exact.back().to_double());
    }
    in.exact = std::move(exact);
  } else {
    for (const auto& t : tokens) {
      in.values.push_back(t.find('/') != std::string::npos ? Rational::parse(t).to_double() : parse_real(t));
    }
  }
  return in;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : split_list(text)) out.push_back(parse_real(t));
  return out;
}

// key=value lines; blank lines and '#' comments ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

// Splices config entries into the argument list unless the same flag is
// already present, so command-line flags win.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;
  std::set<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const auto& [key, value] : read_config(*path)) {
    if (given.count(key) != 0) continue;
    if (value == "true") {
      rest.push_back("--" + key);
    } else {
      rest.push_back("--" + key + "=" + value);
    }
  }
  return rest;
}

struct Common {
  double a = 0.0;
  std::string w;
  double rel_tol = 1e-8;
  std::uint64_t term_cap = 100'000'000;
  std::string format = "json";
  std::string out_path;
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_format) {
  cmd->add_option("--a", c.a, "shift parameter a > 0")->required();
  cmd->add_option("--w", c.w, "comma-separated weights, decimals or p/q")->required();
  cmd->add_option("--rel-tol", c.rel_tol, "relative tolerance")->capture_default_str();
  cmd->add_option("--term-cap", c.term_cap, "per-evaluation term cap")->envname("BARNES_TERM_CAP")->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads")->capture_default_str();
  cmd->add_option("--out", c.out_path, "write the record to this path instead of stdout");
  if (with_format) {
    cmd->add_option("--format", c.format, "json|csv|text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
  }
}

json common_config(const std::string& command, const Common& c) {
  return {{"command", command}, {"a", c.a},           {"w", c.w},
          {"rel_tol", c.rel_tol}, {"term_cap", c.term_cap}, {"workers", c.workers}};
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void emit_record(std::ostream& out, const std::string& format, const json& config, const json& result) {
  if (format == "json") {
    out << json{{"config", config}, {"result", result}}.dump(2) << '\n';
    return;
  }
  if (format == "csv") {
    out << "# config: " << config.dump() << '\n';
    std::string header;
    std::string row;
    for (const auto& [key, value] : result.items()) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += key;
      if (value.is_number_float()) {
        row += format_number(value.get<double>());
      } else if (value.is_string()) {
        row += value.get<std::string>();
      } else {
        row += value.dump();
      }
    }
    out << header << '\n' << row << '\n';
    return;
  }
  out << "# config: " << config.dump() << '\n';
  for (const auto& [key, value] : result.items()) {
    out << key << " = " << (value.is_number_float() ? format_number(value.get<double>()) : value.dump()) << '\n';
  }
}

EvalOptions eval_options(const Common& c) {
  EvalOptions opts;
  opts.term_cap = c.term_cap;
  opts.workers = c.workers;
  return opts;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app("Barnes multiple zeta evaluation and mean-square verification", "barnes");
  app.require_subcommand(1);

  // eval
  Common eval_c;
  double eval_sigma = 0.0, eval_t = 0.0, eval_truncation_c = 2.0;
  std::optional<double> eval_x;
  std::string eval_method = "auto", eval_auto_mode = "accurate";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate zeta_r(sigma + it, a, w)");
  add_common(eval_cmd, eval_c, true);
  eval_cmd->add_option("--sigma", eval_sigma, "real part of s")->required();
  eval_cmd->add_option("--t", eval_t, "imaginary part of s")->capture_default_str();
  eval_cmd->add_option("--x", eval_x, "truncation point for --method approx");
  eval_cmd->add_option("--method", eval_method, "direct|approx|auto|continued")
      ->check(CLI::IsMember({"direct", "approx", "auto", "continued"}))
      ->capture_default_str();
  eval_cmd->add_option("--auto-mode", eval_auto_mode, "accurate|truncation")
      ->check(CLI::IsMember({"accurate", "truncation"}))
      ->capture_default_str();
  eval_cmd->add_option("--C", eval_truncation_c, "truncation constant C > 1")->capture_default_str();

  // tilde
  Common tilde_c;
  double tilde_sigma = 0.0;
  std::string tilde_mode;
  auto* tilde_cmd = app.add_subcommand("tilde", "diagonal constant of the mean square");
  add_common(tilde_cmd, tilde_c, true);
  tilde_cmd->add_option("--sigma", tilde_sigma, "sigma")->required();
  tilde_cmd->add_option("--weights-mode", tilde_mode, "independent|rational")
      ->check(CLI::IsMember({"independent", "rational"}))
      ->required();

  // meansquare
  Common ms_c;
  double ms_sigma = 0.0, ms_T = 0.0, ms_quad_tol = 1e-6;
  std::string ms_checkpoints;
  std::uint64_t ms_eval_cap = 0;
  auto* ms_cmd = app.add_subcommand("meansquare", "integrate |zeta_r(sigma+it)|^2 over [1, T]");
  add_common(ms_cmd, ms_c, false);
  ms_cmd->add_option("--sigma", ms_sigma, "sigma")->required();
  ms_cmd->add_option("--T", ms_T, "upper limit T > 1")->required();
  ms_cmd->add_option("--checkpoints", ms_checkpoints, "comma-separated checkpoints ending at T");
  ms_cmd->add_option("--quad-tol", ms_quad_tol, "quadrature tolerance")->capture_default_str();
  ms_cmd->add_option("--eval-cap", ms_eval_cap, "inner evaluation cap (0 = default)");

  // verify
  Common ver_c;
  double ver_sigma = 0.0, ver_quad_tol = 1e-6;
  std::string ver_grid, ver_mode = "independent";
  bool self_test = false;
  auto* ver_cmd = app.add_subcommand("verify", "check the mean-square error regime");
  ver_cmd->add_flag("--self-test", self_test, "run the endpoint-identity suite and exit");
  ver_cmd->add_option("--a", ver_c.a, "shift parameter a > 0");
  ver_cmd->add_option("--w", ver_c.w, "comma-separated weights");
  ver_cmd->add_option("--rel-tol", ver_c.rel_tol)->capture_default_str();
  ver_cmd->add_option("--term-cap", ver_c.term_cap)->envname("BARNES_TERM_CAP")->capture_default_str();
  ver_cmd->add_option("--workers", ver_c.workers)->capture_default_str();
  ver_cmd->add_option("--out", ver_c.out_path);
  ver_cmd->add_option("--sigma", ver_sigma, "sigma");
  ver_cmd->add_option("--T-grid", ver_grid, "comma-separated T values");
  ver_cmd->add_option("--weights-mode", ver_mode, "independent|rational")
      ->check(CLI::IsMember({"independent", "rational"}))
      ->capture_default_str();
  ver_cmd->add_option("--quad-tol", ver_quad_tol)->capture_default_str();

  try {
    args = apply_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }

  try {
    if (eval_cmd->parsed()) {
      const auto weights = parse_weights(eval_c.w);
      const auto params = validate_params(eval_c.a, weights.values);
      auto opts = eval_options(eval_c);
      opts.truncation_c = eval_truncation_c;
      opts.auto_mode = eval_auto_mode == "truncation" ? AutoMode::TruncationFormula : AutoMode::Accurate;
      const Complex s(eval_sigma, eval_t);
      EvalResult res;
      double x_resolved = 0.0;
      if (eval_method == "direct") {
        res = eval_direct(params, s, eval_c.rel_tol, opts);
      } else if (eval_method == "continued") {
        res = eval_continued(params, s, eval_c.rel_tol, opts);
      } else if (eval_method == "approx") {
        x_resolved = eval_x.value_or(opts.x_safety * std::max(opts.x_min, opts.truncation_c * std::fabs(eval_t) /
                                                                              (2.0 * std::numbers::pi)));
        res = eval_approx(params, s, x_resolved, opts);
      } else {
        res = eval_auto(params, s, eval_c.rel_tol, opts);
      }
      auto config = common_config("eval", eval_c);
      config["sigma"] = eval_sigma;
      config["t"] = eval_t;
      config["method"] = eval_method;
      config["auto_mode"] = eval_auto_mode;
      config["C"] = eval_truncation_c;
      config["x"] = eval_x ? json(*eval_x) : json(nullptr);
      config["format"] = eval_c.format;
      auto result = to_json(res);
      Output sink(eval_c.out_path, out);
      emit_record(*sink, eval_c.format, config, result);
      return kExitOk;
    }

    if (tilde_cmd->parsed()) {
      const auto weights = parse_weights(tilde_c.w);
      const auto params = validate_params(tilde_c.a, weights.values);
      const auto declared = tilde_mode == "rational" ? DeclaredMode::Rational : DeclaredMode::Independent;
      const auto structure = weights.exact ? analyze_weights(*weights.exact, declared)
                                           : analyze_weights(std::span<const double>(weights.values), declared);
      const auto res = tilde_zeta(params, tilde_sigma, structure, tilde_c.rel_tol, eval_options(tilde_c));
      auto config = common_config("tilde", tilde_c);
      config["sigma"] = tilde_sigma;
      config["weights_mode"] = tilde_mode;
      config["format"] = tilde_c.format;
      auto result = to_json(res);
      json warnings = json::array();
      if (structure.kind == WeightKind::AssumedIndependent && params.r() > 1) {
        warnings.push_back(
            "weights are assumed linearly independent over Q; this is not checked. If they are rationally "
            "dependent, pass exact p/q weights with --weights-mode rational");
      }
      if (tilde_c.format == "json") result["warnings"] = warnings;
      Output sink(tilde_c.out_path, out);
      emit_record(*sink, tilde_c.format, config, result);
      for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << '\n';
      return kExitOk;
    }

    if (ms_cmd->parsed()) {
      const auto params = validate_params(ms_c.a, parse_weights(ms_c.w).values);
      if (!(ms_T > 1.0)) throw Error(ErrorCode::InvalidArgument, "--T must exceed 1");
      std::vector<double> grid = ms_checkpoints.empty() ? std::vector<double>{ms_T} : parse_real_list(ms_checkpoints);
      MeanSquareOptions opts;
      opts.eval.term_cap = ms_c.term_cap;
      opts.workers = ms_c.workers;
      opts.eval_cap = ms_eval_cap;
      opts.inner_rel_tol = std::min(ms_c.rel_tol, 1e-9);
      const auto trace = integrate_mean_square(params, ms_sigma, ms_T, ms_quad_tol, grid, opts);
      auto config = common_config("meansquare", ms_c);
      config["sigma"] = ms_sigma;
      config["T"] = ms_T;
      config["checkpoints"] = grid;
      config["quad_tol"] = ms_quad_tol;
      config["eval_cap"] = ms_eval_cap;
      config["inner_rel_tol"] = opts.inner_rel_tol;
      Output sink(ms_c.out_path, out);
      write_trace_csv(*sink, trace, &config);
      return kExitOk;
    }

    if (ver_cmd->parsed()) {
      if (self_test) {
        const auto suite = run_lemma_b_suite(20240601, 100);
        json report = {{"self_test", "endpoint_identity"},
                       {"cases", suite.cases},
                       {"failures", suite.failures},
                       {"worst_ratio", suite.worst_ratio},
                       {"pass", suite.failures == 0}};
        Output sink(ver_c.out_path, out);
        *sink << report.dump(2) << '\n';
        return suite.failures == 0 ? kExitOk : kExitVerifyFailed;
      }
      if (ver_c.w.empty() || ver_grid.empty() || ver_sigma == 0.0) {
        throw UsageError("verify needs --a, --w, --sigma and --T-grid (or --self-test)");
      }
      const auto weights = parse_weights(ver_c.w);
      const auto params = validate_params(ver_c.a, weights.values);
      const auto declared = ver_mode == "rational" ? DeclaredMode::Rational : DeclaredMode::Independent;
      const auto structure = weights.exact ? analyze_weights(*weights.exact, declared)
                                           : analyze_weights(std::span<const double>(weights.values), declared);
      VerifyOptions opts;
      opts.quad_tol = ver_quad_tol;
      opts.meansquare.eval.term_cap = ver_c.term_cap;
      opts.meansquare.workers = ver_c.workers;
      const auto report = verify_theorems(params, ver_sigma, parse_real_list(ver_grid), structure, opts);
      auto config = common_config("verify", ver_c);
      config["sigma"] = ver_sigma;
      config["T_grid"] = ver_grid;
      config["weights_mode"] = ver_mode;
      config["quad_tol"] = ver_quad_tol;
      json record = to_json(report);
      record["config"] = config;
      Output sink(ver_c.out_path, out);
      *sink << record.dump(2) << '\n';
      return report.pass ? kExitOk : kExitVerifyFailed;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_budget_error(e.code()) ? kExitBudget : kExitDomain;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitDomain;
}

}  // namespace barnes::cli
