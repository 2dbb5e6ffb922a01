#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = barnes::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("barnes_cli_test_" + name);
}

}  // namespace

TEST_CASE("eval emits the value with its resolved config") {
  const auto r = run({"eval", "--a", "1", "--w", "1", "--sigma", "2", "--method", "direct"});
  REQUIRE(r.code == barnes::cli::kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["result"]["re"].get<double>() == doctest::Approx(1.6449340668482264).epsilon(1e-9));
  CHECK(j["result"]["im"].get<double>() == 0.0);
  CHECK(j["result"]["method"] == "DirectSeries");
  CHECK(j["result"]["err_kind"] == "RigorousBound");
  CHECK(j["config"]["command"] == "eval");
  CHECK(j["config"]["sigma"].get<double>() == 2.0);
  CHECK(j["config"]["term_cap"].get<std::uint64_t>() == 100000000);
}

TEST_CASE("identical invocations give identical output") {
  const std::vector<std::string> args{"eval", "--a", "0.5", "--w", "1,1.5", "--sigma", "1.5", "--t", "9"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("csv and text formats") {
  const auto csv = run({"eval", "--a", "1", "--w", "1", "--sigma", "3", "--rel-tol", "1e-13", "--format", "csv"});
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string config, header, row;
  std::getline(lines, config);
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(config.rfind("# config: ", 0) == 0);
  CHECK(header.find("re") != std::string::npos);
  CHECK(row.find("1.2020569031595") != std::string::npos);

  const auto text = run({"eval", "--a", "1", "--w", "1", "--sigma", "3", "--rel-tol", "1e-13", "--format", "text"});
  CHECK(text.out.find("re = 1.2020569031595") != std::string::npos);
}

TEST_CASE("approx method records x") {
  const auto r = run({"eval", "--a", "1", "--w", "1,1.4142135623730951", "--sigma", "2.2", "--t", "5", "--method",
                      "approx", "--x", "40"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["result"]["x_used"].get<double>() == 40.0);
  CHECK(j["result"]["err_kind"] == "HeuristicEstimate");
}

TEST_CASE("exit codes") {
  CHECK(run({"eval", "--a", "-1", "--w", "1", "--sigma", "2"}).code == barnes::cli::kExitDomain);
  CHECK(run({"eval", "--a", "1", "--w", "1,1", "--sigma", "2", "--method", "direct"}).code ==
        barnes::cli::kExitDomain);
  CHECK(run({"eval", "--a", "1", "--w", "1", "--sigma", "2", "--bogus"}).code == barnes::cli::kExitDomain);
  CHECK(run({"frobnicate"}).code == barnes::cli::kExitDomain);
  CHECK(run({"meansquare", "--a", "1", "--w", "1", "--sigma", "2", "--T", "0.5"}).code == barnes::cli::kExitDomain);
  CHECK(run({"verify", "--a", "1", "--w", "1,1", "--sigma", "0.9", "--T-grid", "10,20,40,80"}).code ==
        barnes::cli::kExitDomain);
  CHECK(run({"eval", "--a", "1", "--w", "1,1.41421356", "--sigma", "1.5", "--t", "0.5"}).code == barnes::cli::kExitOk);
  CHECK(run({"eval", "--a", "1", "--w", "1,1.41421356", "--sigma", "2", "--t", "1e-9"}).code ==
        barnes::cli::kExitDomain);
  CHECK(run({"eval", "--a", "1", "--w", "1,x", "--sigma", "3"}).code == barnes::cli::kExitDomain);
  const auto budget = run({"eval", "--a", "1", "--w", "1,1", "--sigma", "2.5", "--method", "approx", "--x", "500",
                           "--term-cap", "1000"});
  CHECK(budget.code == barnes::cli::kExitBudget);
  CHECK(budget.err.find("BudgetExceeded") != std::string::npos);
}

TEST_CASE("term cap from the environment") {
  ::setenv("BARNES_TERM_CAP", "1000", 1);
  const auto r = run({"eval", "--a", "1", "--w", "1,1", "--sigma", "2.5", "--method", "approx", "--x", "500"});
  ::unsetenv("BARNES_TERM_CAP");
  CHECK(r.code == barnes::cli::kExitBudget);
}

TEST_CASE("config file supplies defaults and flags override it") {
  const auto path = temp_file("config.txt");
  {
    std::ofstream f(path);
    f << "# defaults\n"
      << "a = 2\n"
      << "w = 1\n"
      << "sigma = 3\n"
      << "method = direct\n";
  }
  const auto from_file = run({"eval", "--config", path.string()});
  REQUIRE(from_file.code == 0);
  auto j = json::parse(from_file.out);
  CHECK(j["config"]["a"].get<double>() == 2.0);
  CHECK(j["result"]["re"].get<double>() == doctest::Approx(0.2020569031595942).epsilon(1e-9));

  const auto overridden = run({"eval", "--config", path.string(), "--a", "1"});
  REQUIRE(overridden.code == 0);
  j = json::parse(overridden.out);
  CHECK(j["config"]["a"].get<double>() == 1.0);
  CHECK(j["result"]["re"].get<double>() == doctest::Approx(1.2020569031595942).epsilon(1e-9));
  std::filesystem::remove(path);

  CHECK(run({"eval", "--config", "/nonexistent/barnes.cfg"}).code == barnes::cli::kExitDomain);
}

TEST_CASE("tilde: exact weights and the independence warning") {
  const auto rational = run({"tilde", "--a", "1", "--w", "1/1,1/1", "--sigma", "1.75", "--weights-mode", "rational"});
  REQUIRE(rational.code == 0);
  auto j = json::parse(rational.out);
  CHECK(j["result"]["path"] == "RationalSeries");
  CHECK(j["result"]["value"].get<double>() == doctest::Approx(2.6123753486854883).epsilon(1e-8));
  CHECK(j["result"]["warnings"].empty());

  const auto indep = run({"tilde", "--a", "1", "--w", "1,1.4142135623730951", "--sigma", "1.75", "--weights-mode",
                          "independent"});
  REQUIRE(indep.code == 0);
  j = json::parse(indep.out);
  CHECK(j["result"]["path"] == "IndependentReduction");
  CHECK(j["result"]["warnings"].size() == 1);
  CHECK(indep.err.find("warning") != std::string::npos);

  const auto single = run({"tilde", "--a", "1", "--w", "1", "--sigma", "1.2", "--weights-mode", "independent"});
  REQUIRE(single.code == 0);
  CHECK(json::parse(single.out)["result"]["value"].get<double>() == doctest::Approx(1.38334285884074).epsilon(1e-9));
  CHECK(json::parse(single.out)["result"]["warnings"].empty());

  // Decimal weights cannot be declared rational.
  CHECK(run({"tilde", "--a", "1", "--w", "0.5,1", "--sigma", "1.75", "--weights-mode", "rational"}).code ==
        barnes::cli::kExitDomain);
}

TEST_CASE("meansquare writes a csv trace") {
  const auto path = temp_file("trace.csv");
  const auto r = run({"meansquare", "--a", "1", "--w", "1", "--sigma", "2", "--T", "20", "--checkpoints", "5,10,20",
                      "--out", path.string()});
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line.rfind("# config: ", 0) == 0);
  CHECK(json::parse(line.substr(10))["T"].get<double>() == 20.0);
  std::getline(f, line);
  CHECK(line == "T,I,evals");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 3);
  std::filesystem::remove(path);
}

TEST_CASE("meansquare output does not depend on workers") {
  auto numbers = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<double> I;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) I.push_back(std::stod(line.substr(line.find(',') + 1)));
    return I;
  };
  const std::vector<std::string> base{"meansquare", "--a", "1",  "--w",          "1,2", "--sigma",
                                      "1.8",        "--T", "15", "--checkpoints", "5,15"};
  auto with = [&](const char* workers) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers});
    return run(args);
  };
  const auto one = with("1");
  const auto two = with("2");
  REQUIRE(one.code == 0);
  REQUIRE(two.code == 0);
  const auto a = numbers(one.out), b = numbers(two.out);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * a[i]);
}

TEST_CASE("verify self-test") {
  const auto r = run({"verify", "--self-test"});
  CHECK(r.code == barnes::cli::kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["cases"].get<int>() == 300);
  CHECK(j["pass"].get<bool>());
}

TEST_CASE("verify reports pass and fail through the exit code") {
  const auto ok = run({"verify", "--a", "1", "--w", "1", "--sigma", "1.25", "--T-grid", "50,100,200,400"});
  REQUIRE(ok.code == barnes::cli::kExitOk);
  const auto j = json::parse(ok.out);
  CHECK(j["pass"].get<bool>());
  CHECK(j["regime"] == "SigmaAboveR");
  CHECK(j["config"]["command"] == "verify");

  // Dependent weights treated as independent: the wrong leading constant
  // leaves a residual growing like T.
  const auto bad = run({"verify", "--a", "1", "--w", "1/1,1/1", "--sigma", "2.25", "--T-grid", "10,20,40,80",
                        "--weights-mode", "independent"});
  CHECK(bad.code == barnes::cli::kExitVerifyFailed);
  CHECK_FALSE(json::parse(bad.out)["pass"].get<bool>());

  CHECK(run({"verify", "--a", "1", "--w", "1", "--sigma", "1.25"}).code == barnes::cli::kExitDomain);
}
