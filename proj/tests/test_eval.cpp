#include <doctest.h>

#include <limits>
#include <vector>

#include "barnes/error.hpp"
#include "barnes/eval.hpp"
#include "barnes/oracle.hpp"
#include "support.hpp"

using namespace barnes;
using barnes::test::kPi;
using barnes::test::kSqrt2;
using barnes::test::rel_diff;
using C = std::complex<double>;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

C hurwitz(C s, double alpha) { return oracle::hurwitz_zeta(s, alpha, 1e-15).value; }

// ζ_2(s, a, (1, 2)) from the representation count floor(n/2) + 1
// = (n+1)/2 + (1 + (-1)^n)/4, which reduces to Hurwitz functions.
C weights_one_two(C s, double a) {
  const C linear = hurwitz(s - 1.0, a) + (1.0 - a) * hurwitz(s, a);
  const C alternating = real_pow(2.0, -s) * (hurwitz(s, a / 2) - hurwitz(s, (a + 1) / 2));
  return 0.5 * linear + 0.25 * hurwitz(s, a) + 0.25 * alternating;
}

}  // namespace

TEST_CASE("r = 1 reduces to Hurwitz zeta") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double w : {1.0, 2.0, kPi}) {
      for (C s : {C(2.0, 0.0), C(1.5, 10.0), C(0.6, 50.0), C(3.0, 1.0)}) {
        const auto params = validate_params(a, {w});
        const C want = real_pow(w, -s) * hurwitz(s, a / w);
        CAPTURE(a);
        CAPTURE(w);
        CAPTURE(s);
        CHECK(rel_diff(eval_auto(params, s, 1e-12).value, want) < 1e-10);
      }
    }
  }
}

TEST_CASE("continuation matches Hurwitz reductions for r = 2") {
  for (C s : {C(1.5, 0.0), C(1.25, 7.0), C(1.75, 33.0), C(2.5, -4.0)}) {
    for (double a : {0.5, 1.0, 1.7}) {
      const auto unit = validate_params(a, {1.0, 1.0});
      const C unit_want = hurwitz(s - 1.0, a) + (1.0 - a) * hurwitz(s, a);
      const auto res = eval_continued(unit, s, 1e-11);
      CAPTURE(s);
      CAPTURE(a);
      CHECK(rel_diff(res.value, unit_want) < 1e-10);
      CHECK(std::abs(res.value - unit_want) <= res.err_estimate + 1e-13);
      CHECK(res.err_kind == ErrKind::RigorousBound);

      const auto mixed = validate_params(a, {1.0, 2.0});
      CHECK(rel_diff(eval_continued(mixed, s, 1e-11).value, weights_one_two(s, a)) < 1e-10);
    }
  }
}

TEST_CASE("direct series agrees with the naive multisum plus its tail") {
  // For σ large the cube truncation error is below the comparison tolerance.
  const auto params = validate_params(0.8, {1.0, kSqrt2, 0.7});
  const C s(9.0, 3.0);
  const C naive = oracle::naive_multisum(params, s, 60);
  CHECK(rel_diff(eval_direct(params, s, 1e-13).value, naive) < 1e-11);
}

TEST_CASE("conjugate symmetry for every evaluator") {
  const std::vector<std::vector<double>> weight_sets{{1.3}, {1.0, kSqrt2}, {0.5, 1.0, kPi}};
  for (const auto& w : weight_sets) {
    const auto params = validate_params(0.9, w);
    const double r = static_cast<double>(w.size());
    const C hi(r + 0.7, 3.5);
    const C mid(r - 0.4, 12.0);
    CAPTURE(w.size());
    CHECK(rel_diff(eval_direct(params, std::conj(hi), 1e-13).value,
                   std::conj(eval_direct(params, hi, 1e-13).value)) < 1e-12);
    CHECK(rel_diff(eval_continued(params, std::conj(mid), 1e-13).value,
                   std::conj(eval_continued(params, mid, 1e-13).value)) < 1e-12);
    CHECK(rel_diff(eval_auto(params, std::conj(mid), 1e-13).value,
                   std::conj(eval_auto(params, mid, 1e-13).value)) < 1e-12);
    const double x = w.size() == 3 ? 20.0 : 40.0;
    CHECK(rel_diff(eval_approx(params, std::conj(mid), x).value, std::conj(eval_approx(params, mid, x).value)) <
          1e-12);
  }
}

TEST_CASE("weight permutation invariance") {
  const std::vector<double> w{kPi, 0.5, kSqrt2};
  std::vector<std::vector<double>> perms{{kPi, 0.5, kSqrt2}, {0.5, kSqrt2, kPi}, {kSqrt2, kPi, 0.5}};
  const C s_direct(3.6, 8.0);
  const C s_approx(2.4, 8.0);
  const auto base_direct = eval_direct(validate_params(0.7, w), s_direct, 1e-12).value;
  const auto base_approx = eval_approx(validate_params(0.7, w), s_approx, 25.0).value;
  for (const auto& p : perms) {
    const auto params = validate_params(0.7, p);
    CHECK(eval_direct(params, s_direct, 1e-12).value == base_direct);
    CHECK(rel_diff(eval_approx(params, s_approx, 25.0).value, base_approx) < 1e-12);
  }
}

TEST_CASE("scaling covariance") {
  const std::vector<double> w{1.0, kSqrt2};
  const double a = 1.3;
  for (double c : {0.5, 2.0, kPi}) {
    for (C s : {C(2.5, 0.0), C(3.0, 6.0)}) {
      std::vector<double> cw{c * w[0], c * w[1]};
      const C lhs = eval_direct(validate_params(a, cw), s, 1e-12).value;
      const C rhs = real_pow(c, -s) * eval_direct(validate_params(a / c, w), s, 1e-12).value;
      CAPTURE(c);
      CHECK(rel_diff(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("real s above r gives positive values decreasing in sigma") {
  // Needs a >= 1: every base a + m.w is then at least 1.
  for (const auto& w : std::vector<std::vector<double>>{{0.8}, {1.0, kSqrt2}, {0.5, 1.0, 2.0}}) {
    const auto params = validate_params(1.2, w);
    const double r = static_cast<double>(w.size());
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {r + 0.5, r + 1.0, r + 2.0}) {
      const C v = eval_direct(params, sigma, 1e-12).value;
      CHECK(v.imag() == 0.0);
      CHECK(v.real() > 0.0);
      CHECK(v.real() < prev);
      prev = v.real();
    }
  }
}

TEST_CASE("approximate formula stays within its error estimate of the direct series") {
  for (const auto& w : std::vector<std::vector<double>>{{1.0}, {1.0, kSqrt2}}) {
    const auto params = validate_params(1.0, w);
    const double r = static_cast<double>(w.size());
    for (double sigma : {r + 0.3, r + 1.0, r + 2.0}) {
      for (double t : {0.0, 5.0, 15.0}) {
        const C s(sigma, t);
        const C direct = eval_direct(params, s, 1e-13).value;
        for (double x : {10.0, 20.0, 40.0}) {
          const auto approx = eval_approx(params, s, x);
          CAPTURE(s);
          CAPTURE(x);
          CHECK(std::abs(approx.value - direct) <= approx.err_estimate);
          CHECK(approx.err_kind == ErrKind::HeuristicEstimate);
          CHECK(approx.x_used == x);
        }
      }
    }
  }
}

TEST_CASE("approximation error decays with the predicted exponent") {
  const auto params = validate_params(1.0, {1.0, kSqrt2});
  const C s(2.2, 5.0);
  const C direct = eval_direct(params, s, 1e-13).value;
  std::vector<double> lx, ly;
  for (double x : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    lx.push_back(std::log(x));
    ly.push_back(std::log(std::abs(eval_approx(params, s, x).value - direct)));
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3] + lx[4]) / 5;
  const double my = (ly[0] + ly[1] + ly[2] + ly[3] + ly[4]) / 5;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 5; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  CHECK(std::abs(sxy / sxx - (-1.2)) <= 0.4);
}

TEST_CASE("box sums do not depend on block size or workers") {
  const auto params = validate_params(0.4, {1.0, kSqrt2, 0.6});
  const C s(1.8, 20.0);
  EvalOptions a;
  a.block_rows = 1;
  EvalOptions b;
  b.block_rows = 17;
  b.workers = 3;
  EvalOptions c;
  c.block_rows = 1000;
  const C va = box_sum(params, s, 60, a);
  CHECK(rel_diff(box_sum(params, s, 60, b), va) < 1e-12);
  CHECK(rel_diff(box_sum(params, s, 60, c), va) < 1e-12);
  // Same blocks, different worker counts: identical reduction.
  EvalOptions b1 = b;
  b1.workers = 1;
  CHECK(box_sum(params, s, 60, b1) == box_sum(params, s, 60, b));
}

TEST_CASE("one-dimensional block sum is the integral of the summand") {
  const auto params = validate_params(1.5, {kSqrt2});
  for (C s : {C(0.7, 3.0), C(2.5, -1.0), C(1.3, 40.0)}) {
    for (double x : {1.0, 7.5, 100.0}) {
      const auto block = em_block_sum(params, s, BoxRange({{0.0, x}}));
      const C want = (real_pow(1.5, 1.0 - s) - real_pow(1.5 + x * kSqrt2, 1.0 - s)) / ((s - 1.0) * kSqrt2);
      CHECK(rel_diff(block.main_term, want) < 1e-12);
      CHECK(block.remainder_estimate > 0.0);
    }
  }
}

TEST_CASE("boundary correction for r = 1 is the tail integral") {
  const auto params = validate_params(0.5, {2.0});
  const C s(1.4, 6.0);
  const double x = 12.0;
  const C want = real_pow(0.5 + 2.0 * x, 1.0 - s) / ((s - 1.0) * 2.0);
  CHECK(rel_diff(boundary_correction(params, s, x), want) < 1e-13);
}

TEST_CASE("endpoint identity holds exactly") {
  const auto suite = run_lemma_b_suite(7, 100);
  CHECK(suite.cases == 300);
  CHECK(suite.failures == 0);
  CHECK(suite.worst_ratio <= 1e-12);

  const auto params = validate_params(0.3, {1.0, 2.5, 0.7, 1.1});
  const auto sides = lemma_b_check(params, C(0.9, 4.0), 3.5, 40.0);
  CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-12 * std::max(1.0, std::abs(sides.rhs)));
  CHECK(code_of([&] { lemma_b_check(params, C(2.0, 1.0), 5.0, 4.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("eval_auto dispatch") {
  const auto params = validate_params(1.0, {1.0, kSqrt2});
  CHECK(eval_auto(params, C(3.0, 1.0), 1e-10).method == Method::DirectSeries);
  CHECK(eval_auto(params, C(3.0, 30.0), 1e-10).method == Method::EulerMaclaurin);
  CHECK(eval_auto(params, C(1.75, 1.0), 1e-10).method == Method::EulerMaclaurin);

  EvalOptions truncation;
  truncation.auto_mode = AutoMode::TruncationFormula;
  const auto res = eval_auto(params, C(1.75, 40.0), 0.5, truncation);
  CHECK(res.method == Method::ApproxFormula);
  CHECK(res.x_used >= 2.0 * 40.0 / kPi);
  const C accurate = eval_auto(params, C(1.75, 40.0), 1e-12).value;
  CHECK(std::abs(res.value - accurate) <= res.err_estimate);
}

TEST_CASE("domain errors") {
  const auto params = validate_params(1.0, {1.0, kSqrt2});
  CHECK(code_of([&] { eval_direct(params, C(2.0, 3.0), 1e-10); }) == ErrorCode::SigmaTooSmall);
  CHECK(code_of([&] { eval_continued(params, C(1.0, 3.0), 1e-10); }) == ErrorCode::SigmaTooSmall);
  CHECK(code_of([&] { eval_continued(params, C(2.0, 1e-8), 1e-10); }) == ErrorCode::NearPole);
  CHECK(code_of([&] { eval_approx(params, C(1.5, 100.0), 10.0); }) == ErrorCode::TruncationTooShort);
  CHECK(code_of([&] { eval_approx(params, C(1.5, 0.0), 0.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { eval_direct(params, C(3.0, 0.0), 1e-15); }) == ErrorCode::InvalidArgument);
  EvalOptions small;
  small.term_cap = 1000;
  CHECK(code_of([&] { eval_approx(params, C(2.5, 1.0), 100.0, small); }) == ErrorCode::BudgetExceeded);
  CHECK(is_budget_error(code_of([&] { eval_direct(params, C(2.001, 300.0), 1e-12, small); })));
  CHECK(code_of([&] { BoxRange({{2.0, 1.0}}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("reference values") {
  CHECK(rel_diff(eval_direct(validate_params(1.0, {1.0}), 2.0, 1e-10).value, kPi * kPi / 6) < 1e-10);
  CHECK(rel_diff(eval_direct(validate_params(1.0, {1.0, 1.0}), 4.0, 1e-10).value, 1.2020569031595942) < 1e-10);
  CHECK(rel_diff(eval_direct(validate_params(2.0, {2.0}), 2.0, 1e-10).value, kPi * kPi / 24) < 1e-10);
  CHECK(rel_diff(eval_auto(validate_params(1.0, {1.0}), C(2.0, 30.0), 1e-8).value, hurwitz(C(2.0, 30.0), 1.0)) <
        1e-8);
  CHECK(eval_auto(validate_params(1.0, {1.0, kSqrt2}), 2.5, 1e-8).method == Method::DirectSeries);
}

TEST_CASE("approximate formula at large x agrees with the direct series") {
  const auto params = validate_params(1.0, {1.0, kSqrt2});
  const auto approx = eval_approx(params, 2.5, 200.0);
  CHECK(std::abs(approx.value - eval_direct(params, 2.5, 1e-13).value) <= approx.err_estimate);
  CHECK(approx.terms_used == 201 * 201);

  const auto wide = eval_approx(validate_params(1.0, {1.0}), C(0.75, 50.0), 100.0);
  CHECK(std::isfinite(wide.value.real()));
  CHECK(std::isfinite(wide.value.imag()));
}

TEST_CASE("block sum over a long one-dimensional box") {
  const auto params = validate_params(1.0, {1.0});
  const auto block = em_block_sum(params, 2.5, BoxRange({{10.0, 1e4}}));
  double exact = 0.0;
  for (int m = 10000; m >= 10; --m) exact += std::pow(1.0 + m, -2.5);
  CHECK(std::abs(block.main_term - exact) < block.remainder_estimate);
  // Real s and a real box give a real main term.
  const auto two = em_block_sum(validate_params(1.0, {1.0, kSqrt2}), 2.7, BoxRange({{0.0, 9.0}, {0.0, 9.0}}));
  CHECK(two.main_term.imag() == 0.0);
  CHECK(boundary_correction(validate_params(1.0, {1.0, kSqrt2}), 1.6, 12.0).imag() == 0.0);
}

TEST_CASE("boundary correction for r = 2 in closed form") {
  const double w1 = 1.0, w2 = kSqrt2, a = 1.0, x = 7.0;
  const C s(1.6, 4.0);
  const C want = (real_pow(a + x * w1, 2.0 - s) + real_pow(a + x * w2, 2.0 - s) - real_pow(a + x * (w1 + w2), 2.0 - s)) /
                 ((s - 1.0) * (s - 2.0) * w1 * w2);
  CHECK(rel_diff(boundary_correction(validate_params(a, {w1, w2}), s, x), want) < 1e-13);
}

TEST_CASE("endpoint identity examples") {
  const auto two = validate_params(1.0, {1.0, 2.0});
  auto sides = lemma_b_check(two, C(2.5, 3.0), 10.0, 100.0);
  CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-12 * std::abs(sides.rhs));
  const auto three = validate_params(0.5, {1.0, kSqrt2, std::sqrt(3.0)});
  sides = lemma_b_check(three, C(3.5, 7.0), 5.0, 50.0);
  CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-12 * std::abs(sides.rhs));
  sides = lemma_b_check(three, C(3.5, 7.0), 5.0, 5.0);
  CHECK(std::abs(sides.lhs) < 1e-15);
  CHECK(std::abs(sides.rhs) < 1e-15);
}
