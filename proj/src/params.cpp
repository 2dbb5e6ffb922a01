#include "barnes/params.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "barnes/error.hpp"

namespace barnes {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveShift: return "NonPositiveShift";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::EmptyWeights: return "EmptyWeights";
    case ErrorCode::ConflictingDeclaration: return "ConflictingDeclaration";
    case ErrorCode::UnsupportedWeightStructure: return "UnsupportedWeightStructure";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SigmaTooSmall: return "SigmaTooSmall";
    case ErrorCode::NearPole: return "NearPole";
    case ErrorCode::TruncationTooShort: return "TruncationTooShort";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientCheckpoints: return "InsufficientCheckpoints";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

double BarnesParams::weight_sum() const noexcept {
  return std::accumulate(w_.begin(), w_.end(), 0.0);
}

double BarnesParams::weight_product() const noexcept {
  return std::accumulate(w_.begin(), w_.end(), 1.0, std::multiplies<>());
}

BarnesParams validate_params(double a, std::vector<double> w) {
  // NaN fails these comparisons and is rejected with the same codes.
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::NonPositiveShift, "shift a must be a positive finite real, got " + std::to_string(a));
  }
  if (w.empty()) throw Error(ErrorCode::EmptyWeights, "at least one weight is required");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight w_" + std::to_string(i + 1) + " must be positive, got " + std::to_string(w[i]));
    }
  }
  return BarnesParams(a, std::move(w));
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto* first = part.data();
    const auto* last = part.data() + part.size();
    if (!part.empty() && part.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
      throw Error(ErrorCode::InvalidArgument, "not an exact rational: '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return make(parse_int(text), 1);
  return make(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

WeightStructure analyze_weights(std::span<const Rational> w, std::optional<DeclaredMode> declared) {
  if (w.empty()) throw Error(ErrorCode::EmptyWeights, "at least one weight is required");
  for (const auto& v : w) {
    if (v.num <= 0) throw Error(ErrorCode::NonPositiveWeight, "rational weights must be positive");
  }
  if (declared == DeclaredMode::Independent) return WeightStructure::independent();

  std::uint64_t q = 1;
  for (const auto& v : w) {
    const auto den = static_cast<std::uint64_t>(v.den);
    const auto g = std::gcd(q, den);
    if (__builtin_mul_overflow(q / g, den, &q)) {
      throw Error(ErrorCode::Overflow, "common denominator exceeds 64 bits");
    }
  }
  WeightStructure out;
  out.kind = WeightKind::Rational;
  out.q = q;
  out.p.reserve(w.size());
  for (const auto& v : w) {
    std::uint64_t p = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(v.num), q / static_cast<std::uint64_t>(v.den), &p)) {
      throw Error(ErrorCode::Overflow, "lattice numerator exceeds 64 bits");
    }
    out.p.push_back(p);
  }
  return out;
}

WeightStructure analyze_weights(std::span<const double> w, std::optional<DeclaredMode> declared) {
  if (w.empty()) throw Error(ErrorCode::EmptyWeights, "at least one weight is required");
  if (declared == DeclaredMode::Rational) {
    throw Error(ErrorCode::ConflictingDeclaration,
                "rational mode needs exact weights (p/q); floating weights are never classified rational");
  }
  return WeightStructure::independent();
}

std::vector<std::uint64_t> denumerant_table(std::span<const std::uint64_t> p, std::uint64_t k_max) {
  if (p.empty()) throw Error(ErrorCode::EmptyWeights, "denumerant needs at least one part");
  for (auto pi : p) {
    if (pi == 0) throw Error(ErrorCode::NonPositiveWeight, "denumerant parts must be >= 1");
  }
  std::vector<std::uint64_t> table(k_max + 1, 0);
  table[0] = 1;
  // Classic coin-change DP: after processing part p_i, table[k] counts
  // representations using the first i parts only.
  for (auto pi : p) {
    for (std::uint64_t k = pi; k <= k_max; ++k) {
      if (__builtin_add_overflow(table[k], table[k - pi], &table[k])) {
        throw Error(ErrorCode::Overflow, "denumerant count exceeds 64 bits at k=" + std::to_string(k));
      }
    }
  }
  return table;
}

std::uint64_t denumerant(std::span<const std::uint64_t> p, std::uint64_t k) {
  return denumerant_table(p, k).back();
}

}  // namespace barnes
