#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace barnes {

/// Shift `a` and weights `w` of ζ_r(s, a, w). Construct through
/// validate_params; r is always w.size().
class BarnesParams {
 public:
  double a() const noexcept { return a_; }
  std::span<const double> w() const noexcept { return w_; }
  std::size_t r() const noexcept { return w_.size(); }

  double weight_sum() const noexcept;
  double weight_product() const noexcept;

  friend BarnesParams validate_params(double a, std::vector<double> w);

 private:
  BarnesParams(double a, std::vector<double> w) : a_(a), w_(std::move(w)) {}

  double a_;
  std::vector<double> w_;
};

BarnesParams validate_params(double a, std::vector<double> w);

/// Exact rational num/den with den > 0, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  /// Parses "p/q" or a bare integer "p".
  static Rational parse(std::string_view text);

  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class WeightKind { AssumedIndependent, Rational };
enum class DeclaredMode { Independent, Rational };

struct WeightStructure {
  WeightKind kind = WeightKind::AssumedIndependent;
  // Rational only: w_i = p[i] / q.
  std::uint64_t q = 0;
  std::vector<std::uint64_t> p;

  static WeightStructure independent() { return {}; }
};

/// Exact weights give the lattice data (q = lcm of denominators). A declared
/// Independent mode overrides it.
WeightStructure analyze_weights(std::span<const Rational> w,
                                std::optional<DeclaredMode> declared = std::nullopt);

/// Floating weights are never classified as rational; declaring Rational for
/// them is a ConflictingDeclaration.
WeightStructure analyze_weights(std::span<const double> w,
                                std::optional<DeclaredMode> declared = std::nullopt);

/// Number of m >= 0 with sum m_i p_i = k.
std::uint64_t denumerant(std::span<const std::uint64_t> p, std::uint64_t k);

/// denumerant(p, k) for every k in [0, k_max], from a single DP pass.
std::vector<std::uint64_t> denumerant_table(std::span<const std::uint64_t> p, std::uint64_t k_max);

}  // namespace barnes
