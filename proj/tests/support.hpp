#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace barnes::test {

inline double rel_diff(std::complex<double> got, std::complex<double> want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kPi = 3.141592653589793;

}  // namespace barnes::test
