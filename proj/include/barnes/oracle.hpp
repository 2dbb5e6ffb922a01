#pragma once

#include <complex>
#include <cstdint>

#include "barnes/params.hpp"

namespace barnes::oracle {

using Complex = std::complex<double>;

/// Reference value with a strictly positive claimed absolute error.
struct OracleValue {
  Complex value;
  double claimed_abs_error = 0.0;
};

/// Hurwitz zeta ζ(s, α) by one-dimensional Euler–Maclaurin summation with
/// Bernoulli corrections through B_8. Intended for Re(s) > -1, s != 1.
OracleValue hurwitz_zeta(Complex s, double alpha, double abs_tol);

/// Plain partial sum over the cube 0 <= m_i <= cutoff; (cutoff+1)^r <= 1e7.
Complex naive_multisum(const BarnesParams& params, Complex s, std::uint64_t cutoff);

/// ζ_r(s, a, (1,…,1)) = Σ_N C(N+r-1, r-1) (a+N)^(-s), rewritten as a fixed
/// combination of ζ(s-j, a), j < r. Needs Re(s) > r and r <= 4.
OracleValue equal_weight_reduction(int r, Complex s, double a, double abs_tol);

}  // namespace barnes::oracle
