#pragma once

#include <cmath>
#include <functional>
#include <span>

namespace seqtest {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kSqrtTwoPi = 2.506628274631000502415765284811;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrtTwoPi; }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) (upper); thin
// wrappers over boost::math kept out of line so boost headers stay local to
// one translation unit.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// max-stabilized log(sum(exp(v))).
double log_sum_exp(std::span<const double> v);

// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
double bvn_cdf(double h, double k, double rho);

// Adaptive Gauss-Kronrod integration on [a,b] (either bound may be infinite)
// to the requested relative tolerance; throws numeric_error (message carries
// the achieved estimate) when the error estimate does not meet it.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol);

}  // namespace seqtest
