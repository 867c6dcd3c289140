#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kout {

// Closed-form limit objects for the critical scaling alpha = beta*sqrt(n):
// the 2x2 covariance of the centered (sum, sum-of-squares) pair, its Gaussian
// density, the scalar density of the centered sum of squares, the pointwise
// TV kernel, and the limiting TV constant.

struct CovMatrix2 {
  double m11, m12, m22;  // symmetric matrix
  double i11, i12, i22;  // its inverse
  double det;
};

// Covariance of (Z, Z^2) in the Poisson(k) limit:
//   [[k, 2k^2+k], [2k^2+k, 4k^3+6k^2+k]], det = 2k^3.
inline CovMatrix2 limit_cov_matrix(std::uint32_t k) {
  if (k < 1) throw std::domain_error("limit_cov_matrix: k must be >= 1");
  double kd = k;
  CovMatrix2 c{};
  c.m11 = kd;
  c.m12 = 2.0 * kd * kd + kd;
  c.m22 = 4.0 * kd * kd * kd + 6.0 * kd * kd + kd;
  c.det = c.m11 * c.m22 - c.m12 * c.m12;
  c.i11 = c.m22 / c.det;
  c.i12 = -c.m12 / c.det;
  c.i22 = c.m11 / c.det;
  return c;
}

// Density of the centered 2-D Gaussian limit of the pair sums.
inline double pair_limit_density(std::uint32_t k, double x1, double x2) {
  CovMatrix2 c = limit_cov_matrix(k);
  double quad = c.i11 * x1 * x1 + 2.0 * c.i12 * x1 * x2 + c.i22 * x2 * x2;
  return std::exp(-0.5 * quad) / (2.0 * 3.14159265358979323846 * std::sqrt(c.det));
}

// Density of the scalar Gaussian limit of the centered sum of squared
// in-degrees: mean 0, variance 2k^2.
inline double scalar_limit_density(std::uint32_t k, double x) {
  double kd = k;
  return std::exp(-x * x / (4.0 * kd * kd)) / (2.0 * kd * std::sqrt(3.14159265358979323846));
}

// Pointwise TV kernel f(x) = |1 - exp(-k^2/(4 beta^2) - x/(2 beta))|.
inline double tv_kernel(std::uint32_t k, double beta, double x) {
  if (!(beta > 0.0)) throw std::domain_error("tv_kernel: beta must be > 0");
  double kd = k;
  return std::abs(1.0 - std::exp(-kd * kd / (4.0 * beta * beta) - x / (2.0 * beta)));
}

// f evaluated with its argument floored at -a, which makes it bounded.
inline double tv_kernel_floored(std::uint32_t k, double beta, double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("tv_kernel_floored: a must be > 0");
  return tv_kernel(k, beta, std::max(x, -a));
}

inline double normal_pdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * 3.14159265358979323846));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace detail {

template <class F>
double gk_integrate(F&& f, double a, double b, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, 15, tol);
}

}  // namespace detail

// Limiting TV constant (1/2) E|1 - exp(-N)| with N ~ Normal(mu, sigma^2),
// mu = k^2/(4 beta^2), sigma^2 = k^2/(2 beta^2), by adaptive Gauss-Kronrod
// quadrature split at the kink of |1 - e^{-x}| at 0. Because sigma^2 = 2 mu,
// the exp-tilted part of the integrand is a Gaussian bump centered at
// mu - sigma^2 = -mu, so the range must cover both bumps: [-mu - 14 sigma,
// mu + 14 sigma].
inline double limit_tv_quadrature(std::uint32_t k, double beta, double tol = 1e-12) {
  if (!(beta > 0.0)) throw std::domain_error("limit_tv_quadrature: beta must be > 0");
  double kd = k;
  double mu = kd * kd / (4.0 * beta * beta);
  double sigma = kd / (std::sqrt(2.0) * beta);
  auto f = [&](double x) { return 0.5 * std::abs(1.0 - std::exp(-x)) * normal_pdf(x, mu, sigma); };
  double lo = -mu - 14.0 * sigma;
  double hi = mu + 14.0 * sigma;
  return detail::gk_integrate(f, lo, 0.0, tol) + detail::gk_integrate(f, 0.0, hi, tol);
}

// Closed form of the same constant: with mu = sigma^2/2 the expectation
// collapses to 2 Phi(mu/sigma) - 1 = 2 Phi(k/(2 sqrt(2) beta)) - 1.
// Validated against the quadrature in the test suite before being trusted.
inline double limit_tv(std::uint32_t k, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("limit_tv: beta must be > 0");
  double kd = k;
  return 2.0 * normal_cdf(kd / (2.0 * std::sqrt(2.0) * beta)) - 1.0;
}

// Quadrature of E[exp(-N)] under the same Gaussian; equals 1 exactly because
// mu = sigma^2/2. Exposed for the identity check.
inline double limit_exp_moment_quadrature(std::uint32_t k, double beta, double tol = 1e-12) {
  double kd = k;
  double mu = kd * kd / (4.0 * beta * beta);
  double sigma = kd / (std::sqrt(2.0) * beta);
  auto f = [&](double x) { return std::exp(-x) * normal_pdf(x, mu, sigma); };
  return detail::gk_integrate(f, mu - 14.0 * sigma, mu + 14.0 * sigma, tol);
}

}  // namespace kout
