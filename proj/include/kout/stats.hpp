#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kout {

struct PoolingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GofResult {
  double chi2 = 0.0;
  unsigned df = 0;
  double p_value = 1.0;
  std::size_t cells = 0;
};

inline double chi_square_p_value(double chi2, unsigned df) {
  if (df == 0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * chi2);
}

// Pearson goodness-of-fit against a fixed expected pmf. Adjacent cells are
// pooled until each expected count reaches min_expected; the tail remainder
// folds into the last cell. A single surviving cell degenerates to p = 1.
inline GofResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& expected_probs, double min_expected = 5.0) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  double mass = 0.0;
  for (auto p : expected_probs) {
    if (p < 0.0) throw std::invalid_argument("chi_square_gof: negative expected mass");
    mass += p;
  }
  if (total < min_expected || mass <= 0.0)
    throw PoolingError("chi_square_gof: too few observations to form a cell");

  std::vector<double> obs_cells, exp_cells;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += static_cast<double>(observed[i]);
    e_acc += expected_probs[i] / mass * total;
    if (e_acc >= min_expected) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
    } else {
      obs_cells.back() += o_acc;
      exp_cells.back() += e_acc;
    }
  }

  GofResult r;
  r.cells = exp_cells.size();
  if (r.cells <= 1) return r;  // degenerate: everything in one cell
  for (std::size_t i = 0; i < exp_cells.size(); ++i) {
    double d = obs_cells[i] - exp_cells[i];
    r.chi2 += d * d / exp_cells[i];
  }
  r.df = static_cast<unsigned>(r.cells - 1);
  r.p_value = chi_square_p_value(r.chi2, r.df);
  return r;
}

// Two-sample chi-square for histograms over a shared support.
inline GofResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b, double min_pool = 10.0) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double ta = 0.0, tb = 0.0;
  for (auto v : a) ta += static_cast<double>(v);
  for (auto v : b) tb += static_cast<double>(v);
  if (ta <= 0.0 || tb <= 0.0) throw PoolingError("chi_square_two_sample: empty sample");
  double k1 = std::sqrt(tb / ta), k2 = std::sqrt(ta / tb);

  GofResult r;
  double a_acc = 0.0, b_acc = 0.0;
  std::vector<std::pair<double, double>> cells;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a_acc += static_cast<double>(a[i]);
    b_acc += static_cast<double>(b[i]);
    if (a_acc + b_acc >= min_pool) {
      cells.emplace_back(a_acc, b_acc);
      a_acc = b_acc = 0.0;
    }
  }
  if ((a_acc > 0.0 || b_acc > 0.0) && !cells.empty()) {
    cells.back().first += a_acc;
    cells.back().second += b_acc;
  }
  r.cells = cells.size();
  if (r.cells <= 1) return r;
  for (auto& [ca, cb] : cells) {
    double d = k1 * ca - k2 * cb;
    r.chi2 += d * d / (ca + cb);
  }
  r.df = static_cast<unsigned>(r.cells - 1);
  r.p_value = chi_square_p_value(r.chi2, r.df);
  return r;
}

// Kolmogorov asymptotic tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// One-sample KS p-value of values against U(0,1), with the Stephens
// small-sample adjustment of the asymptotic tail.
inline double ks_uniform_p_value(std::vector<double> u) {
  if (u.empty()) throw std::invalid_argument("ks_uniform_p_value: empty sample");
  std::sort(u.begin(), u.end());
  double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double cdf = u[i];
    d = std::max(d, std::max((i + 1) / n - cdf, cdf - i / n));
  }
  double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace kout
