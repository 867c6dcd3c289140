#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kout/model.hpp"

namespace kout::exact {

using Rational = mpq_class;
using Integer = mpz_class;

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration cost grows super-polynomially in kn; refuse beyond the budget.
struct EnumBudget {
  std::uint64_t max_kn = 24;
};

inline Rational make_rational(Integer num, Integer den) {
  Rational r(std::move(num), std::move(den));
  r.canonicalize();
  return r;
}

inline Integer factorial(std::uint64_t m) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(m));
  return r;
}

inline Integer binomial(std::uint64_t n, std::uint64_t r) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return b;
}

inline Integer int_pow(std::uint64_t base, std::uint64_t e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(e));
  return r;
}

// Falling factorial (x)_l; zero once l exceeds x.
inline Integer falling(std::uint64_t x, unsigned l) {
  Integer r = 1;
  for (unsigned i = 0; i < l; ++i) {
    if (i > x) return Integer(0);
    r *= Integer(static_cast<unsigned long>(x - i));
  }
  return r;
}

inline Rational rising(const Rational& a, std::uint64_t b) {
  Rational r = 1;
  Rational term = a;
  for (std::uint64_t i = 0; i < b; ++i) {
    r *= term;
    term += 1;
  }
  return r;
}

// Stirling partition numbers {s over l} by the standard recurrence.
inline std::uint64_t stirling_partition(unsigned s, unsigned l) {
  if (l > s) return 0;
  if (s == 0) return l == 0 ? 1 : 0;
  if (l == 0) return 0;
  std::vector<std::vector<std::uint64_t>> t(s + 1, std::vector<std::uint64_t>(s + 1, 0));
  t[0][0] = 1;
  for (unsigned i = 1; i <= s; ++i)
    for (unsigned j = 1; j <= i; ++j) t[i][j] = j * t[i - 1][j] + t[i - 1][j - 1];
  return t[s][l];
}

// Number of ordered degree sequences: C(kn + n - 1, n - 1).
inline Integer admissible_sequence_count(std::uint32_t n, std::uint32_t k) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  return binomial(kn + n - 1, n - 1);
}

// Count of partitions of `total` into at most `max_parts` positive parts.
inline std::uint64_t partition_count(std::uint64_t total, std::uint32_t max_parts) {
  std::vector<std::uint64_t> dp(total + 1, 0);
  dp[0] = 1;
  for (std::uint32_t p = 1; p <= std::min<std::uint64_t>(max_parts, total); ++p)
    for (std::uint64_t t = p; t <= total; ++t) dp[t] += dp[t - p];
  return dp[total];
}

// Visit every partition of `total` into at most `max_parts` positive parts,
// in nonincreasing order of parts.
template <class F>
void for_each_partition(std::uint64_t total, std::uint32_t max_parts, F&& f) {
  std::vector<std::uint32_t> parts;
  auto rec = [&](auto&& self, std::uint64_t remaining, std::uint32_t max_part, std::uint32_t slots) -> void {
    if (remaining == 0) {
      f(static_cast<const std::vector<std::uint32_t>&>(parts));
      return;
    }
    if (slots == 0) return;
    auto hi = static_cast<std::uint32_t>(std::min<std::uint64_t>(max_part, remaining));
    for (std::uint32_t p = hi; p >= 1; --p) {
      if (static_cast<std::uint64_t>(p) * slots < remaining) break;  // cannot finish with parts <= p
      parts.push_back(p);
      self(self, remaining - p, p, slots - 1);
      parts.pop_back();
    }
  };
  rec(rec, total, total == 0 ? 1 : static_cast<std::uint32_t>(std::min<std::uint64_t>(total, ~0u)), max_parts);
}

// Multinomial coefficient (kn; d_1..d_n) for the partition's parts (zero
// entries contribute 0! = 1).
inline Integer multinomial_partition(std::uint64_t kn, const std::vector<std::uint32_t>& parts) {
  Integer r = factorial(kn);
  for (auto p : parts) r /= factorial(p);
  return r;
}

// Number of ordered sequences realizing the partition: n! over the
// factorials of the repeat counts of each distinct value, zeros included.
inline Integer ordering_multiplicity(std::uint32_t n, const std::vector<std::uint32_t>& parts,
                                     std::uint32_t zeros) {
  Integer r = factorial(n) / factorial(zeros);
  std::size_t i = 0;
  while (i < parts.size()) {
    std::size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    r /= factorial(j - i);
    i = j;
  }
  return r;
}

inline void check_budget(std::uint32_t n, std::uint32_t k, const EnumBudget& budget) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  if (kn > budget.max_kn) {
    std::ostringstream os;
    os << "enumeration budget exceeded: kn = " << kn << " > " << budget.max_kn;
    throw BudgetExceeded(os.str());
  }
}

// Shared partition walk handing each consumer the partition together with its
// ordering multiplicity and multinomial coefficient.
template <class F>
void walk_degree_classes(std::uint32_t n, std::uint32_t k, const EnumBudget& budget, F&& f) {
  check_budget(n, k, budget);
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  for_each_partition(kn, n, [&](const std::vector<std::uint32_t>& parts) {
    auto zeros = static_cast<std::uint32_t>(n - parts.size());
    f(parts, zeros, ordering_multiplicity(n, parts, zeros), multinomial_partition(kn, parts));
  });
}

// P(D = d) for one ordered admissible sequence with the given nonzero parts.
inline Rational pmf_sequence(std::uint32_t n, std::uint32_t k, const Rational& alpha,
                             const std::vector<std::uint32_t>& parts) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  Rational w = 1;
  for (auto p : parts) w *= rising(alpha, p);
  return Rational(multinomial_partition(kn, parts)) * w / rising(alpha * static_cast<long>(n), kn);
}

struct ExactDistribution {
  std::vector<long long> support;  // sorted ascending
  std::vector<Rational> probs;

  Rational total() const {
    Rational t = 0;
    for (const auto& p : probs) t += p;
    return t;
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"support\":[";
    for (std::size_t i = 0; i < support.size(); ++i) os << (i ? "," : "") << support[i];
    os << "],\"probs\":[";
    for (std::size_t i = 0; i < probs.size(); ++i)
      os << (i ? "," : "") << '"' << probs[i].get_num().get_str() << '/' << probs[i].get_den().get_str()
         << '"';
    os << "]}";
    return os.str();
  }
};

// Exact TV distance between the attachment model (rational alpha) and the
// uniform model, as half the weighted L1 gap over degree classes.
inline Rational exact_tv_full(std::uint32_t n, std::uint32_t k, const Rational& alpha,
                              const EnumBudget& budget = {}) {
  if (alpha <= 0) throw std::domain_error("exact_tv_full: alpha must be > 0");
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  std::vector<Rational> rf(kn + 1);
  rf[0] = 1;
  for (std::uint64_t d = 1; d <= kn; ++d) rf[d] = rf[d - 1] * (alpha + static_cast<long>(d - 1));
  Rational rf_total = rising(alpha * static_cast<long>(n), kn);
  Rational uniform = make_rational(1, int_pow(n, kn));
  Rational acc = 0;
  walk_degree_classes(n, k, budget, [&](const std::vector<std::uint32_t>& parts, std::uint32_t,
                                        const Integer& mult, const Integer& multinom) {
    Rational w = 1;
    for (auto p : parts) w *= rf[p];
    // per-mapping probability; both models are uniform given the degree
    // class, so the class contributes (number of mappings) * |gap|
    Rational map_prob = w / rf_total;
    acc += Rational(mult * multinom) * abs(map_prob - uniform);
  });
  return acc / 2;
}

// Exact law of X = sum of squared in-degrees; nullopt alpha selects the
// uniform model.
inline ExactDistribution exact_x_distribution(std::uint32_t n, std::uint32_t k,
                                              const std::optional<Rational>& alpha,
                                              const EnumBudget& budget = {}) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  std::vector<Rational> rf;
  Rational rf_total = 1;
  if (alpha) {
    rf.assign(kn + 1, Rational(1));
    for (std::uint64_t d = 1; d <= kn; ++d) rf[d] = rf[d - 1] * (*alpha + static_cast<long>(d - 1));
    rf_total = rising(*alpha * static_cast<long>(n), kn);
  }
  Rational uniform = make_rational(1, int_pow(n, kn));
  std::map<long long, Rational> law;
  walk_degree_classes(n, k, budget, [&](const std::vector<std::uint32_t>& parts, std::uint32_t,
                                        const Integer& mult, const Integer& multinom) {
    long long x = 0;
    for (auto p : parts) x += static_cast<long long>(p) * p;
    Rational class_prob;
    if (alpha) {
      Rational w = 1;
      for (auto p : parts) w *= rf[p];
      class_prob = Rational(mult * multinom) * w / rf_total;
    } else {
      class_prob = Rational(mult * multinom) * uniform;
    }
    law[x] += class_prob;
  });
  ExactDistribution dist;
  for (auto& [x, p] : law) {
    dist.support.push_back(x);
    dist.probs.push_back(p);
  }
  return dist;
}

inline Rational tv_between(const ExactDistribution& p, const ExactDistribution& q) {
  Rational sum = 0;
  std::size_t i = 0, j = 0;
  while (i < p.support.size() || j < q.support.size()) {
    if (j == q.support.size() || (i < p.support.size() && p.support[i] < q.support[j])) {
      sum += abs(p.probs[i]);
      ++i;
    } else if (i == p.support.size() || q.support[j] < p.support[i]) {
      sum += abs(q.probs[j]);
      ++j;
    } else {
      sum += abs(p.probs[i] - q.probs[j]);
      ++i;
      ++j;
    }
  }
  return sum / 2;
}

// TV distance between the X laws of the two models; never exceeds the full
// TV distance.
inline Rational exact_tv_x(std::uint32_t n, std::uint32_t k, const Rational& alpha,
                           const EnumBudget& budget = {}) {
  return tv_between(exact_x_distribution(n, k, alpha, budget), exact_x_distribution(n, k, std::nullopt, budget));
}

// ---------------------------------------------------------------------------
// Moments of a single in-degree, and mixed moments of a pair, in closed form.
// nullopt alpha selects the uniform model.

inline Rational moment_factorial(std::uint32_t n, std::uint32_t k, const std::optional<Rational>& alpha,
                                 unsigned l) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  if (!alpha) return make_rational(falling(kn, l), int_pow(n, l));
  return rising(*alpha, l) * Rational(falling(kn, l)) / rising(*alpha * static_cast<long>(n), l);
}

inline Rational moment(std::uint32_t n, std::uint32_t k, const std::optional<Rational>& alpha, unsigned s) {
  Rational m = 0;
  for (unsigned l = 1; l <= s; ++l)
    m += Rational(static_cast<unsigned long>(stirling_partition(s, l))) * moment_factorial(n, k, alpha, l);
  return m;
}

inline Rational mixed_factorial(std::uint32_t n, std::uint32_t k, const std::optional<Rational>& alpha,
                                unsigned l, unsigned m) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  if (!alpha) return make_rational(falling(kn, l + m), int_pow(n, l + m));
  return rising(*alpha, l) * rising(*alpha, m) * Rational(falling(kn, l + m)) /
         rising(*alpha * static_cast<long>(n), l + m);
}

// Double-precision versions of the same formulas, valid for any positive
// alpha (the critical scaling uses alpha = beta*sqrt(n), an irrational).

namespace detail {

inline double rising_fp(double a, unsigned b) {
  double r = 1.0;
  for (unsigned i = 0; i < b; ++i) r *= a + i;
  return r;
}

inline double falling_fp(double x, unsigned l) {
  double r = 1.0;
  for (unsigned i = 0; i < l; ++i) r *= x - i;
  return r;
}

}  // namespace detail

inline double moment_factorial_fp(std::uint32_t n, std::uint32_t k, const Alpha& alpha, unsigned l) {
  double kn = static_cast<double>(n) * k;
  if (static_cast<double>(l) > kn) return 0.0;
  if (alpha.is_infinite()) return detail::falling_fp(kn, l) / std::pow(static_cast<double>(n), l);
  double a = alpha.value();
  return detail::rising_fp(a, l) * detail::falling_fp(kn, l) / detail::rising_fp(a * n, l);
}

inline double moment_fp(std::uint32_t n, std::uint32_t k, const Alpha& alpha, unsigned s) {
  double m = 0.0;
  for (unsigned l = 1; l <= s; ++l)
    m += static_cast<double>(stirling_partition(s, l)) * moment_factorial_fp(n, k, alpha, l);
  return m;
}

inline double mixed_factorial_fp(std::uint32_t n, std::uint32_t k, const Alpha& alpha, unsigned l,
                                 unsigned m) {
  double kn = static_cast<double>(n) * k;
  if (static_cast<double>(l + m) > kn) return 0.0;
  if (alpha.is_infinite()) return detail::falling_fp(kn, l + m) / std::pow(static_cast<double>(n), l + m);
  double a = alpha.value();
  return detail::rising_fp(a, l) * detail::rising_fp(a, m) * detail::falling_fp(kn, l + m) /
         detail::rising_fp(a * n, l + m);
}

// Var[sum_j D_j^s] from the closed-form moments:
// n E[D^2s] + n(n-1) E[D_1^s D_2^s] - (n E[D^s])^2.
inline double var_sum_power_fp(std::uint32_t n, std::uint32_t k, const Alpha& alpha, unsigned s) {
  double nd = n;
  double mu = moment_fp(n, k, alpha, s);
  double cross = 0.0;
  for (unsigned l = 1; l <= s; ++l)
    for (unsigned m = 1; m <= s; ++m)
      cross += static_cast<double>(stirling_partition(s, l)) * static_cast<double>(stirling_partition(s, m)) *
               mixed_factorial_fp(n, k, alpha, l, m);
  return nd * moment_fp(n, k, alpha, 2 * s) + nd * (nd - 1.0) * cross - (nd * mu) * (nd * mu);
}

// ln P(Z_1 + ... + Z_n = kn) for the IID unconditioned degree variables:
// attachment model uses the generalized negative binomial sum, the uniform
// model the Poisson(kn) point mass.
inline double log_prob_sum_z_equals_kn(std::uint32_t n, std::uint32_t k, const Alpha& alpha) {
  double kn = static_cast<double>(n) * k;
  if (alpha.is_infinite()) return -kn + kn * std::log(kn) - std::lgamma(kn + 1.0);
  double a = alpha.value();
  double an = a * n;
  return log_rising_factorial(an, static_cast<std::uint64_t>(n) * k) - std::lgamma(kn + 1.0) +
         an * std::log(a / (a + k)) + kn * std::log(k / (a + k));
}

// ---------------------------------------------------------------------------
// Rational intervals: the route for irrational alpha (e.g. beta*sqrt(n)).
// Endpoints are exact rationals; every operation rounds outward, so the
// result interval is a rigorous enclosure and its width is the reported
// error bound. Default bracket precision leaves > 50 significant digits.

struct RatInterval {
  Rational lo, hi;

  RatInterval() : lo(0), hi(0) {}
  RatInterval(Rational v) : lo(v), hi(std::move(v)) {}
  RatInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("RatInterval: lo > hi");
  }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
};

inline RatInterval operator+(const RatInterval& a, const RatInterval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}
inline RatInterval operator-(const RatInterval& a, const RatInterval& b) {
  return {a.lo - b.hi, a.hi - b.lo};
}
inline RatInterval operator*(const RatInterval& a, const RatInterval& b) {
  Rational c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
  return {std::min(std::min(c1, c2), std::min(c3, c4)), std::max(std::max(c1, c2), std::max(c3, c4))};
}
inline RatInterval operator/(const RatInterval& a, const RatInterval& b) {
  if (b.lo <= 0 && b.hi >= 0) throw std::domain_error("RatInterval: division by interval containing 0");
  RatInterval recip(Rational(1) / b.hi, Rational(1) / b.lo);
  return a * recip;
}
inline RatInterval abs_interval(const RatInterval& a) {
  if (a.lo >= 0) return a;
  if (a.hi <= 0) return {Rational(-a.hi), Rational(-a.lo)};
  Rational neg_lo = -a.lo;
  return {Rational(0), std::max(neg_lo, a.hi)};
}

// Rational bracket of x^(1/q) with denominator den(x) * 2^bits:
// x^(1/q) = (num * den^(q-1))^(1/q) / den, floor q-th root on the scaled
// integer gives the lower endpoint.
inline RatInterval root_interval(const Rational& x, unsigned long q, unsigned bits = 200) {
  if (x < 0) throw std::domain_error("root_interval: negative argument");
  if (q == 0) throw std::domain_error("root_interval: zeroth root");
  Integer num = x.get_num(), den = x.get_den();
  Integer m = num;
  for (unsigned long i = 1; i < q; ++i) m *= den;
  Integer scaled = m;
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits * q);
  Integer root;
  mpz_root(root.get_mpz_t(), scaled.get_mpz_t(), q);
  Integer out_den = den;
  mpz_mul_2exp(out_den.get_mpz_t(), out_den.get_mpz_t(), bits);
  return {make_rational(root, out_den), make_rational(root + 1, out_den)};
}

// Rational bracket of sqrt(x) with denominator 2^bits.
inline RatInterval sqrt_interval(const Rational& x, unsigned bits = 200) {
  return root_interval(x, 2, bits);
}

// Rational bracket of x^(p/q) for a positive rational exponent.
inline RatInterval rational_power_interval(const Rational& x, const Rational& exponent,
                                           unsigned bits = 200) {
  if (x <= 0 || exponent <= 0) throw std::domain_error("rational_power_interval: positive arguments only");
  if (!exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p())
    throw std::domain_error("rational_power_interval: exponent too complex");
  unsigned long p = exponent.get_num().get_ui();
  unsigned long q = exponent.get_den().get_ui();
  Rational xp = 1;
  for (unsigned long i = 0; i < p; ++i) xp *= x;
  return root_interval(xp, q, bits);
}

inline RatInterval rising_interval(const RatInterval& a, std::uint64_t b) {
  RatInterval r{Rational(1)};
  RatInterval term = a;
  for (std::uint64_t i = 0; i < b; ++i) {
    r = r * term;
    term = term + RatInterval(Rational(1));
  }
  return r;
}

// Interval counterpart of exact_tv_full for a bracketed alpha.
inline RatInterval exact_tv_full_interval(std::uint32_t n, std::uint32_t k, const RatInterval& alpha,
                                          const EnumBudget& budget = {}) {
  if (alpha.lo <= 0) throw std::domain_error("exact_tv_full_interval: alpha must be > 0");
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  std::vector<RatInterval> rf(kn + 1);
  rf[0] = RatInterval(Rational(1));
  for (std::uint64_t d = 1; d <= kn; ++d)
    rf[d] = rf[d - 1] * (alpha + RatInterval(Rational(static_cast<long>(d - 1))));
  RatInterval alpha_n = alpha * RatInterval(Rational(static_cast<long>(n)));
  RatInterval rf_total = rising_interval(alpha_n, kn);
  RatInterval uniform{make_rational(1, int_pow(n, kn))};
  RatInterval acc{Rational(0)};
  walk_degree_classes(n, k, budget, [&](const std::vector<std::uint32_t>& parts, std::uint32_t,
                                        const Integer& mult, const Integer& multinom) {
    RatInterval w{Rational(1)};
    for (auto p : parts) w = w * rf[p];
    RatInterval map_prob = w / rf_total;
    acc = acc + RatInterval(Rational(mult * multinom)) * abs_interval(map_prob - uniform);
  });
  return acc * RatInterval(make_rational(1, 2));
}

// Interval counterpart of exact_tv_x.
inline RatInterval exact_tv_x_interval(std::uint32_t n, std::uint32_t k, const RatInterval& alpha,
                                       const EnumBudget& budget = {}) {
  std::uint64_t kn = static_cast<std::uint64_t>(n) * k;
  std::vector<RatInterval> rf(kn + 1);
  rf[0] = RatInterval(Rational(1));
  for (std::uint64_t d = 1; d <= kn; ++d)
    rf[d] = rf[d - 1] * (alpha + RatInterval(Rational(static_cast<long>(d - 1))));
  RatInterval rf_total = rising_interval(alpha * RatInterval(Rational(static_cast<long>(n))), kn);
  Rational uniform = make_rational(1, int_pow(n, kn));
  std::map<long long, RatInterval> law_a;
  std::map<long long, Rational> law_u;
  walk_degree_classes(n, k, budget, [&](const std::vector<std::uint32_t>& parts, std::uint32_t,
                                        const Integer& mult, const Integer& multinom) {
    long long x = 0;
    for (auto p : parts) x += static_cast<long long>(p) * p;
    RatInterval w{Rational(1)};
    for (auto p : parts) w = w * rf[p];
    RatInterval cls = RatInterval(Rational(mult * multinom)) * w / rf_total;
    auto [it, inserted] = law_a.emplace(x, cls);
    if (!inserted) it->second = it->second + cls;
    law_u[x] += Rational(mult * multinom) * uniform;
  });
  RatInterval acc{Rational(0)};
  for (const auto& [x, pa] : law_a) acc = acc + abs_interval(pa - RatInterval(law_u[x]));
  return acc * RatInterval(make_rational(1, 2));
}

}  // namespace kout::exact
