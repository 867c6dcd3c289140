#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kout {

// The preferential-attachment weight. Infinity selects the uniform model and
// is a distinct state, never a sentinel double: the two models differ
// structurally, not just in a parameter value.
class Alpha {
 public:
  static Alpha finite(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("alpha must be a positive finite real");
    return Alpha(v, false);
  }
  static Alpha infinite() { return Alpha(0.0, true); }

  bool is_infinite() const { return inf_; }
  double value() const {
    if (inf_) throw std::domain_error("alpha is infinite");
    return v_;
  }
  double value_or_inf() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

  friend bool operator==(const Alpha& a, const Alpha& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }

 private:
  Alpha(double v, bool inf) : v_(v), inf_(inf) {}
  double v_;
  bool inf_;
};

struct ModelParams {
  std::uint32_t n;
  std::uint32_t k;
  Alpha alpha;

  ModelParams(std::uint32_t n_, std::uint32_t k_, Alpha alpha_) : n(n_), k(k_), alpha(alpha_) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (k < 1) throw std::domain_error("k must be >= 1");
  }

  std::uint64_t kn() const { return static_cast<std::uint64_t>(n) * k; }
  double alpha_n() const { return alpha.value() * static_cast<double>(n); }
};

// A k-out digraph as the flat list of arc targets, vertex by vertex, each
// vertex's k arcs in chronological order. Vertices are 0-based here; the CLI
// and file formats translate to 1-based labels.
struct KOutDigraph {
  ModelParams params;
  std::vector<std::uint32_t> targets;  // size k*n, entry v*k+i = target of vertex v's arc i

  std::uint32_t target(std::uint32_t v, std::uint32_t i) const {
    return targets[static_cast<std::size_t>(v) * params.k + i];
  }
  bool valid() const {
    if (targets.size() != params.kn()) return false;
    for (auto t : targets)
      if (t >= params.n) return false;
    return true;
  }
};

struct InDegreeSequence {
  std::vector<std::uint32_t> counts;

  std::uint64_t sum() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

// Natural-log probability; -infinity encodes an impossible event.
struct LogProb {
  double value;
};

struct PowerSums {
  long long s1, s2, s3, s4;  // s_t = sum_j d_j^t
};

inline InDegreeSequence in_degrees(const KOutDigraph& g) {
  InDegreeSequence d;
  d.counts.assign(g.params.n, 0);
  for (auto t : g.targets) ++d.counts[t];
  return d;
}

// ln(a (a+1) ... (a+b-1)). Direct summation for small b; for large b the
// Gamma identity a^(rising b) = Gamma(a+b)/Gamma(a) is cheaper and accurate.
inline double log_rising_factorial(double a, std::uint64_t b) {
  if (!(a > 0.0)) throw std::domain_error("log_rising_factorial: a must be > 0");
  if (b == 0) return 0.0;
  if (b <= 32) {
    double s = 0.0;
    for (std::uint64_t i = 0; i < b; ++i) s += std::log(a + static_cast<double>(i));
    return s;
  }
  return std::lgamma(a + static_cast<double>(b)) - std::lgamma(a);
}

struct LogBracket {
  double lower, upper;
};

enum class BracketKind { rough, sharp };

// Log-space brackets for the rising factorial, valid for integer b with
// 0 <= b <= a+1 (the alternating-series bound on log(1+j/a) needs j/a <= 1).
//   rough: b ln a + b(b-1)/(2a) - b^3/(6a^2)  <=  ln a^(rising b)  <=  b ln a + b(b-1)/(2a)
//   sharp: lower = b ln a + b(b-1)/(2a) - b(b-1)(2b-1)/(12a^2), upper = lower + b^4/(12a^3)
inline LogBracket rising_factorial_bounds(double a, std::uint64_t b, BracketKind kind) {
  if (!(a > 0.0)) throw std::domain_error("rising_factorial_bounds: a must be > 0");
  if (static_cast<double>(b) > a + 1.0) throw std::domain_error("rising_factorial_bounds: need b <= a+1");
  double bd = static_cast<double>(b);
  double base = bd * std::log(a) + bd * (bd - 1.0) / (2.0 * a);
  if (kind == BracketKind::rough) {
    return {base - bd * bd * bd / (6.0 * a * a), base};
  }
  double lower = base - bd * (bd - 1.0) * (2.0 * bd - 1.0) / (12.0 * a * a);
  return {lower, lower + bd * bd * bd * bd / (12.0 * a * a * a)};
}

// ln P(M = g) from the product form of the attachment model: depends on g
// only through its in-degree sequence. Uniform model: every mapping has
// probability n^-(kn).
inline LogProb log_pmf_digraph(const ModelParams& p, const InDegreeSequence& d) {
  if (d.counts.size() != p.n || d.sum() != p.kn())
    throw std::invalid_argument("log_pmf_digraph: degree sequence does not match params");
  if (p.alpha.is_infinite())
    return {-static_cast<double>(p.kn()) * std::log(static_cast<double>(p.n))};
  double a = p.alpha.value();
  double s = 0.0;
  for (auto dj : d.counts) s += log_rising_factorial(a, dj);
  s -= log_rising_factorial(p.alpha_n(), p.kn());
  return {std::min(s, 0.0)};
}

inline LogProb log_pmf_digraph(const ModelParams& p, const KOutDigraph& g) {
  if (!g.valid() || g.params.n != p.n || g.params.k != p.k)
    throw std::invalid_argument("log_pmf_digraph: digraph does not conform to params");
  return log_pmf_digraph(p, in_degrees(g));
}

// ln P(D = d): the digraph pmf times the number of mappings realizing d,
// which is the multinomial coefficient (kn; d_1,...,d_n).
inline LogProb log_pmf_degree_sequence(const ModelParams& p, const InDegreeSequence& d) {
  if (d.counts.size() != p.n || d.sum() != p.kn())
    throw std::invalid_argument("log_pmf_degree_sequence: inadmissible degree sequence");
  double log_multinomial = std::lgamma(static_cast<double>(p.kn()) + 1.0);
  for (auto dj : d.counts) log_multinomial -= std::lgamma(static_cast<double>(dj) + 1.0);
  return {std::min(log_multinomial + log_pmf_digraph(p, d).value, 0.0)};
}

inline PowerSums power_sums(const InDegreeSequence& d) {
  unsigned __int128 s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (auto c : d.counts) {
    unsigned __int128 v = c;
    s1 += v;
    s2 += v * v;
    s3 += v * v * v;
    s4 += v * v * v * v;
  }
  constexpr auto mx = static_cast<unsigned __int128>(std::numeric_limits<long long>::max());
  if (s4 > mx || s3 > mx) throw std::overflow_error("power_sums: value exceeds 64-bit range");
  return {static_cast<long long>(s1), static_cast<long long>(s2), static_cast<long long>(s3),
          static_cast<long long>(s4)};
}

// Second moment of the unconditioned per-vertex degree variable:
// k + k^2 (alpha+1)/alpha for the attachment model, k^2 + k for the uniform
// (Poisson) one.
inline double mean_z_squared(std::uint32_t k, const Alpha& alpha) {
  double kd = k;
  if (alpha.is_infinite()) return kd * kd + kd;
  double a = alpha.value();
  return kd + kd * kd * (a + 1.0) / a;
}

// Centered, sqrt(n)-scaled sum of squared in-degrees:
// (s2 - n E[Z^2]) / sqrt(n), centered by the unconditioned second moment.
// The conditioned per-vertex moment differs by O(1/sqrt(n)) and is available
// through the exact moment layer if that centering is preferred. The uniform
// model is rejected unless the caller explicitly asks for the Poisson
// centering constant.
inline double centered_sum_squares(const ModelParams& p, long long s2, bool use_poisson_centering = false) {
  if (p.alpha.is_infinite() && !use_poisson_centering)
    throw std::domain_error("centered_sum_squares: infinite alpha requires poisson centering flag");
  double ez2 = use_poisson_centering ? mean_z_squared(p.k, Alpha::infinite()) : mean_z_squared(p.k, p.alpha);
  double nd = static_cast<double>(p.n);
  return (static_cast<double>(s2) - nd * ez2) / std::sqrt(nd);
}

}  // namespace kout
