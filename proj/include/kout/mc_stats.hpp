#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kout/exact.hpp"
#include "kout/limits.hpp"
#include "kout/model.hpp"
#include "kout/parallel.hpp"
#include "kout/rng.hpp"
#include "kout/samplers.hpp"
#include "kout/stats.hpp"

namespace kout::mc {

// Each logical role inside an estimator draws from its own block of streams,
// so the two models of a comparison (and the bootstrap) never share draws.
namespace stream_block {
inline constexpr std::uint64_t model_a = 0;
inline constexpr std::uint64_t model_b = std::uint64_t(1) << 40;
inline constexpr std::uint64_t bootstrap = std::uint64_t(1) << 41;
}  // namespace stream_block

struct EstimateWithError {
  double estimate = 0.0;
  double std_error = 0.0;
  double bias_bound = 0.0;
  std::uint64_t n_samples = 0;
  std::string method;
};

using CountMap = std::unordered_map<long long, std::uint64_t>;

inline void merge_counts(CountMap& into, const CountMap& from) {
  for (auto& [k, v] : from) into[k] += v;
}

// Degree power sums of one uniform-model sample: kn throws with an
// O(touched) reset between samples.
class UniformUrn {
 public:
  UniformUrn(std::uint32_t n, std::uint32_t k, bool track_higher = false)
      : n_(n), kn_(static_cast<std::uint64_t>(n) * k), track_higher_(track_higher), counts_(n, 0) {
    touched_.reserve(std::min<std::uint64_t>(kn_, n_));
  }

  void sample(Rng& rng) {
    for (auto j : touched_) counts_[j] = 0;
    touched_.clear();
    s2_ = s3_ = s4_ = 0;
    for (std::uint64_t t = 0; t < kn_; ++t) {
      std::uint32_t j = rng.below(n_);
      auto d = static_cast<long long>(counts_[j]++);
      if (d == 0) touched_.push_back(j);
      s2_ += 2 * d + 1;
      if (track_higher_) {
        s3_ += 3 * d * d + 3 * d + 1;
        s4_ += 4 * d * d * d + 6 * d * d + 4 * d + 1;
      }
    }
  }

  long long s2() const { return s2_; }
  long long s3() const { return s3_; }
  long long s4() const { return s4_; }

 private:
  std::uint32_t n_;
  std::uint64_t kn_;
  bool track_higher_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> touched_;
  long long s2_ = 0, s3_ = 0, s4_ = 0;
};

namespace detail {

constexpr std::uint64_t kUrnChunk = 4096;
constexpr std::uint64_t kPairChunk = 256;
constexpr std::uint64_t kBootstrapReplicates = 100;

// X = sum of squared in-degrees under the attachment model, one replicate
// per stream starting at stream_base + replicate index.
inline CountMap x_counts_attachment(const ModelParams& p, std::uint64_t m, RngSeed seed,
                                    std::uint64_t stream_base, unsigned threads) {
  auto partials = run_chunked<CountMap>(
      m, kUrnChunk, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, CountMap& out) {
        PolyaUrn urn(p.n, p.k, p.alpha.value());
        for (std::uint64_t r = begin; r < end; ++r) {
          urn.reset();
          Rng rng(RngSeed{seed.seed, seed.stream + stream_base + r});
          for (std::uint64_t t = 0; t < p.kn(); ++t) urn.step(rng);
          ++out[urn.s2()];
        }
      });
  CountMap all;
  for (auto& part : partials) merge_counts(all, part);
  return all;
}

inline CountMap x_counts_uniform(const ModelParams& p, std::uint64_t m, RngSeed seed,
                                 std::uint64_t stream_base, unsigned threads) {
  auto partials = run_chunked<CountMap>(
      m, kUrnChunk, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, CountMap& out) {
        UniformUrn urn(p.n, p.k);
        for (std::uint64_t r = begin; r < end; ++r) {
          Rng rng(RngSeed{seed.seed, seed.stream + stream_base + r});
          urn.sample(rng);
          ++out[urn.s2()];
        }
      });
  CountMap all;
  for (auto& part : partials) merge_counts(all, part);
  return all;
}

inline double tv_of_counts(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                           double m) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    tv += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return tv / (2.0 * m);
}

}  // namespace detail

// Plug-in TV estimate between the X laws of the attachment model p_alpha and
// the uniform model with the same (n, k): half the L1 gap of the empirical
// pmfs over the shared integer lattice. The estimator is biased upward by
// sampling noise; the reported bias bound is
//   (1/2) sum_s E|p_hat - p| + E|q_hat - q|  ~=  sqrt(2/pi)/(2 sqrt(m)) *
//   (sum_s sqrt(p_hat_s) + sum_s sqrt(q_hat_s))  <=  sqrt(2 S / (pi m))
// with S the support size. The standard error is a bootstrap over the
// empirical pmfs.
inline EstimateWithError estimate_tv_x_plugin(const ModelParams& p_alpha, std::uint64_t m, RngSeed seed,
                                              unsigned threads = 0) {
  if (m < 10000) throw std::invalid_argument("estimate_tv_x_plugin: need m >= 1e4");
  // infinite alpha compares the uniform model with itself (null configuration)
  CountMap ca = p_alpha.alpha.is_infinite()
                    ? detail::x_counts_uniform(p_alpha, m, seed, stream_block::model_a, threads)
                    : detail::x_counts_attachment(p_alpha, m, seed, stream_block::model_a, threads);
  CountMap cb = detail::x_counts_uniform(p_alpha, m, seed, stream_block::model_b, threads);

  std::vector<long long> support;
  support.reserve(ca.size() + cb.size());
  for (auto& [x, c] : ca) support.push_back(x);
  for (auto& [x, c] : cb)
    if (!ca.count(x)) support.push_back(x);
  std::sort(support.begin(), support.end());

  std::vector<std::uint64_t> a(support.size(), 0), b(support.size(), 0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (auto it = ca.find(support[i]); it != ca.end()) a[i] = it->second;
    if (auto it = cb.find(support[i]); it != cb.end()) b[i] = it->second;
  }

  double md = static_cast<double>(m);
  EstimateWithError e;
  e.n_samples = m;
  e.estimate = detail::tv_of_counts(a, b, md);

  double sqrt_sum = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    sqrt_sum += std::sqrt(static_cast<double>(a[i]) / md) + std::sqrt(static_cast<double>(b[i]) / md);
  e.bias_bound = std::sqrt(2.0 / 3.14159265358979323846) / (2.0 * std::sqrt(md)) * sqrt_sum;

  // multinomial bootstrap of both empirical pmfs
  std::vector<double> wa(a.begin(), a.end()), wb(b.begin(), b.end());
  AliasTable ta(wa), tb(wb);
  auto boots = run_chunked<double>(
      detail::kBootstrapReplicates, 1, threads,
      [&](std::uint64_t c, std::uint64_t, std::uint64_t, double& out) {
        Rng rng(RngSeed{seed.seed, seed.stream + stream_block::bootstrap + c});
        std::vector<std::uint64_t> ra(support.size(), 0), rb(support.size(), 0);
        for (std::uint64_t i = 0; i < m; ++i) ++ra[ta.sample(rng)];
        for (std::uint64_t i = 0; i < m; ++i) ++rb[tb.sample(rng)];
        out = detail::tv_of_counts(ra, rb, md);
      });
  double bs = 0.0, bs2 = 0.0;
  for (double v : boots) {
    bs += v;
    bs2 += v * v;
  }
  double bn = static_cast<double>(boots.size());
  double mean = bs / bn;
  e.std_error = std::sqrt(std::max(0.0, bs2 / bn - mean * mean));

  std::ostringstream method;
  method << "plugin;support=" << support.size() << ";bootstrap=" << boots.size();
  e.method = method.str();
  return e;
}

// TV estimate at the critical scaling alpha = beta*sqrt(n) from the
// attachment model alone: the mean of (1/2) f(S) where S is the centered,
// scaled sum of squared in-degrees. The vanishing-probability truncation set
// is dropped; f's argument is floored far outside the realized range only to
// keep the exponential finite.
inline EstimateWithError estimate_tv_via_f(std::uint32_t n, std::uint32_t k, double beta, std::uint64_t m,
                                           RngSeed seed, unsigned threads = 0) {
  if (!(beta > 0.0)) throw std::domain_error("estimate_tv_via_f: beta must be > 0");
  double alpha = beta * std::sqrt(static_cast<double>(n));
  ModelParams p(n, k, Alpha::finite(alpha));
  double ez2 = mean_z_squared(k, p.alpha);
  double nd = static_cast<double>(n);
  double sqrt_n = std::sqrt(nd);
  double floor_at = 20.0 * beta * (static_cast<double>(k) * k / (4.0 * beta * beta) + 30.0);

  struct Partial {
    double sum = 0.0, sumsq = 0.0;
  };
  auto partials = run_chunked<Partial>(
      m, detail::kUrnChunk, threads,
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, Partial& out) {
        PolyaUrn urn(p.n, p.k, alpha);
        for (std::uint64_t r = begin; r < end; ++r) {
          urn.reset();
          Rng rng(RngSeed{seed.seed, seed.stream + stream_block::model_a + r});
          for (std::uint64_t t = 0; t < p.kn(); ++t) urn.step(rng);
          double s = (static_cast<double>(urn.s2()) - nd * ez2) / sqrt_n;
          double v = 0.5 * tv_kernel_floored(k, beta, floor_at, s);
          out.sum += v;
          out.sumsq += v * v;
        }
      });
  double sum = 0.0, sumsq = 0.0;
  for (auto& part : partials) {
    sum += part.sum;
    sumsq += part.sumsq;
  }
  double md = static_cast<double>(m);
  EstimateWithError e;
  e.n_samples = m;
  e.estimate = sum / md;
  e.std_error = std::sqrt(std::max(0.0, sumsq / md - e.estimate * e.estimate) / md);
  std::ostringstream method;
  method << "via_f;truncation_dropped;floor=" << -floor_at;
  e.method = method.str();
  return e;
}

// Dense integer-lattice histogram of X = sum of squared in-degrees. The
// lattice is analytic, not inferred: X has the parity of kn and spacing 2.
struct LatticeHistogram {
  long long base = 0;             // X value of index 0
  long long spacing_int = 2;      // lattice spacing in X units
  double center = 0.0;            // n * E[Z^2], the centering constant
  double scale = 1.0;             // sqrt(n)
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double x_value(std::size_t i) const {
    return (static_cast<double>(base + spacing_int * static_cast<long long>(i)) - center) / scale;
  }
  std::uint64_t count_at_s(long long s) const {
    if (s < base) return 0;
    long long off = s - base;
    if (off % spacing_int != 0) return 0;
    auto i = static_cast<std::uint64_t>(off / spacing_int);
    return i < counts.size() ? counts[i] : 0;
  }
};

inline LatticeHistogram scalar_x_histogram(const ModelParams& p, std::uint64_t m, RngSeed seed,
                                           unsigned threads = 0) {
  if (p.alpha.is_infinite()) throw std::domain_error("scalar_x_histogram: finite alpha required");
  CountMap counts = detail::x_counts_attachment(p, m, seed, stream_block::model_a, threads);
  long long lo = std::numeric_limits<long long>::max(), hi = std::numeric_limits<long long>::min();
  for (auto& [s, c] : counts) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  LatticeHistogram h;
  h.base = lo;
  h.center = static_cast<double>(p.n) * mean_z_squared(p.k, p.alpha);
  h.scale = std::sqrt(static_cast<double>(p.n));
  long long parity = static_cast<long long>(p.kn() % 2);
  h.counts.assign(static_cast<std::size_t>((hi - lo) / 2 + 1), 0);
  for (auto& [s, c] : counts) {
    if (((s % 2) + 2) % 2 != parity) throw std::logic_error("scalar_x_histogram: off-lattice X value");
    h.counts[static_cast<std::size_t>((s - lo) / 2)] = c;
    h.total += c;
  }
  return h;
}

struct LcltScalarResult {
  double sup_error = 0.0;
  double at_x = 0.0;
  std::uint64_t lattice_points = 0;
  bool insufficient_samples = false;
  double total_mass = 0.0;
};

// sup over lattice points x in [-window, window] of
// |sqrt(n)/2 * phat(x) - psi(x)|, with psi the scalar limit density. Lattice
// cells inside +-1 sd of psi with zero observations flag insufficient m.
inline LcltScalarResult lclt_scalar_sup_error(const ModelParams& p, std::uint64_t m, double window,
                                              RngSeed seed, unsigned threads = 0) {
  if (m < 100000) throw std::invalid_argument("lclt_scalar_sup_error: need m >= 1e5");
  LatticeHistogram h = scalar_x_histogram(p, m, seed, threads);
  double md = static_cast<double>(m);
  double half_scale = h.scale / 2.0;
  double sd1 = static_cast<double>(p.k) * std::sqrt(2.0);

  LcltScalarResult r;
  r.total_mass = static_cast<double>(h.total) / md;
  // smallest lattice s with x >= -window, honoring parity
  auto s_from_x = [&](double x) { return x * h.scale + h.center; };
  long long parity = static_cast<long long>(p.kn() % 2);
  auto align = [&](long long s) { return (((s % 2) + 2) % 2 == parity) ? s : s + 1; };
  long long s_lo = align(static_cast<long long>(std::ceil(s_from_x(-window))));
  long long s_hi = static_cast<long long>(std::floor(s_from_x(window)));
  for (long long s = s_lo; s <= s_hi; s += 2) {
    double x = (static_cast<double>(s) - h.center) / h.scale;
    double phat = static_cast<double>(h.count_at_s(s)) / md;
    double err = std::abs(half_scale * phat - scalar_limit_density(p.k, x));
    ++r.lattice_points;
    if (err > r.sup_error) {
      r.sup_error = err;
      r.at_x = x;
    }
    if (std::abs(x) <= sd1 && h.count_at_s(s) == 0) r.insufficient_samples = true;
  }
  return r;
}

struct Lclt2dResult {
  double sup_error = 0.0;
  double at_x1 = 0.0, at_x2 = 0.0;
  std::uint64_t parity_violations = 0;
  double marginal_sup_error = 0.0;
  std::uint64_t lattice_points = 0;
  bool insufficient_samples = false;
};

// Unconditioned two-dimensional check: replicates are sums of n IID (Z, Z^2)
// pairs; the support lattice is generated by (1,1) and (1,-1), i.e. P+Q is
// always even because z^2 = z (mod 2). sup over the window of
// |n/2 * phat - eta|, plus the first-coordinate marginal against its
// Gaussian limit.
inline Lclt2dResult lclt_2d_sup_error(const ModelParams& p, std::uint64_t m, double window_sigmas,
                                      RngSeed seed, unsigned threads = 0,
                                      ZSampler::Method method = ZSampler::Method::table) {
  if (p.alpha.is_infinite()) throw std::domain_error("lclt_2d_sup_error: finite alpha required");
  constexpr long long kKeyMul = 1ll << 40;

  struct Partial {
    CountMap cells;
    std::uint64_t violations = 0;
  };
  auto partials = run_chunked<Partial>(
      m, detail::kPairChunk, threads,
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, Partial& out) {
        ZSampler sampler(p.k, p.alpha, method);
        for (std::uint64_t r = begin; r < end; ++r) {
          Rng rng(RngSeed{seed.seed, seed.stream + stream_block::model_a + r});
          std::uint64_t sum = 0, sumsq = 0;
          for (std::uint32_t j = 0; j < p.n; ++j) {
            std::uint64_t z = sampler.next(rng);
            sum += z;
            sumsq += z * z;
          }
          if ((sum + sumsq) % 2 != 0) ++out.violations;
          if (sumsq >= static_cast<std::uint64_t>(kKeyMul))
            throw std::overflow_error("lclt_2d_sup_error: sum of squares exceeds key packing");
          ++out.cells[static_cast<long long>(sum) * kKeyMul + static_cast<long long>(sumsq)];
        }
      });
  CountMap cells;
  Lclt2dResult r;
  for (auto& part : partials) {
    merge_counts(cells, part.cells);
    r.parity_violations += part.violations;
  }

  double nd = static_cast<double>(p.n);
  double sqrt_n = std::sqrt(nd);
  double md = static_cast<double>(m);
  double ez1 = static_cast<double>(p.k);
  double ez2 = mean_z_squared(p.k, p.alpha);
  CovMatrix2 cov = limit_cov_matrix(p.k);
  double w1 = window_sigmas * std::sqrt(cov.m11);
  double w2 = window_sigmas * std::sqrt(cov.m22);
  double eta_peak = pair_limit_density(p.k, 0.0, 0.0);

  auto p_lo = static_cast<long long>(std::ceil(nd * ez1 - w1 * sqrt_n));
  auto p_hi = static_cast<long long>(std::floor(nd * ez1 + w1 * sqrt_n));
  auto q_lo_raw = static_cast<long long>(std::ceil(nd * ez2 - w2 * sqrt_n));
  auto q_hi = static_cast<long long>(std::floor(nd * ez2 + w2 * sqrt_n));
  for (long long pv = std::max(0ll, p_lo); pv <= p_hi; ++pv) {
    long long q_lo = q_lo_raw;
    if (((q_lo % 2) + 2) % 2 != ((pv % 2) + 2) % 2) ++q_lo;  // P+Q even
    for (long long qv = std::max(0ll, q_lo); qv <= q_hi; qv += 2) {
      double x1 = (static_cast<double>(pv) - nd * ez1) / sqrt_n;
      double x2 = (static_cast<double>(qv) - nd * ez2) / sqrt_n;
      auto it = cells.find(pv * kKeyMul + qv);
      double phat = it == cells.end() ? 0.0 : static_cast<double>(it->second) / md;
      double eta = pair_limit_density(p.k, x1, x2);
      double err = std::abs(nd / 2.0 * phat - eta);
      ++r.lattice_points;
      if (err > r.sup_error) {
        r.sup_error = err;
        r.at_x1 = x1;
        r.at_x2 = x2;
      }
      if (eta >= 0.5 * eta_peak && it == cells.end()) r.insufficient_samples = true;
    }
  }

  // first-coordinate marginal against Normal(0, k), lattice spacing 1/sqrt(n)
  std::unordered_map<long long, std::uint64_t> marg;
  for (auto& [key, c] : cells) marg[key / kKeyMul] += c;
  for (long long pv = std::max(0ll, static_cast<long long>(std::ceil(nd * ez1 - 2.0 * sqrt_n)));
       pv <= static_cast<long long>(std::floor(nd * ez1 + 2.0 * sqrt_n)); ++pv) {
    double x1 = (static_cast<double>(pv) - nd * ez1) / sqrt_n;
    auto it = marg.find(pv);
    double phat = it == marg.end() ? 0.0 : static_cast<double>(it->second) / md;
    double err = std::abs(sqrt_n * phat - normal_pdf(x1, 0.0, std::sqrt(cov.m11)));
    r.marginal_sup_error = std::max(r.marginal_sup_error, err);
  }
  return r;
}

// Fraction of samples with |sum_j D_j^s - mu_s n| < omega sqrt(n), under the
// model in p (finite alpha: attachment urn; infinite: uniform throws).
inline double concentration_check(const ModelParams& p, unsigned s, double omega, std::uint64_t m,
                                  RngSeed seed, unsigned threads = 0) {
  if (s < 1 || s > 4) throw std::invalid_argument("concentration_check: s must be in 1..4");
  double mu = exact::moment_fp(p.n, p.k, p.alpha, s);
  double nd = static_cast<double>(p.n);
  double radius = omega * std::sqrt(nd);
  bool track_higher = s >= 3;

  auto partials = run_chunked<std::uint64_t>(
      m, detail::kUrnChunk, threads,
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, std::uint64_t& hits) {
        hits = 0;
        if (p.alpha.is_infinite()) {
          UniformUrn urn(p.n, p.k, track_higher);
          for (std::uint64_t r = begin; r < end; ++r) {
            Rng rng(RngSeed{seed.seed, seed.stream + stream_block::model_a + r});
            urn.sample(rng);
            long long v = s == 1 ? static_cast<long long>(p.kn())
                                 : (s == 2 ? urn.s2() : (s == 3 ? urn.s3() : urn.s4()));
            hits += std::abs(static_cast<double>(v) - mu * nd) < radius;
          }
        } else {
          PolyaUrn urn(p.n, p.k, p.alpha.value(), track_higher);
          for (std::uint64_t r = begin; r < end; ++r) {
            urn.reset();
            Rng rng(RngSeed{seed.seed, seed.stream + stream_block::model_a + r});
            for (std::uint64_t t = 0; t < p.kn(); ++t) urn.step(rng);
            long long v = s == 1 ? static_cast<long long>(p.kn())
                                 : (s == 2 ? urn.s2() : (s == 3 ? urn.s3() : urn.s4()));
            hits += std::abs(static_cast<double>(v) - mu * nd) < radius;
          }
        }
      });
  std::uint64_t hits = 0;
  for (auto h : partials) hits += h;
  return static_cast<double>(hits) / static_cast<double>(m);
}

// Goodness of fit of an observed integer-statistic histogram against an
// exact law. Observations outside the law's support would make the test
// ill-posed and are rejected.
inline GofResult chi_square_gof(const CountMap& observed, const exact::ExactDistribution& expected,
                                double min_expected = 5.0) {
  std::vector<std::uint64_t> obs(expected.support.size(), 0);
  std::vector<double> probs(expected.support.size(), 0.0);
  std::uint64_t matched = 0;
  for (std::size_t i = 0; i < expected.support.size(); ++i) {
    probs[i] = expected.probs[i].get_d();
    if (auto it = observed.find(expected.support[i]); it != observed.end()) {
      obs[i] = it->second;
      matched += it->second;
    }
  }
  std::uint64_t total = 0;
  for (auto& [x, c] : observed) total += c;
  if (matched != total)
    throw std::invalid_argument("chi_square_gof: observations outside the expected support");
  return kout::chi_square_gof(obs, probs, min_expected);
}

struct DistinguishResult {
  double p_alpha = 0.0;   // attachment-model probability of the event
  double p_unif = 0.0;    // uniform-model probability of the same event
  double alpha = 0.0;     // resolved n^sigma
  double radius = 0.0;    // sqrt(omega n)
  double mean_gap = 0.0;  // |mu_{2,alpha} - mu_{2,inf}| n
};

// The separating event: degree sequences whose sum of squared in-degrees
// lies within sqrt(omega n) of the attachment model's mean, omega = sqrt(n)/alpha
// with alpha = n^sigma, sigma < 1/2. The attachment model concentrates inside,
// the uniform model's mean sits ~ k^2 omega sqrt(n) away, far outside.
inline DistinguishResult distinguishing_event_check(std::uint32_t n, std::uint32_t k, double sigma_exponent,
                                                    std::uint64_t m, RngSeed seed, unsigned threads = 0) {
  if (!(sigma_exponent < 0.5))
    throw std::domain_error("distinguishing_event_check: need sigma < 1/2, the event no longer separates");
  double nd = static_cast<double>(n);
  double alpha = std::pow(nd, sigma_exponent);
  double omega = std::sqrt(nd) / alpha;

  DistinguishResult res;
  res.alpha = alpha;
  res.radius = std::sqrt(omega * nd);
  double mu2a = exact::moment_fp(n, k, Alpha::finite(alpha), 2);
  double mu2i = exact::moment_fp(n, k, Alpha::infinite(), 2);
  res.mean_gap = std::abs(mu2a - mu2i) * nd;

  double center = mu2a * nd;
  auto count_hits = [&](bool uniform_model, std::uint64_t stream_base) {
    auto partials = run_chunked<std::uint64_t>(
        m, detail::kUrnChunk, threads,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end, std::uint64_t& hits) {
          hits = 0;
          if (uniform_model) {
            UniformUrn urn(n, k);
            for (std::uint64_t r = begin; r < end; ++r) {
              Rng rng(RngSeed{seed.seed, seed.stream + stream_base + r});
              urn.sample(rng);
              hits += std::abs(static_cast<double>(urn.s2()) - center) < res.radius;
            }
          } else {
            PolyaUrn urn(n, k, alpha);
            for (std::uint64_t r = begin; r < end; ++r) {
              urn.reset();
              Rng rng(RngSeed{seed.seed, seed.stream + stream_base + r});
              for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(n) * k; ++t) urn.step(rng);
              hits += std::abs(static_cast<double>(urn.s2()) - center) < res.radius;
            }
          }
        });
    std::uint64_t hits = 0;
    for (auto h : partials) hits += h;
    return static_cast<double>(hits) / static_cast<double>(m);
  };
  res.p_alpha = count_hits(false, stream_block::model_a);
  res.p_unif = count_hits(true, stream_block::model_b);
  return res;
}

}  // namespace kout::mc
