#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kout/model.hpp"
#include "kout/rng.hpp"

namespace kout {

// Discrete sampling via Vose's alias method; used for the tabulated
// unconditioned degree distribution and for bootstrap resampling.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weights");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("AliasTable: bad weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("AliasTable: zero total weight");
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * n / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      std::uint32_t s = small.back(), l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;  // numerical leftovers
  }

  std::uint32_t sample(Rng& rng) const {
    auto i = rng.below(static_cast<std::uint32_t>(prob_.size()));
    return rng.u01() < prob_[i] ? i : alias_[i];
  }

  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Sequential attachment urn over kn draws: at step t (t targets already
// chosen) the next target is vertex j with probability
// (alpha + d_j) / (alpha n + t). The composition step realizes this in O(1):
// with probability alpha n / (alpha n + t) pick a uniform vertex, otherwise
// copy the target of a uniform earlier draw. Power sums of the degree counts
// are maintained incrementally so estimators never rescan the counts.
class PolyaUrn {
 public:
  PolyaUrn(std::uint32_t n, std::uint32_t k, double alpha, bool track_higher = false)
      : n_(n), alpha_n_(alpha * n), track_higher_(track_higher) {
    if (!(alpha > 0.0)) throw std::domain_error("PolyaUrn: alpha must be > 0");
    counts_.assign(n_, 0);
    balls_.resize(static_cast<std::size_t>(n) * k);
    reset();
  }

  void reset() {
    if (t_ > 0) std::fill(counts_.begin(), counts_.end(), 0);
    t_ = 0;
    s2_ = s3_ = s4_ = 0;
  }

  std::uint32_t step(Rng& rng) {
    std::uint32_t j;
    if (t_ == 0 || rng.u01() * (alpha_n_ + static_cast<double>(t_)) < alpha_n_) {
      j = rng.below(n_);
    } else {
      j = balls_[rng.below(t_)];
    }
    balls_[t_++] = j;
    auto d = static_cast<long long>(counts_[j]++);
    s2_ += 2 * d + 1;
    if (track_higher_) {
      s3_ += 3 * d * d + 3 * d + 1;
      s4_ += 4 * d * d * d + 6 * d * d + 4 * d + 1;
    }
    return j;
  }

  std::uint32_t steps_done() const { return t_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  const std::vector<std::uint32_t>& balls() const { return balls_; }
  long long s2() const { return s2_; }
  long long s3() const { return s3_; }
  long long s4() const { return s4_; }

 private:
  std::uint32_t n_;
  double alpha_n_;
  bool track_higher_;
  std::uint32_t t_ = 0;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> balls_;
  long long s2_ = 0, s3_ = 0, s4_ = 0;
};

// Cumulative-weight sampler over vertex weights alpha + d_j, kept as an
// independent cross-check implementation of the same target rule.
class FenwickUrn {
 public:
  FenwickUrn(std::uint32_t n, std::uint32_t k, double alpha) : n_(n), alpha_(alpha), tree_(n + 1, 0.0) {
    (void)k;
    if (!(alpha > 0.0)) throw std::domain_error("FenwickUrn: alpha must be > 0");
    for (std::uint32_t i = 1; i <= n_; ++i) tree_[i] = alpha_ * static_cast<double>(i & (~i + 1));
    total_ = alpha_ * static_cast<double>(n_);
    log_n_ = 0;
    while ((1u << (log_n_ + 1)) <= n_) ++log_n_;
  }

  std::uint32_t step(Rng& rng) {
    double u = rng.u01() * total_;
    // binary lift: smallest index with prefix sum > u
    std::uint32_t pos = 0;
    for (std::uint32_t m = 1u << log_n_; m > 0; m >>= 1) {
      std::uint32_t next = pos + m;
      if (next <= n_ && tree_[next] <= u) {
        pos = next;
        u -= tree_[next];
      }
    }
    std::uint32_t j = pos;  // 0-based vertex: prefix strictly greater at pos+1
    if (j >= n_) j = n_ - 1;
    add(j, 1.0);
    total_ += 1.0;
    return j;
  }

 private:
  void add(std::uint32_t j, double w) {
    for (std::uint32_t i = j + 1; i <= n_; i += i & (~i + 1)) tree_[i] += w;
  }

  std::uint32_t n_;
  double alpha_;
  double total_;
  std::uint32_t log_n_;
  std::vector<double> tree_;
};

enum class UrnMethod { composition, fenwick };

// Fixed-order process: vertex 1 chooses its k targets, then vertex 2, and so
// on; arc labels are chronological by construction.
inline KOutDigraph sample_fixed_order(const ModelParams& p, RngSeed seed,
                                      UrnMethod method = UrnMethod::composition) {
  Rng rng(seed);
  KOutDigraph g{p, {}};
  if (method == UrnMethod::composition) {
    PolyaUrn urn(p.n, p.k, p.alpha.value());
    for (std::uint64_t t = 0; t < p.kn(); ++t) urn.step(rng);
    g.targets = urn.balls();
  } else {
    FenwickUrn urn(p.n, p.k, p.alpha.value());
    g.targets.resize(p.kn());
    for (std::uint64_t t = 0; t < p.kn(); ++t) g.targets[t] = urn.step(rng);
  }
  return g;
}

// Random-order process: the deciding vertex at each step is uniform over the
// vertices that still have out-degree below k; the target rule is unchanged.
// The terminal digraph has the same law as the fixed-order process.
inline KOutDigraph sample_random_order(const ModelParams& p, RngSeed seed) {
  Rng rng(seed);
  PolyaUrn urn(p.n, p.k, p.alpha.value());
  KOutDigraph g{p, std::vector<std::uint32_t>(p.kn())};
  std::vector<std::uint32_t> pool(p.n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint32_t> fired(p.n, 0);
  std::uint32_t pool_size = p.n;
  for (std::uint64_t t = 0; t < p.kn(); ++t) {
    std::uint32_t idx = rng.below(pool_size);
    std::uint32_t v = pool[idx];
    std::uint32_t target = urn.step(rng);
    g.targets[static_cast<std::size_t>(v) * p.k + fired[v]] = target;
    if (++fired[v] == p.k) pool[idx] = pool[--pool_size];
  }
  return g;
}

// Uniform model: all kn targets IID uniform on the vertex set.
inline KOutDigraph sample_uniform(const ModelParams& p, RngSeed seed) {
  Rng rng(seed);
  KOutDigraph g{p, std::vector<std::uint32_t>(p.kn())};
  for (auto& t : g.targets) t = rng.below(p.n);
  return g;
}

// Degree sequence drawn directly, skipping digraph assembly: the attachment
// urn for finite alpha, kn uniform throws (a multinomial) for the uniform
// model.
inline InDegreeSequence sample_degrees_direct(const ModelParams& p, RngSeed seed) {
  Rng rng(seed);
  if (p.alpha.is_infinite()) {
    InDegreeSequence d{std::vector<std::uint32_t>(p.n, 0)};
    for (std::uint64_t t = 0; t < p.kn(); ++t) ++d.counts[rng.below(p.n)];
    return d;
  }
  PolyaUrn urn(p.n, p.k, p.alpha.value());
  for (std::uint64_t t = 0; t < p.kn(); ++t) urn.step(rng);
  return InDegreeSequence{urn.counts()};
}

// Unconditioned per-vertex degree variable: generalized negative binomial
// with shape alpha and success ratio k/(alpha+k), or Poisson(k) under the
// uniform model. Two interchangeable methods:
//   table         exact pmf tabulated until the tail drops below double
//                 resolution, sampled by alias lookup in O(1);
//   gamma_poisson the mixture Z ~ Poisson(Gamma(alpha) * k/alpha).
class ZSampler {
 public:
  enum class Method { table, gamma_poisson };

  ZSampler(std::uint32_t k, const Alpha& alpha, Method method = Method::table)
      : method_(method), infinite_(alpha.is_infinite()), k_(k) {
    if (!infinite_) {
      alpha_ = alpha.value();
      gp_scale_ = static_cast<double>(k) / alpha_;
    }
    if (method_ == Method::table) build_table();
  }

  std::uint32_t next(Rng& rng) {
    if (method_ == Method::table) return alias_->sample(rng);
    if (infinite_) return static_cast<std::uint32_t>(rng.poisson(static_cast<double>(k_)));
    return static_cast<std::uint32_t>(rng.poisson(rng.gamma(alpha_) * gp_scale_));
  }

  const std::vector<double>& pmf() const { return pmf_; }

 private:
  void build_table() {
    double kd = k_;
    double p;      // running pmf value
    double ratio;  // success probability of the geometric factor
    if (infinite_) {
      p = std::exp(-kd);
      ratio = 0.0;
    } else {
      p = std::exp(alpha_ * std::log(alpha_ / (alpha_ + kd)));
      ratio = kd / (alpha_ + kd);
    }
    double peak = p;
    std::uint32_t d = 0;
    pmf_.clear();
    for (;;) {
      pmf_.push_back(p);
      peak = std::max(peak, p);
      if (d > 2 * k_ && p < peak * 1e-22) break;
      if (d > 1000000) throw std::runtime_error("ZSampler: pmf table too long");
      if (infinite_) {
        p *= kd / (d + 1.0);
      } else {
        p *= (alpha_ + d) / (d + 1.0) * ratio;
      }
      ++d;
    }
    alias_.emplace(pmf_);
  }

  Method method_;
  bool infinite_;
  std::uint32_t k_;
  double alpha_ = 0.0;
  double gp_scale_ = 0.0;
  std::vector<double> pmf_;
  std::optional<AliasTable> alias_;
};

// IID stream of (Z, Z^2) pairs for the unconditioned two-dimensional checks.
class ZPairStream {
 public:
  ZPairStream(const ModelParams& p, RngSeed seed, ZSampler::Method method = ZSampler::Method::table)
      : sampler_(p.k, p.alpha, method), rng_(seed) {}

  std::pair<std::uint64_t, std::uint64_t> next() {
    std::uint64_t z = sampler_.next(rng_);
    return {z, z * z};
  }

 private:
  ZSampler sampler_;
  Rng rng_;
};

}  // namespace kout
