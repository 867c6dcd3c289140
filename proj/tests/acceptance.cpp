// Acceptance suite: end-to-end checks of the library against its exact
// oracles, the closed-form limit objects, and the desk-scale Monte Carlo
// experiments. One pass/fail line per criterion; exit code is the number of
// failures. Heavy criteria state their sampling budgets and tolerances in
// the printed detail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kout/exact.hpp"
#include "kout/limits.hpp"
#include "kout/mc_stats.hpp"
#include "kout/model.hpp"
#include "kout/rng.hpp"
#include "kout/samplers.hpp"
#include "kout/stats.hpp"
#include "oracles.hpp"

using namespace kout;
using exact::Rational;

namespace {

int failures = 0;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  template <class T>
  Check& note(const std::string& label, const T& value) {
    detail << label << "=" << value << " ";
    return *this;
  }
  Check& require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
    return *this;
  }
};

void criterion(int id, const std::string& name, double runtime_limit_s,
               const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail << "[exception: " << e.what() << "] ";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < runtime_limit_s, "runtime limit");
  if (!c.pass) ++failures;
  std::printf("%s criterion %2d: %s -- %s(%.2f s, limit %.0f s)\n", c.pass ? "PASS" : "FAIL", id,
              name.c_str(), c.detail.str().c_str(), secs, runtime_limit_s);
  std::fflush(stdout);
}

unsigned threads() { return 0; }  // 0 = all hardware threads

// ---------------------------------------------------------------------------

void c1_exact_tv_tiny(Check& c) {
  // independent oracle first: enumerate all 4 mappings directly
  mpq_class oracle_tv = oracle::tv_full(2, 1, mpq_class(1));
  c.require(oracle_tv == mpq_class(1, 6), "oracle tv = 1/6");
  Rational tv_full = exact::exact_tv_full(2, 1, Rational(1));
  Rational tv_x = exact::exact_tv_x(2, 1, Rational(1));
  c.note("tv_full", tv_full.get_str()).note("tv_x", tv_x.get_str());
  c.require(tv_full == Rational(1, 6), "exact_tv_full = 1/6");
  c.require(tv_x == Rational(1, 6), "exact_tv_x = 1/6");
  c.require(tv_full == Rational(oracle_tv), "matches enumeration oracle");
}

void c2_conditioned_identity(Check& c) {
  // process pmf vs conditioned-IID pmf via the independent series-convolution
  // route, exactly in rationals, for every admissible class at (3,2,3/2)
  const std::uint32_t n = 3, k = 2;
  const Rational alpha(3, 2);
  const std::uint64_t kn = std::uint64_t(n) * k;
  std::vector<Rational> coef(kn + 1);
  Rational ratio = Rational(k) / (alpha + k);
  Rational pw = 1;
  for (std::uint64_t d = 0; d <= kn; ++d) {
    coef[d] = exact::rising(alpha, d) / Rational(exact::factorial(d)) * pw;
    pw *= ratio;
  }
  std::vector<Rational> conv{Rational(1)};
  for (std::uint32_t rep = 0; rep < n; ++rep) {
    std::vector<Rational> next(kn + 1, Rational(0));
    for (std::size_t i = 0; i < conv.size(); ++i)
      for (std::uint64_t d = 0; d + i < next.size(); ++d) next[i + d] += conv[i] * coef[d];
    conv = std::move(next);
  }
  std::uint64_t classes = 0;
  exact::walk_degree_classes(n, k, {}, [&](const std::vector<std::uint32_t>& parts, std::uint32_t zeros,
                                           const exact::Integer&, const exact::Integer&) {
    Rational process = exact::pmf_sequence(n, k, alpha, parts);
    Rational prod = 1;
    for (auto p : parts) prod *= coef[p];
    for (std::uint32_t z = 0; z < zeros; ++z) prod *= coef[0];
    if (process != prod / conv[kn]) c.require(false, "identity at a degree class");
    ++classes;
  });
  c.note("classes", classes);
  c.require(classes > 0, "classes enumerated");
}

void c3_sampler_equivalence(Check& c) {
  const ModelParams p(3, 2, Alpha::finite(2.0));
  const std::uint64_t m = 1000000;
  using SeqHist = std::map<std::vector<std::uint32_t>, std::uint64_t>;
  auto run = [&](std::uint64_t seed, auto&& draw) {
    SeqHist h;
    for (std::uint64_t r = 0; r < m; ++r) ++h[draw(RngSeed{seed, r})];
    return h;
  };
  auto h_fixed = run(201, [&](RngSeed s) { return in_degrees(sample_fixed_order(p, s)).counts; });
  auto h_random = run(202, [&](RngSeed s) { return in_degrees(sample_random_order(p, s)).counts; });
  auto h_direct = run(203, [&](RngSeed s) { return sample_degrees_direct(p, s).counts; });

  // exact pmf over all ordered degree sequences
  std::map<std::vector<std::uint32_t>, double> pmf;
  {
    std::vector<std::uint32_t> seq(p.n, 0);
    auto rec = [&](auto&& self, std::uint32_t pos, std::uint64_t remaining) -> void {
      if (pos + 1 == p.n) {
        seq[pos] = static_cast<std::uint32_t>(remaining);
        pmf[seq] = std::exp(log_pmf_degree_sequence(p, InDegreeSequence{seq}).value);
        return;
      }
      for (std::uint64_t v = 0; v <= remaining; ++v) {
        seq[pos] = static_cast<std::uint32_t>(v);
        self(self, pos + 1, remaining - v);
      }
    };
    rec(rec, 0, p.kn());
  }
  const char* names[3] = {"fixed", "random", "direct"};
  SeqHist* hists[3] = {&h_fixed, &h_random, &h_direct};
  for (int i = 0; i < 3; ++i) {
    std::vector<std::uint64_t> obs;
    std::vector<double> probs;
    for (auto& [s, q] : pmf) {
      probs.push_back(q);
      auto it = hists[i]->find(s);
      obs.push_back(it == hists[i]->end() ? 0 : it->second);
    }
    double pv = chi_square_gof(obs, probs).p_value;
    c.note(std::string("p_") + names[i], pv);
    c.require(pv > 1e-3, std::string("route vs exact pmf: ") + names[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      std::vector<std::uint64_t> va, vb;
      for (auto& [s, q] : pmf) {
        auto ia = hists[i]->find(s), ib = hists[j]->find(s);
        va.push_back(ia == hists[i]->end() ? 0 : ia->second);
        vb.push_back(ib == hists[j]->end() ? 0 : ib->second);
      }
      double pv = chi_square_two_sample(va, vb).p_value;
      c.note(std::string("p_") + names[i] + "_" + names[j], pv);
      c.require(pv > 1e-3, std::string("cross-route: ") + names[i] + " vs " + names[j]);
    }
}

void c4_moments(Check& c) {
  const std::uint32_t n = 100, k = 2;
  const Alpha alpha = Alpha::finite(5.0);
  const ModelParams p(n, k, alpha);
  const std::uint64_t m = 100000;
  double kn = double(n) * k;

  double e_d = exact::moment_factorial_fp(n, k, alpha, 1);
  double e_d2 = exact::moment_fp(n, k, alpha, 2);
  double e_fall2 = exact::moment_factorial_fp(n, k, alpha, 2);
  double e_mixed = exact::mixed_factorial_fp(n, k, alpha, 1, 1);

  double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0, f2 = 0, f2sq = 0, mx = 0, mxsq = 0;
  for (std::uint64_t r = 0; r < m; ++r) {
    auto d = sample_degrees_direct(p, RngSeed{204, r});
    double d1 = d.counts[0];
    auto ps = power_sums(d);
    double pair_mean = (kn * kn - double(ps.s2)) / (double(n) * (n - 1.0));
    s1 += d1;
    s1sq += d1 * d1;
    s2 += d1 * d1;
    s2sq += d1 * d1 * d1 * d1;
    double ff = d1 * (d1 - 1.0);
    f2 += ff;
    f2sq += ff * ff;
    mx += pair_mean;
    mxsq += pair_mean * pair_mean;
  }
  auto zcheck = [&](const char* label, double sum, double sumsq, double target) {
    double mean = sum / double(m);
    double se = std::sqrt(std::max(0.0, sumsq / double(m) - mean * mean) / double(m));
    double dev = se > 0 ? std::abs(mean - target) / se : std::abs(mean - target);
    c.note(std::string(label) + "_dev_se", dev);
    c.require(std::abs(mean - target) <= 4.0 * se, std::string(label) + " within 4 se");
  };
  zcheck("E[D]", s1, s1sq, e_d);
  zcheck("E[D^2]", s2, s2sq, e_d2);
  zcheck("E[(D)_2]", f2, f2sq, e_fall2);
  zcheck("E[DiDj]", mx, mxsq, e_mixed);
}

void c5_rising_factorial_brackets(Check& c) {
  Rng r(RngSeed{20250808, 0});
  const double slack = 1e-12;
  int checked = 0;
  int violations = 0;
  while (checked < 10000) {
    double a;
    std::uint64_t b;
    if (checked % 3 == 2) {
      a = 30.0 + r.u01() * 120.0;
      auto bmax = static_cast<std::uint64_t>(a + 1.0);
      if (bmax < 33) continue;
      b = 33 + r.below(static_cast<std::uint32_t>(bmax - 32));
    } else {
      a = std::exp(std::log(0.05) + r.u01() * (std::log(1e8) - std::log(0.05)));
      auto bmax = static_cast<std::uint64_t>(std::min(a + 1.0, 32.0));
      b = r.below(static_cast<std::uint32_t>(bmax + 1));
    }
    double v = log_rising_factorial(a, b);
    auto rough = rising_factorial_bounds(a, b, BracketKind::rough);
    auto sharp = rising_factorial_bounds(a, b, BracketKind::sharp);
    if (!(rough.lower - slack <= v && v <= rough.upper + slack)) ++violations;
    if (!(sharp.lower - slack <= v && v <= sharp.upper + slack)) ++violations;
    ++checked;
  }
  c.note("draws", checked).note("violations", violations);
  c.require(violations == 0, "bracket chains with 1e-12 log slack");
}

void c6_limit_constant(Check& c) {
  double quad = limit_tv_quadrature(1, 1.0);
  double closed = limit_tv(1, 1.0);
  c.note("quadrature", quad).note("closed", closed);
  c.require(std::abs(quad - 0.27633) <= 1e-4, "quadrature = 0.27633 +- 1e-4");
  c.require(std::abs(closed - quad) <= 1e-8, "closed form tracks the quadrature oracle to 1e-8");
}

void c7_critical_scaling(Check& c) {
  const std::uint32_t n = 40000, k = 1;
  const double beta = 1.0;
  const double limit = limit_tv(k, beta);
  auto via_f = mc::estimate_tv_via_f(n, k, beta, 100000, RngSeed{205, 0}, threads());
  c.note("via_f", via_f.estimate).note("via_f_se", via_f.std_error);
  c.require(std::abs(via_f.estimate - limit) <= 0.02, "via_f within 0.02 of the limit");

  ModelParams p(n, k, Alpha::finite(beta * std::sqrt(double(n))));
  auto plugin = mc::estimate_tv_x_plugin(p, 1000000, RngSeed{206, 0}, threads());
  c.note("plugin", plugin.estimate).note("plugin_se", plugin.std_error).note("plugin_bias", plugin.bias_bound);
  c.require(std::abs(plugin.estimate - limit) <= 0.03, "plugin within 0.03 of the limit");

  // tolerances are engineering budgets: sampling noise + plug-in bias + an
  // O(n^-1/2) finite-size drift allowance
  double drift_allowance = 4.0 * double(k) * k / (beta * beta * std::sqrt(double(n)));
  double budget = plugin.bias_bound + 3.0 * (via_f.std_error + plugin.std_error) + drift_allowance;
  c.note("cross_gap", std::abs(via_f.estimate - plugin.estimate)).note("cross_budget", budget);
  c.require(std::abs(via_f.estimate - plugin.estimate) <= budget,
            "the two estimators agree within their combined budgets");
}

void c8_separation(Check& c) {
  const std::uint32_t n = 10000, k = 1;
  const double sigma = 0.25;
  const std::uint64_t m = 10000;
  // pre-run verification of the separation geometry from the closed-form
  // moments: the mean gap must dominate the event radius
  auto pre = [&] {
    double alpha = std::pow(double(n), sigma);
    double mu2a = exact::moment_fp(n, k, Alpha::finite(alpha), 2);
    double mu2i = exact::moment_fp(n, k, Alpha::infinite(), 2);
    double omega = std::sqrt(double(n)) / alpha;
    return std::pair{std::abs(mu2a - mu2i) * n, std::sqrt(omega * n)};
  }();
  c.note("mean_gap", pre.first).note("radius", pre.second);
  c.require(pre.first > 2.0 * pre.second, "closed-form gap dominates the radius");
  double sd = std::sqrt(exact::var_sum_power_fp(n, k, Alpha::finite(std::pow(double(n), sigma)), 2));
  c.note("predicted_p_alpha", std::erf(pre.second / (sd * std::sqrt(2.0))));

  auto r = mc::distinguishing_event_check(n, k, sigma, m, RngSeed{207, 0}, threads());
  c.note("p_alpha", r.p_alpha).note("p_unif", r.p_unif);
  c.require(r.p_alpha >= 0.95, "p_alpha >= 0.95");
  c.require(r.p_unif <= 0.05, "p_unif <= 0.05");
}

void c9_doubling_grid(Check& c) {
  Rational prev(2);
  Rational last(0);
  for (long e = 0; e <= 10; ++e) {
    Rational tv = exact::exact_tv_full(4, 1, Rational(1L << e));
    if (!(tv < prev)) c.require(false, "strict decrease along the grid");
    prev = tv;
    last = tv;
  }
  c.note("tv_at_1024", last.get_d());
  c.require(last < Rational(1, 1000), "tv(alpha=1024) < 1e-3");
}

void c10_local_limits(Check& c) {
  const std::uint32_t n1 = 10000;
  ModelParams p1(n1, 1, Alpha::finite(std::sqrt(double(n1))));
  auto scalar = mc::lclt_scalar_sup_error(p1, 1000000, 8.0, RngSeed{208, 0}, threads());
  c.note("scalar_sup", scalar.sup_error).note("scalar_at", scalar.at_x);
  c.require(!scalar.insufficient_samples, "scalar histogram dense inside one sd");
  c.require(scalar.sup_error <= 0.03, "scalar sup error <= 0.03 on [-8,8]");

  const std::uint32_t n2 = 2500;
  ModelParams p2(n2, 1, Alpha::finite(std::sqrt(double(n2))));
  auto pair = mc::lclt_2d_sup_error(p2, 10000000, 4.0, RngSeed{209, 0}, threads());
  c.note("pair_sup", pair.sup_error).note("parity_violations", pair.parity_violations);
  c.note("marginal_sup", pair.marginal_sup_error);
  c.require(pair.parity_violations == 0, "all pair sums on the parity lattice");
  c.require(pair.sup_error <= 0.02, "2-d sup error <= 0.02 over a 4-sd window");

  // errors shrink with n: the coarser scale cannot beat the finer one
  auto scalar_small = mc::lclt_scalar_sup_error(p2, 1000000, 8.0, RngSeed{210, 0}, threads());
  c.note("scalar_sup_n2500", scalar_small.sup_error);
  c.require(scalar_small.sup_error >= scalar.sup_error - 0.005, "sup error shrinks with n (within noise)");
}

std::string run_cli_capture(const std::string& args, int& exit_code) {
  static int counter = 0;
  std::string path = "acceptance_cli_" + std::to_string(++counter) + ".txt";
  std::string cmd = std::string(KOUT_CLI_PATH) + " " + args + " > " + path + " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  std::remove(path.c_str());
  return os.str();
}

void c11_determinism(Check& c) {
  // library level: byte-for-byte equal estimates for any thread count
  ModelParams p(50, 2, Alpha::finite(3.0));
  auto e1 = mc::estimate_tv_x_plugin(p, 20000, RngSeed{211, 0}, 1);
  auto e8 = mc::estimate_tv_x_plugin(p, 20000, RngSeed{211, 0}, 8);
  c.require(e1.estimate == e8.estimate && e1.std_error == e8.std_error, "estimator equal for 1 vs 8 threads");

  // CLI level: identical config+seed reproduces identical bytes; serial and
  // parallel runs match
  std::string args =
      "threshold --k 1 --alpha 'beta*sqrt(n)' --beta 1 --n-grid 400,900 --samples 20000 "
      "--plugin-samples 20000 --seed 5";
  int rc1 = 0, rc2 = 0, rc3 = 0, rc4 = 0;
  std::string serial = run_cli_capture(args + " --threads 1", rc1);
  std::string parallel = run_cli_capture(args + " --threads 8", rc2);
  std::string repeat = run_cli_capture(args + " --threads 8", rc3);
  c.require(rc1 == 0 && rc2 == 0 && rc3 == 0, "cli runs succeed");
  c.require(serial == parallel, "serial output equals parallel output");
  c.require(parallel == repeat, "re-run reproduces identical bytes");

  std::string s1 = run_cli_capture("sample --n 6 --k 2 --alpha 1.5 --count 50 --seed 12", rc4);
  int rc5 = 0;
  std::string s2 = run_cli_capture("sample --n 6 --k 2 --alpha 1.5 --count 50 --seed 12", rc5);
  c.require(rc4 == 0 && rc5 == 0 && s1 == s2, "sample re-run byte-identical");
}

}  // namespace

int main() {
  std::printf("acceptance suite (seed-pinned, %u hardware threads)\n", effective_threads(0));
  criterion(1, "exact TV at (2,1,1) equals 1/6 exactly", 1.0, c1_exact_tv_tiny);
  criterion(2, "process pmf = conditioned negative-binomial pmf, exact at (3,2,3/2)", 1.0,
            c2_conditioned_identity);
  criterion(3, "three sampling routes match the exact law at (3,2,2), 1e6 each", 120.0,
            c3_sampler_equivalence);
  criterion(4, "closed-form moments match Monte Carlo at (100,2,5) within 4 se", 60.0, c4_moments);
  criterion(5, "rising-factorial bracket chains over 1e4 random draws", 1.0, c5_rising_factorial_brackets);
  criterion(6, "limiting constant: quadrature 0.27633 and closed form to 1e-8", 10.0, c6_limit_constant);
  criterion(7, "critical scaling at n=4e4: both TV estimators near the limit", 900.0, c7_critical_scaling);
  criterion(8, "subcritical separation at n=1e4, alpha=n^(1/4)", 300.0, c8_separation);
  criterion(9, "exact TV strictly decreasing in alpha, below 1e-3 at 1024", 10.0, c9_doubling_grid);
  criterion(10, "local limit laws: scalar sup<=0.03, 2-d sup<=0.02, parity exact", 1200.0, c10_local_limits);
  criterion(11, "byte-identical reruns; serial equals parallel", 120.0, c11_determinism);
  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
  return failures;
}
