#include <doctest.h>

#include <cmath>

#include "kout/exact.hpp"
#include "kout/mc_stats.hpp"
#include "kout/stats.hpp"

using namespace kout;

TEST_CASE("plug-in tv estimator: determinism and thread invariance") {
  ModelParams p(5, 1, Alpha::finite(2.0));
  auto e1 = mc::estimate_tv_x_plugin(p, 20000, RngSeed{100, 0}, 1);
  auto e2 = mc::estimate_tv_x_plugin(p, 20000, RngSeed{100, 0}, 2);
  auto e3 = mc::estimate_tv_x_plugin(p, 20000, RngSeed{100, 0}, 2);
  CHECK(e1.estimate == e2.estimate);
  CHECK(e1.std_error == e2.std_error);
  CHECK(e1.bias_bound == e2.bias_bound);
  CHECK(e2.estimate == e3.estimate);
  CHECK_THROWS_AS(mc::estimate_tv_x_plugin(p, 100, RngSeed{1, 0}), std::invalid_argument);
}

TEST_CASE("plug-in tv estimator: null configuration gives ~0") {
  // same law on both sides: the uniform model against itself
  ModelParams p(6, 1, Alpha::infinite());
  auto e = mc::estimate_tv_x_plugin(p, 50000, RngSeed{101, 0});
  CHECK(e.estimate <= 3.0 * e.std_error + e.bias_bound);
}

TEST_CASE("plug-in tv estimator recovers the exact value at (2,1,1)") {
  ModelParams p(2, 1, Alpha::finite(1.0));
  auto e = mc::estimate_tv_x_plugin(p, 1000000, RngSeed{102, 0});
  CHECK(std::abs(e.estimate - 1.0 / 6.0) < 0.01);
  CHECK(e.std_error < 0.01);
  CHECK(e.bias_bound < 0.01);
}

TEST_CASE("tv via the kernel mean: large beta drives the estimate to zero") {
  auto e = mc::estimate_tv_via_f(10000, 1, 100.0, 20000, RngSeed{103, 0});
  CHECK(e.estimate < 0.01);
  CHECK(e.method.find("via_f") == 0);
}

TEST_CASE("tv via the kernel mean: near the limit constant at moderate n") {
  auto e = mc::estimate_tv_via_f(2500, 1, 1.0, 20000, RngSeed{104, 0});
  CHECK(std::abs(e.estimate - limit_tv(1, 1.0)) < 0.05);
  // deterministic across thread counts
  auto e1 = mc::estimate_tv_via_f(400, 1, 1.0, 20000, RngSeed{105, 0}, 1);
  auto e2 = mc::estimate_tv_via_f(400, 1, 1.0, 20000, RngSeed{105, 0}, 3);
  CHECK(e1.estimate == e2.estimate);
  CHECK(e1.std_error == e2.std_error);
}

TEST_CASE("scalar lattice histogram: exact total, parity lattice, thread invariance") {
  ModelParams p(400, 1, Alpha::finite(20.0));
  auto h1 = mc::scalar_x_histogram(p, 100000, RngSeed{106, 0}, 1);
  auto h2 = mc::scalar_x_histogram(p, 100000, RngSeed{106, 0}, 2);
  CHECK(h1.total == 100000);
  CHECK(h1.base == h2.base);
  CHECK(h1.counts == h2.counts);
  // base respects the parity of kn
  CHECK((h1.base % 2 + 2) % 2 == static_cast<long long>(p.kn() % 2));
}

TEST_CASE("scalar local-limit sup error is small at a sanity scale") {
  ModelParams p(400, 1, Alpha::finite(20.0));  // alpha = sqrt(n)
  auto r = mc::lclt_scalar_sup_error(p, 400000, 6.0, RngSeed{107, 0});
  CHECK(r.total_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!r.insufficient_samples);
  CHECK(r.lattice_points > 100);
  CHECK(r.sup_error < 0.15);
  CHECK_THROWS_AS(mc::lclt_scalar_sup_error(p, 1000, 6.0, RngSeed{1, 0}), std::invalid_argument);
}

TEST_CASE("2-d local-limit check: zero parity violations, bounded sup error") {
  ModelParams p(100, 1, Alpha::finite(10.0));
  auto r = mc::lclt_2d_sup_error(p, 200000, 3.0, RngSeed{108, 0});
  CHECK(r.parity_violations == 0);
  CHECK(r.lattice_points > 1000);
  CHECK(r.sup_error < 0.3);
  CHECK(r.marginal_sup_error < 0.2);
  // identical across thread counts and across the two Z methods in law
  auto a = mc::lclt_2d_sup_error(p, 20000, 3.0, RngSeed{109, 0}, 1);
  auto b = mc::lclt_2d_sup_error(p, 20000, 3.0, RngSeed{109, 0}, 2);
  CHECK(a.sup_error == b.sup_error);
  auto g = mc::lclt_2d_sup_error(p, 20000, 3.0, RngSeed{109, 0}, 2, ZSampler::Method::gamma_poisson);
  CHECK(g.parity_violations == 0);
  CHECK(std::abs(g.sup_error - a.sup_error) < 0.2);
}

TEST_CASE("concentration: s=1 always inside, tiny omega mostly outside") {
  ModelParams p(50, 2, Alpha::finite(3.0));
  CHECK(mc::concentration_check(p, 1, 0.5, 500, RngSeed{110, 0}) == 1.0);
  CHECK(mc::concentration_check(p, 2, 1e-4, 2000, RngSeed{111, 0}) < 0.5);
}

TEST_CASE("concentration: fraction near 1 when omega covers four sds") {
  for (unsigned s : {2u, 3u}) {
    std::uint32_t n = 500;
    Alpha a = Alpha::finite(5.0);
    ModelParams p(n, 1, a);
    double omega = 4.0 * std::sqrt(exact::var_sum_power_fp(n, 1, a, s) / n);
    double frac = mc::concentration_check(p, s, omega, 4000, RngSeed{112, s});
    CHECK(frac >= 0.95);
  }
  // uniform model route as well
  {
    std::uint32_t n = 500;
    ModelParams p(n, 1, Alpha::infinite());
    double omega = 4.0 * std::sqrt(exact::var_sum_power_fp(n, 1, Alpha::infinite(), 2) / n);
    CHECK(mc::concentration_check(p, 2, omega, 4000, RngSeed{113, 0}) >= 0.95);
  }
}

TEST_CASE("concentration at the moderate benchmark scale") {
  std::uint32_t n = 1000;
  ModelParams p(n, 1, Alpha::finite(std::sqrt(double(n))));
  double frac = mc::concentration_check(p, 2, std::log(double(n)), 2000, RngSeed{114, 0});
  CHECK(frac >= 0.97);
}

TEST_CASE("distinguishing event separates at a light scale") {
  auto r = mc::distinguishing_event_check(2500, 1, 0.25, 2000, RngSeed{115, 0});
  CHECK(r.p_alpha >= 0.80);
  CHECK(r.p_unif <= 0.05);
  CHECK(r.mean_gap > 2.0 * r.radius);
  CHECK_THROWS_AS(mc::distinguishing_event_check(2500, 1, 0.5, 100, RngSeed{1, 0}), std::domain_error);
  CHECK_THROWS_AS(mc::distinguishing_event_check(2500, 1, 0.75, 100, RngSeed{1, 0}), std::domain_error);
}

TEST_CASE("tv lower-bound chain: event gap <= plug-in estimate <= exact tv") {
  // n=5, k=1, alpha = 5^0.43 ~ 2.0: everything is computable on one desk
  std::uint32_t n = 5;
  double sigma = std::log(2.0) / std::log(5.0);
  auto d = mc::distinguishing_event_check(n, 1, sigma, 50000, RngSeed{116, 0});
  ModelParams p(n, 1, Alpha::finite(d.alpha));
  auto plug = mc::estimate_tv_x_plugin(p, 200000, RngSeed{117, 0});
  double tv_full = exact::exact_tv_full(n, 1, exact::Rational(2)).get_d();
  double gap = std::abs(d.p_alpha - d.p_unif);
  CHECK(gap <= plug.estimate + 3.0 * plug.std_error + plug.bias_bound + 0.02);
  CHECK(plug.estimate <= tv_full + plug.bias_bound + 3.0 * plug.std_error + 0.01);
  // and the plug-in tracks the exact X-restricted distance
  double tv_x = exact::exact_tv_x(n, 1, exact::Rational(2)).get_d();
  CHECK(std::abs(plug.estimate - tv_x) <= plug.bias_bound + 3.0 * plug.std_error + 0.01);
}

TEST_CASE("scalar histogram symmetry: the limit is even, finite-n skew shrinks") {
  auto sup_asymmetry = [](std::uint32_t n) {
    ModelParams p(n, 1, Alpha::finite(std::sqrt(double(n))));
    auto h = mc::scalar_x_histogram(p, 400000, RngSeed{301, 0}, 0);
    double md = 400000;
    double half_scale = h.scale / 2.0;
    auto center = static_cast<long long>(std::llround(h.center));  // even lattice point here
    double sup = 0.0;
    for (long long off = 2; off <= std::llround(2.0 * h.scale); off += 2) {
      double d = std::abs(double(h.count_at_s(center + off)) - double(h.count_at_s(center - off))) / md;
      sup = std::max(sup, half_scale * d);
    }
    return sup;
  };
  double a400 = sup_asymmetry(400);
  double a1600 = sup_asymmetry(1600);
  CHECK(a400 < 0.08);
  CHECK(a1600 < 0.06);
  CHECK(a1600 < a400 + 0.005);  // shrinks with n, up to sampling noise
}

TEST_CASE("chi-square has power against the wrong model at (2,1)") {
  // attachment samples at alpha=1 against the uniform exact X law
  ModelParams p(2, 1, Alpha::finite(1.0));
  mc::CountMap counts;
  const std::uint64_t m = 100000;
  for (std::uint64_t r = 0; r < m; ++r)
    ++counts[power_sums(sample_degrees_direct(p, RngSeed{302, r})).s2];
  auto unif_law = exact::exact_x_distribution(2, 1, std::nullopt);
  CHECK(mc::chi_square_gof(counts, unif_law).p_value < 1e-6);
  // and calibration: the matching law is accepted
  auto true_law = exact::exact_x_distribution(2, 1, exact::Rational(1));
  CHECK(mc::chi_square_gof(counts, true_law).p_value > 1e-4);
}

TEST_CASE("uniform urn statistic matches the exact uniform X law") {
  std::uint32_t n = 3, k = 1;
  auto law = exact::exact_x_distribution(n, k, std::nullopt);
  mc::UniformUrn urn(n, k);
  mc::CountMap counts;
  const std::uint64_t m = 50000;
  for (std::uint64_t r = 0; r < m; ++r) {
    Rng rng(RngSeed{118, r});
    urn.sample(rng);
    ++counts[urn.s2()];
  }
  CHECK(mc::chi_square_gof(counts, law).p_value > 1e-4);
  // power: the same counts against a wrong exact law
  auto wrong = exact::exact_x_distribution(n, k, exact::Rational(1, 2));
  CHECK(mc::chi_square_gof(counts, wrong).p_value < 1e-6);
  // off-support observations are rejected
  mc::CountMap bad = counts;
  ++bad[1];  // X = 1 is impossible for n=3, k=1
  CHECK_THROWS_AS(mc::chi_square_gof(bad, law), std::invalid_argument);
}
