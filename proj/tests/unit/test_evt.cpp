#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ens2/common/error.hpp"
#include "ens2/evt/gpd.hpp"
#include "ens2/evt/pot.hpp"

using namespace ens2;
using namespace ens2::evt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> uniform_samples(double hi, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> v(n);
  for (auto& x : v) {
    do x = u(rng); while (x <= 0.0);
  }
  return v;
}

std::vector<double> exponential_samples(double mean, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0 / mean);
  std::vector<double> v(n);
  for (auto& x : v) {
    do x = e(rng); while (x <= 0.0);
  }
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = double(i + 1);
  return v;
}

void check_invariants(const PotState& s) {
  CHECK(s.z >= s.t);
  CHECK(s.peaks.size() <= s.n);
  for (double p : s.peaks) CHECK(p > 0.0);
}

}  // namespace

TEST_CASE("gpd_cdf examples") {
  for (GpdParams p : {GpdParams{1, 0}, GpdParams{2, 0.5}, GpdParams{0.3, -0.4}}) CHECK(gpd_cdf(0.0, p) == 0.0);
  CHECK_THAT(gpd_cdf(1.5, {1.5, 0.0}), WithinAbs(1.0 - std::exp(-1.0), 1e-15));
  CHECK_THAT(gpd_cdf(1.5, {1.5, 0.0}), WithinAbs(0.632121, 1e-6));
  CHECK_THAT(gpd_cdf(0.5, {1.0, 1.0}), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(gpd_cdf(-0.1, {1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(gpd_cdf(2.1, {1.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(gpd_cdf(1.0, {0.0, 0.0}), InvalidArgument);
}

TEST_CASE("property: gpd_cdf is monotone from 0 towards 1") {
  for (GpdParams p : {GpdParams{1, 0}, GpdParams{2, 0.5}, GpdParams{0.5, -0.3}, GpdParams{1, 1e-9}}) {
    double prev = 0.0;
    const double top = p.k > 0 ? p.sigma / p.k : gpd_quantile(1.0 - 1e-7, p);
    for (int i = 0; i <= 1000; ++i) {
      const double f = gpd_cdf(top * i / 1000.0, p);
      CHECK(f >= prev);
      CHECK(f <= 1.0);
      prev = f;
    }
    CHECK(prev > 1.0 - 1e-6);
  }
}

TEST_CASE("property: quantile and cdf round trip") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> sig(0.1, 5.0), shape(-0.8, 0.9), unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    GpdParams p{sig(rng), shape(rng)};
    if (i % 10 == 0) p.k = 0.0;
    double u;
    do u = unit(rng); while (u <= 0.0);
    CHECK_THAT(gpd_cdf(gpd_quantile(u, p), p), WithinAbs(u, 1e-9));
  }
}

TEST_CASE("gpd_fit_moments on closed-form cases") {
  const auto uni = gpd_fit_moments(uniform_samples(2.0, 100000, 1));
  CHECK_THAT(uni.k, WithinAbs(1.0, 0.05));
  CHECK_THAT(uni.sigma, WithinAbs(2.0, 0.05));
  const auto ex = gpd_fit_moments(exponential_samples(1.0, 100000, 2));
  CHECK_THAT(ex.k, WithinAbs(0.0, 0.05));
  CHECK_THAT(ex.sigma, WithinAbs(1.0, 0.05));
  CHECK_THROWS_AS(gpd_fit_moments(std::vector<double>{0.7, 0.7}), ComputeError);
  CHECK_THROWS_AS(gpd_fit_moments(std::vector<double>{0.7, -1.0}), InvalidArgument);
}

TEST_CASE("gpd_fit_moments matches hand-computed moments") {
  const std::vector<double> x{1.0, 2.0, 4.0};
  // mean 7/3, unbiased variance 7/3, so r = 7/3.
  const double r = (7.0 / 3.0) * (7.0 / 3.0) / (7.0 / 3.0);
  const auto p = gpd_fit_moments(x);
  CHECK_THAT(p.k, WithinAbs((r - 1) / 2, 1e-12));
  CHECK_THAT(p.sigma, WithinAbs(7.0 / 3.0 * (r + 1) / 2, 1e-12));
}

TEST_CASE("gpd_fit_lme examples") {
  const auto ex = gpd_fit_lme(exponential_samples(1.0, 100000, 3));
  CHECK(ex.status == FitStatus::converged);
  CHECK_THAT(ex.params.k, WithinAbs(0.0, 0.05));
  CHECK_THAT(ex.params.sigma, WithinAbs(1.0, 0.05));
  const auto heavy = gpd_fit_lme(sample_gpd({1.0, 0.5}, 100000, 4));
  CHECK(heavy.params.k >= 0.45);
  CHECK(heavy.params.k <= 0.55);
  CHECK_THROWS_AS(gpd_fit_lme(std::vector<double>(10, 2.0)), ComputeError);
  CHECK_THROWS_AS(gpd_fit_lme(std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("gpd_fit_lme solves its defining equation") {
  const auto x = sample_gpd({1.3, 0.2}, 5000, 9);
  const auto fit = gpd_fit_lme(x);
  REQUIRE(fit.status == FitStatus::converged);
  const double b = fit.params.b();
  double inv = 0, logs = 0;
  for (double v : x) inv += 1.0 / (1.0 - b * v), logs += std::log(1.0 - b * v);
  inv /= double(x.size());
  const double k = -logs / double(x.size());
  CHECK_THAT(k, WithinAbs(fit.params.k, 1e-9));
  CHECK_THAT(inv, WithinAbs(1.0 / (1.0 - k), 1e-8));
}

TEST_CASE("gpd_fit_lme: warm start agrees with the cold solve") {
  const auto x = sample_gpd({1.0, -0.2}, 3000, 10);
  const auto cold = gpd_fit_lme(x);
  const auto warm = gpd_fit_lme(x, cold.params.b() * 1.05);
  CHECK_THAT(warm.params.k, WithinAbs(cold.params.k, 1e-7));
  CHECK_THAT(warm.params.sigma, WithinRel(cold.params.sigma, 1e-7));
}

TEST_CASE("property: estimator consistency on simulated tails") {
  for (double k : {-0.3, 0.0, 0.5}) {
    std::vector<double> lme_k, lme_s, mom_k, mom_s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto x = sample_gpd({1.0, k}, 10000, 1000 + seed);
      const auto a = gpd_fit_lme(x).params;
      lme_k.push_back(std::abs(a.k - k));
      lme_s.push_back(std::abs(a.sigma - 1.0));
      const auto b = gpd_fit_moments(x);
      mom_k.push_back(std::abs(b.k - k));
      mom_s.push_back(std::abs(b.sigma - 1.0));
    }
    INFO("k = " << k);
    CHECK(median(lme_k) < 0.1);
    CHECK(median(lme_s) < 0.1);
    CHECK(median(mom_k) < 0.1);
    CHECK(median(mom_s) < 0.1);
  }
}

TEST_CASE("lemma_moment_check examples") {
  const auto zero = lemma_moment_check({1.0, 0.3}, 0.0, 1000, 1);
  CHECK(zero.empirical == 1.0);
  CHECK(zero.theoretical == 1.0);
  const auto a = lemma_moment_check({1.0, 0.5}, 1.0, 1000000, 2);
  CHECK_THAT(a.theoretical, WithinAbs(1.0 / 1.5, 1e-15));
  CHECK_THAT(a.empirical, WithinAbs(a.theoretical, 0.005));
  const auto b = lemma_moment_check({2.0, -0.2}, -1.0, 1000000, 3);
  CHECK_THAT(b.theoretical, WithinAbs(1.0 / 1.2, 1e-15));
  CHECK_THAT(b.empirical, WithinAbs(b.theoretical, 0.005));
  CHECK_THROWS_AS(lemma_moment_check({1.0, 0.5}, -2.0, 100, 1), InvalidArgument);
}

TEST_CASE("property: lemma holds across a (k, r) grid") {
  std::uint64_t seed = 50;
  for (double k : {-0.3, 0.1, 0.4})
    for (double r : {-1.0, 0.5, 1.0}) {
      const auto c = lemma_moment_check({1.0, k}, r, 200000, seed++);
      INFO("k = " << k << ", r = " << r);
      CHECK_THAT(c.theoretical, WithinAbs(1.0 / (1.0 + r * k), 1e-15));
      CHECK(std::abs(c.empirical - c.theoretical) <= 3.0 * c.standard_error);
    }
}

TEST_CASE("pot_quantile examples") {
  // q n / N_t = 1.
  for (GpdParams p : {GpdParams{1, 0}, GpdParams{3, 0.4}, GpdParams{0.5, -0.2}})
    CHECK_THAT(pot_quantile(2.5, p, 0.1, 100, 10), WithinAbs(2.5, 1e-12));
  // q n / N_t = 0.1 with a uniform tail.
  CHECK_THAT(pot_quantile(0.0, {1.0, 1.0}, 0.01, 1000, 100), WithinAbs(0.9, 1e-12));
  // q n / N_t = 1/e with an exponential tail.
  const double q = std::exp(-1.0) / 1000.0;
  CHECK_THAT(pot_quantile(10.0, {2.0, 0.0}, q, 1000, 1), WithinAbs(12.0, 1e-9));
  CHECK_THAT(pot_quantile(10.0, {2.0, 1e-10}, q, 1000, 1), WithinAbs(12.0, 1e-6));
  CHECK_THROWS_AS(pot_quantile(0, {1, 0}, 1.5, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(pot_quantile(0, {1, 0}, 0.1, 10, 0), InvalidArgument);
}

TEST_CASE("property: pot_quantile's tail probability equals q") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> shape(-0.5, 0.5), unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const GpdParams p{0.5 + unit(rng), shape(rng)};
    const std::uint64_t n = 10000, nt = 100 + rng() % 400;
    const double q = 1e-4 + unit(rng) * 0.9 * double(nt) / double(n);
    const double z = pot_quantile(1.0, p, q, n, nt);
    const double tail = double(nt) / double(n) * (1.0 - gpd_cdf(z - 1.0, p));
    CHECK_THAT(tail, WithinRel(q, 1e-8));
  }
}

TEST_CASE("pot_init on 1..1000") {
  PotConfig c;
  const auto s = pot_init(ramp(1000), c);
  CHECK(s.initialized);
  // Interpolated order statistics: positions 0.95 * 999 and 0.99 * 999.
  CHECK_THAT(s.t, WithinAbs(950.05, 1e-9));
  CHECK_THAT(s.z_empirical, WithinAbs(990.01, 1e-9));
  CHECK(s.n == 1000);
  CHECK(s.peaks.size() == 50);
  CHECK(s.gpd.has_value());
  check_invariants(s);
}

TEST_CASE("pot_init: preconditions") {
  PotConfig c;
  c.theta = 0.99;
  c.q = 0.99;
  CHECK_THROWS_AS(pot_init(ramp(100), c), ConfigError);
  CHECK_THROWS_AS(pot_init(ramp(29), PotConfig{}), InvalidArgument);
}

TEST_CASE("pot_init: Gaussian training errors") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> e(20000);
  for (auto& v : e) v = g(rng);
  PotConfig c;
  c.q = 0.999;
  const auto s = pot_init(e, c);
  std::vector<double> sorted = e;
  std::sort(sorted.begin(), sorted.end());
  const double pos = 0.99 * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(pos);
  const double q99 = sorted[lo] + (pos - double(lo)) * (sorted[lo + 1] - sorted[lo]);
  CHECK(s.z > s.t);
  CHECK(s.z > q99);
}

TEST_CASE("pot_step branches") {
  PotConfig c;
  auto s = pot_init(ramp(1000), c);

  SECTION("anomaly") {
    const auto peaks = s.peaks.size();
    const auto z = s.z;
    CHECK(pot_step(s, z + 1.0, 7) == Verdict::anomaly);
    CHECK(s.anomalies.size() == 1);
    CHECK(s.anomalies.back() == std::pair<std::int64_t, double>{7, z + 1.0});
    CHECK(s.peaks.size() == peaks);
    CHECK(s.z == z);
    CHECK(s.n == 1001);
  }
  SECTION("candidate") {
    const auto peaks = s.peaks.size();
    const double e = 0.5 * (s.t + s.z);
    CHECK(pot_step(s, e, 8) == Verdict::candidate);
    CHECK(s.peaks.size() == peaks + 1);
    CHECK_THAT(s.peaks.back(), WithinAbs(e - s.t, 1e-12));
    CHECK(s.n_peaks_total == peaks + 1);
    CHECK(s.n == 1001);
    check_invariants(s);
  }
  SECTION("normal") {
    const auto before = s;
    CHECK(pot_step(s, 1.0, 9) == Verdict::normal);
    CHECK(s.n == before.n + 1);
    CHECK(s.z == before.z);
    CHECK(s.t == before.t);
    CHECK(s.peaks == before.peaks);
    CHECK(s.anomalies.empty());
  }
  SECTION("uninitialized") {
    PotState empty;
    CHECK_THROWS_AS(pot_step(empty, 1.0, 0), InvalidArgument);
  }
}

TEST_CASE("property: every pot_step keeps z >= t") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PotConfig c;
    c.sliding_t = seed % 2 == 1;
    c.sliding_window = 500;
    c.max_peaks = 200;
    c.estimator = seed == 4 ? GpdEstimator::moments : GpdEstimator::lme;
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    std::vector<double> train(500);
    for (auto& v : train) v = ln(rng);
    auto s = pot_init(train, c);
    for (int i = 0; i < 5000; ++i) {
      const double e = (i % 97 == 0) ? 50.0 * ln(rng) : ln(rng);
      pot_step(s, e, i);
      REQUIRE(s.z >= s.t);
      REQUIRE(s.peaks.size() <= c.max_peaks);
      REQUIRE(s.peaks.size() <= s.n);
    }
    check_invariants(s);
  }
}

TEST_CASE("pot_step false-alarm rate on exponential errors") {
  PotConfig c;
  c.q = 0.99;
  c.theta = 0.9;
  auto s = pot_init(exponential_samples(1.0, 5000, 8), c);
  const auto stream = exponential_samples(1.0, 100000, 9);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) flagged += pot_step(s, stream[i], std::int64_t(i)) == Verdict::anomaly;
  const double rate = double(flagged) / double(stream.size());
  CHECK(rate >= 0.2 * 0.01);
  CHECK(rate <= 5.0 * 0.01);
}

TEST_CASE("error floor keeps z above it") {
  PotConfig c;
  c.error_floor = 1e-3;
  const auto s = pot_init(std::vector<double>(100, 1e-12), c);
  CHECK(s.z >= 1e-3);
  auto st = s;
  CHECK(pot_step(st, 5e-4, 0) != Verdict::anomaly);
}

TEST_CASE("pot state JSON round trip") {
  PotConfig c;
  c.sliding_t = true;
  c.sliding_window = 100;
  auto s = pot_init(exponential_samples(2.0, 300, 1), c);
  const auto more = exponential_samples(2.0, 200, 2);
  for (std::size_t i = 0; i < more.size(); ++i) pot_step(s, more[i] * (i % 50 ? 1.0 : 20.0), std::int64_t(i));
  const auto back = pot_state_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back.t == s.t);
  CHECK(back.z == s.z);
  CHECK(back.peaks == s.peaks);
  CHECK(back.anomalies == s.anomalies);
  CHECK(back.recent == s.recent);
  CHECK(back.n == s.n);
  REQUIRE(back.gpd.has_value());
  CHECK(back.gpd->k == s.gpd->k);
  auto a = s, b = back;
  for (int i = 0; i < 100; ++i) {
    const double e = 0.1 * i;
    CHECK(pot_step(a, e, i) == pot_step(b, e, i));
    CHECK(a.z == b.z);
  }
  auto bad = to_json(s);
  bad["z"] = s.t - 1.0;
  CHECK_THROWS_AS(pot_state_from_json(bad), DataError);
  CHECK_THROWS_AS(pot_state_from_json(nlohmann::json::parse("{\"t\": 1}")), DataError);
}

TEST_CASE("verdict strings") {
  for (Verdict v : {Verdict::normal, Verdict::candidate, Verdict::anomaly}) CHECK(verdict_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(verdict_from_string("odd"), InvalidArgument);
}
