#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ens2/common/error.hpp"
#include "ens2/core/synthetic.hpp"
#include "ens2/diagnostics/entropy.hpp"
#include "ens2/diagnostics/metrics.hpp"

using namespace ens2;
using namespace ens2::diagnostics;
using Catch::Matchers::WithinAbs;

namespace {

using Idx = std::vector<std::int64_t>;

// Maximum one-to-one matching by exhaustive search.
std::size_t brute_force_matches(const Idx& pred, const Idx& truth, std::int64_t T, std::size_t i,
                                std::vector<bool>& used) {
  if (i == pred.size()) return 0;
  std::size_t best = brute_force_matches(pred, truth, T, i + 1, used);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (used[j] || std::abs(pred[i] - truth[j]) > T) continue;
    used[j] = true;
    best = std::max(best, 1 + brute_force_matches(pred, truth, T, i + 1, used));
    used[j] = false;
  }
  return best;
}

Idx random_set(std::mt19937_64& rng, std::size_t max_size, std::int64_t range) {
  std::set<std::int64_t> s;
  const std::size_t n = rng() % (max_size + 1);
  while (s.size() < n) s.insert(std::int64_t(rng() % std::uint64_t(range)));
  Idx v(s.begin(), s.end());
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

// Independent Bandt-Pompe entropy of one window, patterns keyed by rank tuple.
double entropy_oracle(const std::vector<double>& x, std::size_t begin, std::size_t w, std::size_t order) {
  std::map<std::vector<std::size_t>, std::size_t> counts;
  for (std::size_t s = begin; s + order <= begin + w; ++s) {
    std::vector<std::size_t> idx(order);
    for (std::size_t i = 0; i < order; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[s + a] < x[s + b]; });
    ++counts[idx];
  }
  const double total = double(w - order + 1);
  double h = 0;
  for (const auto& [k, c] : counts) h -= c / total * std::log(c / total);
  double fact = 1;
  for (std::size_t i = 2; i <= order; ++i) fact *= double(i);
  return h / std::log(fact);
}

}  // namespace

TEST_CASE("forecast_metrics examples") {
  const std::vector<double> a{1.5, -2.0, 3.0};
  const auto same = forecast_metrics(a, a);
  CHECK(same.mse == 0.0);
  CHECK(same.mae == 0.0);
  const auto m = forecast_metrics(std::vector<double>{0, 0}, std::vector<double>{1, -1});
  CHECK(m.mse == 1.0);
  CHECK(m.mae == 1.0);
  const auto one = forecast_metrics(std::vector<double>{0}, std::vector<double>{3});
  CHECK(one.mse == 9.0);
  CHECK(one.mae == 3.0);
  CHECK_THROWS_AS(forecast_metrics(std::vector<double>{0}, std::vector<double>{1, 2}), InvalidArgument);
  std::ostringstream out;
  write_metrics_csv(out, m);
  CHECK(out.str() == "mse,mae\n1,1\n");
}

TEST_CASE("windowed_prf examples") {
  auto r = windowed_prf(Idx{103}, Idx{100}, 7);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.f1 == 1.0);
  r = windowed_prf(Idx{120}, Idx{100}, 7);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.f1 == 0.0);
  r = windowed_prf(Idx{103, 500}, Idx{100}, 7);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 1.0);
  CHECK_THAT(r.f1, WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(r.t_window == 7);
}

TEST_CASE("windowed_prf edge cases") {
  const auto empty = windowed_prf(Idx{}, Idx{}, 7);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);
  auto r = windowed_prf(Idx{3, 5}, Idx{1, 4}, 2);
  CHECK(r.tp == 2);
  r = windowed_prf(Idx{5, 5, 5}, Idx{5}, 0);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
  CHECK_THROWS_AS(windowed_prf(Idx{1}, Idx{1}, -1), InvalidArgument);
  CHECK_THROWS_AS(windowed_prf(Idx{-1}, Idx{1}, 1), InvalidArgument);
}

TEST_CASE("property: greedy matching equals brute-force optimum") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Idx pred = random_set(rng, 8, 40), truth = random_set(rng, 8, 40);
    const std::int64_t T = std::int64_t(rng() % 6);
    std::vector<bool> used(truth.size(), false);
    const std::size_t best = brute_force_matches(pred, truth, T, 0, used);
    const auto r = windowed_prf(pred, truth, T);
    INFO("trial " << trial);
    CHECK(r.tp == best);
    CHECK(r.fp == pred.size() - best);
    CHECK(r.fn == truth.size() - best);
  }
}

TEST_CASE("property: T = 0 is exact set intersection") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Idx pred = random_set(rng, 10, 20), truth = random_set(rng, 10, 20);
    std::set<std::int64_t> a(pred.begin(), pred.end()), b(truth.begin(), truth.end()), both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
    const auto r = windowed_prf(pred, truth, 0);
    CHECK(r.tp == both.size());
    CHECK(r.precision == (a.empty() ? 0.0 : double(both.size()) / double(a.size())));
    CHECK(r.recall == (b.empty() ? 0.0 : double(both.size()) / double(b.size())));
  }
}

TEST_CASE("property: swapping predictions and truth swaps precision and recall") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const Idx pred = random_set(rng, 12, 60), truth = random_set(rng, 12, 60);
    const std::int64_t T = std::int64_t(rng() % 8);
    const auto a = windowed_prf(pred, truth, T);
    const auto b = windowed_prf(truth, pred, T);
    CHECK(a.tp == b.tp);
    CHECK(a.precision == b.recall);
    CHECK(a.recall == b.precision);
    CHECK(a.f1 == b.f1);
    CHECK(a.tp <= std::min(pred.size(), truth.size()));
    CHECK(a.f1 >= 0.0);
    CHECK(a.f1 <= 1.0);
    CHECK(a.f1 <= 2.0 * std::min(a.precision, a.recall) + 1e-15);
  }
}

TEST_CASE("make_eval_result and JSON") {
  const auto r = make_eval_result(3, 1, 2, 5);
  CHECK(r.precision == 0.75);
  CHECK(r.recall == 0.6);
  CHECK_THAT(r.f1, WithinAbs(2 * 0.75 * 0.6 / 1.35, 1e-15));
  const auto j = to_json(r);
  CHECK(j.at("tp") == 3);
  CHECK(j.at("T") == 5);
}

TEST_CASE("ordinal patterns break ties by position") {
  const std::vector<double> x{1, 1, 1, 3, 2, 1};
  CHECK(ordinal_pattern(x, 0, 3) == ordinal_pattern(std::vector<double>{1, 2, 3}, 0, 3));
  CHECK(ordinal_pattern(x, 3, 3) == ordinal_pattern(std::vector<double>{3, 2, 1}, 0, 3));
  CHECK(ordinal_pattern(x, 3, 3) != ordinal_pattern(x, 0, 3));
}

TEST_CASE("permutation_entropy examples") {
  std::vector<double> inc(30);
  for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = double(i);
  for (double h : permutation_entropy(inc, 3, 18).values) CHECK(h == 0.0);

  // 18 consecutive triples, each of the 6 order-3 patterns exactly 3 times.
  const std::vector<double> uniform{8, 5, 17, 19, 9, 0, 16, 1, 15, 6, 11, 13, 14, 12, 7, 3, 4, 2, 18, 10};
  CHECK_THAT(entropy_oracle(uniform, 0, 20, 3), WithinAbs(1.0, 1e-12));
  const auto p = permutation_entropy(uniform, 3, 20);
  REQUIRE(p.values.size() == 1);
  CHECK_THAT(p.values[0], WithinAbs(1.0, 1e-12));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> noise(3000);
  for (auto& v : noise) v = g(rng);
  for (double h : permutation_entropy(noise, 3, 600).values) CHECK(h > 0.95);
}

TEST_CASE("permutation_entropy preconditions") {
  const std::vector<double> x(100, 0.0);
  CHECK_THROWS_AS(permutation_entropy(x, 1, 60), InvalidArgument);
  CHECK_THROWS_AS(permutation_entropy(x, 8, 60), InvalidArgument);
  CHECK_THROWS_AS(permutation_entropy(x, 3, 17), InvalidArgument);
  CHECK_THROWS_AS(permutation_entropy(std::vector<double>(10, 0.0), 3, 60), InvalidArgument);
}

TEST_CASE("property: sliding entropy matches a per-window oracle") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(0, 4);
  for (std::size_t order : {2u, 3u, 4u}) {
    std::vector<double> x(300);
    for (auto& v : x) v = small(rng);  // many ties
    std::size_t fact = 1;
    for (std::size_t i = 2; i <= order; ++i) fact *= i;
    const std::size_t w = order * fact + 5;
    const auto p = permutation_entropy(x, order, w);
    REQUIRE(p.values.size() == x.size() - w + 1);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      CHECK(p.values[i] >= 0.0);
      CHECK(p.values[i] <= 1.0);
      CHECK_THAT(p.values[i], WithinAbs(entropy_oracle(x, i, w, order), 1e-9));
    }
  }
}

TEST_CASE("property: entropy is invariant under monotone maps") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> x(1000), y(1000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = std::exp(3.0 * x[i]) + 7.0;
  }
  for (std::size_t order : {3u, 5u}) {
    std::size_t fact = 1;
    for (std::size_t i = 2; i <= order; ++i) fact *= i;
    const std::size_t w = std::max<std::size_t>(60, order * fact);
    CHECK(permutation_entropy(x, order, w).values == permutation_entropy(y, order, w).values);
  }
}

TEST_CASE("entropy_overlay rows and contrast") {
  core::SyntheticOptions clean;
  clean.periods = 2;
  clean.period_len = 1440;
  clean.noise_sigma = 0.01;
  auto noisy = clean;
  noisy.noise_sigma = 1.0;
  const auto a = core::generate_synthetic(clean), b = core::generate_synthetic(noisy);
  const auto pa = permutation_entropy(a.values(), 3, 60), pb = permutation_entropy(b.values(), 3, 60);
  const auto rows = entropy_overlay(a, pa);
  CHECK(rows.size() == a.size() - 60 + 1);
  CHECK(rows.front().timestamp == a[59].timestamp);
  for (const auto& r : rows) {
    CHECK(r.entropy >= 0.0);
    CHECK(r.entropy <= 1.0);
  }
  double ma = 0, mb = 0;
  for (double v : pa.values) ma += v;
  for (double v : pb.values) mb += v;
  CHECK(mb / double(pb.values.size()) > ma / double(pa.values.size()));
  CHECK_THROWS_AS(entropy_overlay(a.slice(0, 100), pa), InvalidArgument);
  std::ostringstream out;
  write_overlay_csv(out, entropy_overlay(a.slice(0, 100), permutation_entropy(a.slice(0, 100).values(), 3, 60)));
  std::string header;
  std::istringstream in(out.str());
  std::getline(in, header);
  CHECK(header == "timestamp,value,entropy");
}
