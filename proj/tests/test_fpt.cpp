#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "gainloss/fpt.hpp"
#include "gainloss/models.hpp"
#include "gainloss/rng.hpp"
#include "gainloss/series.hpp"
#include "test_util.hpp"

using namespace gainloss;

namespace {

// Definitional oracle for the symmetry check below: waiting time from the
// first day only. Applied to many independent paths it yields iid samples,
// which the KS critical value requires (overlapping starts would not).
int first_passage_from_origin(const std::vector<double>& x, double rho) {
  const double target = x[0] + rho;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const bool crossed = rho > 0.0 ? x[j] >= target : x[j] <= target;
    if (crossed) return static_cast<int>(j);
  }
  return 0;  // censored
}

}  // namespace

TEST_CASE("naive sampler on hand-enumerated paths") {
  SECTION("single step crosses") {
    LogPriceSeries x;
    x.values = {0.0, 0.06};
    const FptSamples s = fpt_samples_naive(x, 0.05);
    REQUIRE(s.samples == std::vector<int>{1});
    REQUIRE(s.starts_scanned == 1);
    REQUIRE(s.starts_hit == 1);
  }
  SECTION("only the first start ever crosses") {
    LogPriceSeries x;
    x.values = {0.0, 0.02, 0.04, 0.06};
    const FptSamples s = fpt_samples_naive(x, 0.05);
    REQUIRE(s.samples == std::vector<int>{3});
    REQUIRE(s.starts_scanned == 3);
    REQUIRE(s.starts_hit == 1);
  }
  SECTION("no crossing on a constant path") {
    LogPriceSeries x;
    x.values = {1.0, 1.0, 1.0, 1.0};
    const FptSamples s = fpt_samples_naive(x, -0.05);
    REQUIRE(s.samples.empty());
    REQUIRE(s.starts_hit == 0);
    REQUIRE(s.starts_scanned == 3);
  }
}

TEST_CASE("rho = 0 is rejected") {
  LogPriceSeries x;
  x.values = {0.0, 1.0};
  REQUIRE_THROWS_AS(fpt_samples_naive(x, 0.0), DomainError);
  REQUIRE_THROWS_AS(fpt_samples_fast(x, 0.0), DomainError);
}

TEST_CASE("fast sampler equals naive on random walks") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t n = 50 + (seed * 37) % 1950;
    const LogPriceSeries x = testutil::random_walk(seed, n, 0.01);
    const double mult = 0.5 + 0.2 * static_cast<double>(seed % 20);
    for (double rho : {mult * 0.01, -mult * 0.01}) {
      const FptSamples fast = fpt_samples_fast(x, rho);
      const FptSamples naive = fpt_samples_naive(x, rho);
      REQUIRE(fast.samples == naive.samples);
      REQUIRE(fast.starts_scanned == naive.starts_scanned);
      REQUIRE(fast.starts_hit == naive.starts_hit);
    }
  }
}

TEST_CASE("uniform staircase: every hit start waits exactly k steps") {
  LogPriceSeries x;
  const double d = 1.0 / 64.0;  // exact in binary, so s*d comparisons are exact
  for (int i = 0; i < 200; ++i) x.values.push_back(i * d);
  const int k = 7;
  const FptSamples s = fpt_samples_fast(x, k * d);
  REQUIRE(s.starts_hit == 200 - k);
  for (int v : s.samples) REQUIRE(v == k);
}

TEST_CASE("reflection symmetry: negated series swaps signs") {
  for (std::uint64_t seed : {3u, 14u, 159u}) {
    const LogPriceSeries x = testutil::random_walk(seed, 800, 0.013);
    LogPriceSeries neg;
    for (double v : x.values) neg.values.push_back(-v);
    for (double rho : {0.03, 0.07}) {
      const FptSamples up = fpt_samples_fast(x, rho);
      const FptSamples down = fpt_samples_fast(neg, -rho);
      REQUIRE(up.samples == down.samples);
    }
  }
}

TEST_CASE("starts_hit grows monotonically as |rho| shrinks") {
  const LogPriceSeries x = testutil::random_walk(77, 3000, 0.01);
  std::int64_t prev_hits = -1;
  for (double rho : {0.08, 0.06, 0.04, 0.02, 0.01, 0.005, 0.001}) {
    const FptSamples s = fpt_samples_fast(x, rho);
    REQUIRE(s.starts_hit >= prev_hits);
    prev_hits = s.starts_hit;
  }
  // below the smallest single step every start with an up-move hits at once
  const FptSamples tiny = fpt_samples_fast(x, 1e-9);
  REQUIRE(static_cast<double>(tiny.starts_hit) / static_cast<double>(tiny.starts_scanned) > 0.95);
}

TEST_CASE("gain and loss distributions agree for a symmetric iid walk") {
  const double sigma = 0.01;
  const double rho = 5.0 * sigma;
  const int n_paths = 220000;
  const std::size_t path_len = 301;
  Rng rng(20240601);
  std::vector<int> gain, loss;
  std::vector<double> x(path_len);
  for (int p = 0; p < n_paths; ++p) {
    x[0] = 0.0;
    for (std::size_t i = 1; i < path_len; ++i) x[i] = x[i - 1] + sigma * rng.normal();
    if (const int s = first_passage_from_origin(x, rho)) gain.push_back(s);
    if (const int s = first_passage_from_origin(x, -rho)) loss.push_back(s);
  }
  REQUIRE(gain.size() >= 100000);
  REQUIRE(loss.size() >= 100000);
  const double d = testutil::ks_distance(gain, loss);
  REQUIRE(d < testutil::ks_critical(0.01, gain.size(), loss.size()));
}

TEST_CASE("empirical distribution from counts") {
  FptSamples s;
  s.rho = 0.1;
  s.samples = {1, 1, 2};
  s.starts_scanned = 3;
  s.starts_hit = 3;
  const FptDistribution d = empirical_distribution(s);
  REQUIRE(d.support == std::vector<int>{1, 2});
  REQUIRE_THAT(d.probabilities[0], Catch::Matchers::WithinRel(2.0 / 3.0, 1e-15));
  REQUIRE_THAT(d.probabilities[1], Catch::Matchers::WithinRel(1.0 / 3.0, 1e-15));
}

TEST_CASE("single-atom distribution") {
  FptSamples s;
  s.rho = 0.1;
  s.samples = {4, 4, 4, 4};
  const FptDistribution d = empirical_distribution(s);
  REQUIRE(d.support == std::vector<int>{4});
  REQUIRE(d.probabilities == std::vector<double>{1.0});
}

TEST_CASE("empty samples are rejected") {
  FptSamples s;
  s.rho = 0.1;
  REQUIRE_THROWS_AS(empirical_distribution(s), EmptyInputError);
}

TEST_CASE("probabilities sum to one") {
  Rng rng(5);
  FptSamples s;
  s.rho = 0.05;
  for (int i = 0; i < 20000; ++i) {
    s.samples.push_back(1 + static_cast<int>(rng.below(500)));
  }
  const FptDistribution d = empirical_distribution(s, true);
  double total = 0.0;
  for (double p : d.probabilities) total += p;
  REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (std::size_t i = 1; i < d.support.size(); ++i) REQUIRE(d.support[i] > d.support[i - 1]);
  REQUIRE(!d.bin_edges.empty());
}

TEST_CASE("empirical distribution matches a geometric source") {
  // synthetic sampling oracle: inverse-CDF geometric draws
  const double p = 0.2;
  Rng rng(31415);
  FptSamples s;
  s.rho = 0.05;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    const int k = 1 + static_cast<int>(std::floor(std::log(u) / std::log(1.0 - p)));
    s.samples.push_back(k);
  }
  const FptDistribution d = empirical_distribution(s);
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    const int k = d.support[i];
    const double expected = p * std::pow(1.0 - p, k - 1);
    if (expected * n < 25.0) continue;  // too few expected counts for the band
    const double band = 3.0 * std::sqrt(expected * (1.0 - expected) / n);
    REQUIRE_THAT(d.probabilities[i], Catch::Matchers::WithinAbs(expected, band));
  }
}
