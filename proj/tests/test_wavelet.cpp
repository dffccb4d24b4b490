#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gainloss/rng.hpp"
#include "gainloss/series.hpp"
#include "gainloss/wavelet.hpp"
#include "test_util.hpp"

using namespace gainloss;

namespace {

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

double mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

const WaveletFamily kFamilies[] = {WaveletFamily::haar, WaveletFamily::daubechies4};

}  // namespace

TEST_CASE("filters satisfy the orthonormality relations") {
  for (WaveletFamily family : kFamilies) {
    const auto h = detail::scaling_filter(family);
    const auto g = detail::wavelet_filter(h);
    double hh = 0.0, gg = 0.0, hg = 0.0, hsum = 0.0, gsum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      hh += h[i] * h[i];
      gg += g[i] * g[i];
      hg += h[i] * g[i];
      hsum += h[i];
      gsum += g[i];
    }
    REQUIRE_THAT(hh, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(gg, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(hg, Catch::Matchers::WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(hsum, Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
    REQUIRE_THAT(gsum, Catch::Matchers::WithinAbs(0.0, 1e-12));
    if (h.size() == 4) {
      // shift-by-two orthogonality for the four-tap filter
      REQUIRE_THAT(h[0] * h[2] + h[1] * h[3], Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("constant series has zero detail coefficients") {
  LogPriceSeries x;
  x.values.assign(64, 3.7);
  for (WaveletFamily family : kFamilies) {
    const WaveletPyramid pyr = dwt(x, WaveletSpec{family, 4});
    for (const auto& level : pyr.details) {
      for (double d : level) REQUIRE_THAT(d, Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("alternating signal concentrates energy in the first detail level") {
  LogPriceSeries x;
  for (int i = 0; i < 128; ++i) x.values.push_back(i % 2 == 0 ? 1.0 : -1.0);
  // direct filter-response oracle: for Haar, d1[k] = (x_{2k} - x_{2k+1})/sqrt(2) = sqrt(2),
  // a1[k] = 0, so ALL energy lands in d1.
  const WaveletPyramid pyr = dwt(x, WaveletSpec{WaveletFamily::haar, 3});
  const double total = energy(x.values);
  REQUIRE_THAT(energy(pyr.details[0]), Catch::Matchers::WithinRel(total, 1e-12));
  for (double d : pyr.details[0]) {
    REQUIRE_THAT(d, Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
  }
  // Daubechies-4 keeps it in d1 as well (the scaling filter kills +-1 oscillation)
  const WaveletPyramid pyr4 = dwt(x, WaveletSpec{WaveletFamily::daubechies4, 3});
  REQUIRE(energy(pyr4.details[0]) / total > 0.999);
}

TEST_CASE("perfect reconstruction and Parseval on random input") {
  for (WaveletFamily family : kFamilies) {
    for (int levels : {1, 3, 6}) {
      const LogPriceSeries x = testutil::random_walk(1000 + levels, 1 << 9, 0.02);
      const WaveletSpec spec{family, levels};
      const WaveletPyramid pyr = dwt(x, spec);
      REQUIRE_THAT(pyramid_energy(pyr), Catch::Matchers::WithinRel(energy(x.values), 1e-10));
      const LogPriceSeries back = idwt(pyr, spec);
      REQUIRE(back.values.size() == x.values.size());
      for (std::size_t i = 0; i < x.values.size(); ++i) {
        REQUIRE_THAT(back.values[i], Catch::Matchers::WithinAbs(x.values[i], 1e-10));
      }
    }
  }
}

TEST_CASE("transform is linear") {
  const LogPriceSeries x = testutil::random_walk(5, 256, 0.01);
  const LogPriceSeries y = testutil::random_walk(6, 256, 0.03);
  LogPriceSeries combo;
  const double a = 2.5, b = -1.25;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    combo.values.push_back(a * x.values[i] + b * y.values[i]);
  }
  const WaveletSpec spec{WaveletFamily::daubechies4, 4};
  const WaveletPyramid px = dwt(x, spec);
  const WaveletPyramid py = dwt(y, spec);
  const WaveletPyramid pc = dwt(combo, spec);
  for (int level = 0; level < 4; ++level) {
    for (std::size_t i = 0; i < pc.details[level].size(); ++i) {
      REQUIRE_THAT(pc.details[level][i],
                   Catch::Matchers::WithinAbs(a * px.details[level][i] + b * py.details[level][i],
                                              1e-10));
    }
  }
}

TEST_CASE("depth beyond the length is rejected") {
  LogPriceSeries x;
  x.values.assign(16, 1.0);
  REQUIRE_THROWS_AS(dwt(x, WaveletSpec{WaveletFamily::haar, 5}), SizeError);
  REQUIRE_NOTHROW(dwt(x, WaveletSpec{WaveletFamily::haar, 4}));
  x.values.assign(20, 1.0);  // not a multiple of 2^3
  REQUIRE_THROWS_AS(dwt(x, WaveletSpec{WaveletFamily::haar, 3}), SizeError);
}

TEST_CASE("front truncation to a multiple of 2^J") {
  LogPriceSeries x = testutil::random_walk(9, 1000, 0.01);
  const double last = x.values.back();
  const std::size_t dropped = truncate_front_to_multiple(x, 5);
  REQUIRE(dropped == 1000 % 32);
  REQUIRE(x.values.size() == (1000 / 32) * 32);
  REQUIRE(x.values.back() == last);  // keeps the most recent data
}

TEST_CASE("high-pass filtration is zero-mean and obeys the sum rule") {
  const LogPriceSeries x = testutil::random_walk(12, 4096, 0.015);
  for (WaveletFamily family : kFamilies) {
    const WaveletSpec spec{family, 8};
    const int k = 5;
    const Filtration r = high_pass_filtration(x, k, spec);
    REQUIRE(r.series.values.size() == 4096);
    REQUIRE_THAT(mean(r.series.values), Catch::Matchers::WithinAbs(0.0, 1e-10));

    // complement: reconstruction from levels >= k plus the approximation
    WaveletPyramid pyr = dwt(x, spec);
    for (int level = 1; level < k; ++level) {
      auto& d = pyr.details[static_cast<std::size_t>(level - 1)];
      std::fill(d.begin(), d.end(), 0.0);
    }
    const LogPriceSeries low = idwt(pyr, spec);
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      REQUIRE_THAT(r.series.values[i] + low.values[i],
                   Catch::Matchers::WithinAbs(x.values[i], 1e-10));
    }
  }
}

TEST_CASE("long sinusoids are removed by the filtration") {
  // period 2^(k+2) lives well below the R_k cut, so almost no energy survives
  const int k = 5;
  const std::size_t n = 4096;
  LogPriceSeries x;
  const double period = std::pow(2.0, k + 2);
  for (std::size_t i = 0; i < n; ++i) {
    x.values.push_back(std::sin(2.0 * Rng::pi() * static_cast<double>(i) / period));
  }
  const Filtration r4 =
      high_pass_filtration(x, k, WaveletSpec{WaveletFamily::daubechies4, 8});
  REQUIRE(energy(r4.series.values) < 0.05 * energy(x.values));
  // the two-tap Haar filter has weaker frequency selectivity
  const Filtration rh = high_pass_filtration(x, k, WaveletSpec{WaveletFamily::haar, 8});
  REQUIRE(energy(rh.series.values) < 0.06 * energy(x.values));
}

TEST_CASE("white noise mostly survives, and the output energy equals the kept coefficients") {
  Rng rng(404);
  LogPriceSeries x;
  for (int i = 0; i < 4096; ++i) x.values.push_back(rng.normal());
  const WaveletSpec spec{WaveletFamily::daubechies4, 8};
  const int k = 6;
  const Filtration r = high_pass_filtration(x, k, spec);

  // energy-partition oracle: orthonormality makes the output energy exactly
  // the energy of the retained detail levels
  const WaveletPyramid pyr = dwt(x, spec);
  double kept = 0.0;
  for (int level = 1; level < k; ++level) kept += energy(pyr.details[level - 1]);
  REQUIRE_THAT(energy(r.series.values), Catch::Matchers::WithinRel(kept, 1e-10));
  REQUIRE(variance(r.series.values) > 0.9 * variance(x.values));
}

TEST_CASE("variance of R_k shrinks as k decreases") {
  const LogPriceSeries x = testutil::random_walk(2024, 8192, 0.01);
  const WaveletSpec spec{WaveletFamily::daubechies4, 10};
  double prev = -1.0;
  for (int k : {2, 4, 6, 8, 10}) {
    const Filtration r = high_pass_filtration(x, k, spec);
    const double v = variance(r.series.values);
    REQUIRE(v >= prev);
    prev = v;
  }
}

TEST_CASE("filtration input validation") {
  const LogPriceSeries x = testutil::random_walk(1, 256, 0.01);
  REQUIRE_THROWS_AS(high_pass_filtration(x, 1, WaveletSpec{WaveletFamily::haar, 6}), SizeError);
  REQUIRE_THROWS_AS(high_pass_filtration(x, 7, WaveletSpec{WaveletFamily::haar, 6}), SizeError);
  LogPriceSeries tiny;
  tiny.values.assign(7, 1.0);
  REQUIRE_THROWS_AS(high_pass_filtration(tiny, 2, WaveletSpec{WaveletFamily::haar, 3}),
                    SizeError);
}
