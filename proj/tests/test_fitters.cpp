#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gainloss/fitters.hpp"
#include "gainloss/rng.hpp"
#include "test_util.hpp"

using namespace gainloss;

namespace {

LeverageCurve exp_curve(double a, double t_scale, int first, int last, double noise_sigma = 0.0,
                        std::uint64_t seed = 0) {
  Rng rng(seed);
  LeverageCurve curve;
  curve.kind = LeverageKind::correlation;
  for (int tau = first; tau <= last; ++tau) {
    curve.lags.push_back(tau);
    double v = -a * std::exp(-tau / t_scale);
    if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
    curve.values.push_back(v);
    curve.n_pairs.push_back(1000);
  }
  return curve;
}

// Generalized-gamma sampler: T = beta * G^{1/nu} with G ~ Gamma(alpha, 1).
// Deterministic per seed; uses the library Rng only as a uniform source.
std::vector<double> gengamma_draws(double alpha, double beta, double nu, int n,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  // Marsaglia-Tsang for Gamma(alpha >= 1, 1); alpha < 1 boost trick
  const auto gamma_draw = [&](double a) {
    double boost = 1.0;
    if (a < 1.0) {
      boost = std::pow(1.0 - rng.uniform(), 1.0 / a);
      a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double z = rng.normal();
      const double v = std::pow(1.0 + c * z, 3);
      if (v <= 0.0) continue;
      const double u = 1.0 - rng.uniform();
      if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return boost * d * v;
    }
  };
  for (int i = 0; i < n; ++i) out.push_back(beta * std::pow(gamma_draw(alpha), 1.0 / nu));
  return out;
}

FptSamples to_samples(const std::vector<double>& draws) {
  FptSamples s;
  s.rho = 0.05;
  for (double d : draws) s.samples.push_back(std::max(1, static_cast<int>(std::lround(d))));
  s.starts_scanned = s.starts_hit = static_cast<std::int64_t>(s.samples.size());
  return s;
}

}  // namespace

TEST_CASE("noiseless exponential decay is recovered exactly") {
  const LeverageCurve curve = exp_curve(0.12, 12.0, 1, 50);
  const ExpDecayFit fit = fit_expdecay(curve, 1, 50);
  REQUIRE_THAT(fit.a, Catch::Matchers::WithinAbs(0.12, 1e-8));
  REQUIRE_THAT(fit.t_scale, Catch::Matchers::WithinAbs(12.0, 1e-6));
  REQUIRE(fit.residual < 1e-10);
}

TEST_CASE("noisy decay recovers A within 0.01 for every seed") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const LeverageCurve curve = exp_curve(0.12, 12.0, 1, 50, 0.005, seed);
    const ExpDecayFit fit = fit_expdecay(curve, 1, 50);
    REQUIRE_THAT(fit.a, Catch::Matchers::WithinAbs(0.12, 0.01));
  }
}

TEST_CASE("positive curves fit with negative amplitude") {
  LeverageCurve curve = exp_curve(0.2, 10.0, 1, 40);
  for (double& v : curve.values) v = -v;  // reversed leverage
  const ExpDecayFit fit = fit_expdecay(curve, 1, 40);
  REQUIRE_THAT(fit.a, Catch::Matchers::WithinAbs(-0.2, 1e-8));
}

TEST_CASE("expdecay fit needs four points in range") {
  const LeverageCurve curve = exp_curve(0.1, 5.0, 1, 3);
  REQUIRE_THROWS_AS(fit_expdecay(curve, 1, 50), SizeError);
}

TEST_CASE("gengamma pdf special cases") {
  SECTION("alpha = nu = 1 is exponential") {
    GenGammaParams p;
    p.alpha = 1.0;
    p.beta = 7.0;
    p.nu = 1.0;
    for (double t : {0.5, 1.0, 5.0, 20.0}) {
      REQUIRE_THAT(gengamma_pdf(p, t),
                   Catch::Matchers::WithinRel(std::exp(-t / 7.0) / 7.0, 1e-12));
    }
  }
  SECTION("nu = 1 is the ordinary gamma") {
    GenGammaParams p;
    p.alpha = 3.0;
    p.beta = 2.0;
    p.nu = 1.0;
    for (double t : {0.7, 2.0, 9.0}) {
      const double want = std::pow(t, 2.0) * std::exp(-t / 2.0) / (std::pow(2.0, 3.0) * 2.0);
      REQUIRE_THAT(gengamma_pdf(p, t), Catch::Matchers::WithinRel(want, 1e-12));
    }
  }
  SECTION("t <= 0 is out of domain") {
    GenGammaParams p;
    REQUIRE_THROWS_AS(gengamma_pdf(p, 0.0), DomainError);
    REQUIRE_THROWS_AS(gengamma_pdf(p, -1.0), DomainError);
  }
}

TEST_CASE("gengamma pdf integrates to one") {
  // quadrature oracle in log time: the substitution t = e^s tames both the
  // power behavior near 0 and the stretched-exponential tail
  Rng rng(4242);
  for (int trial = 0; trial < 8; ++trial) {
    GenGammaParams p;
    p.alpha = 1.0 + 3.0 * rng.uniform();
    p.beta = 1.0 + 20.0 * rng.uniform();
    p.nu = 0.8 + 1.7 * rng.uniform();
    const double lo = std::log(p.beta) - 50.0 / (p.alpha * p.nu);
    const double hi = std::log(p.beta) + 6.0 / p.nu + 5.0;
    const double integral = testutil::simpson(
        [&](double s) {
          const double t = std::exp(s);
          return gengamma_pdf(p, t) * t;
        },
        lo, hi, 20000);
    REQUIRE_THAT(integral, Catch::Matchers::WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("gengamma mode closed form") {
  SECTION("gamma case (nu = 1): mode is (alpha - 1) beta") {
    GenGammaParams p;
    p.alpha = 2.0;
    p.beta = 10.0;
    p.nu = 1.0;
    REQUIRE_THAT(gengamma_mode(p), Catch::Matchers::WithinRel(10.0, 1e-12));
  }
  SECTION("matches a numeric argmax") {
    Rng rng(77);
    for (int trial = 0; trial < 6; ++trial) {
      GenGammaParams p;
      p.alpha = 1.2 + 2.0 * rng.uniform();
      p.beta = 2.0 + 15.0 * rng.uniform();
      p.nu = 0.8 + 1.5 * rng.uniform();
      if (!(p.alpha * p.nu > 1.0)) continue;
      const double mode = gengamma_mode(p);
      // fine grid around the analytic mode
      double best_t = 0.0, best_f = -1.0;
      for (int i = 0; i <= 400000; ++i) {
        const double t = mode * (0.5 + i * (1.5 - 0.5) / 400000.0);
        const double f = gengamma_pdf(p, t);
        if (f > best_f) { best_f = f; best_t = t; }
      }
      REQUIRE_THAT(best_t, Catch::Matchers::WithinRel(mode, 1e-5));
    }
  }
  SECTION("boundary mode") {
    GenGammaParams p;
    p.alpha = 1.0;
    p.beta = 3.0;
    p.nu = 1.0;
    REQUIRE_THROWS_AS(gengamma_mode(p), BoundaryModeError);
  }
}

TEST_CASE("gengamma fit recovers synthetic parameters within 5%") {
  const auto draws = gengamma_draws(2.0, 10.0, 1.5, 100000, 20240202);
  const FptSamples samples = to_samples(draws);
  const GenGammaParams fit = fit_gengamma(samples);
  REQUIRE_THAT(fit.alpha, Catch::Matchers::WithinRel(2.0, 0.05));
  REQUIRE_THAT(fit.beta, Catch::Matchers::WithinRel(10.0, 0.05));
  REQUIRE_THAT(fit.nu, Catch::Matchers::WithinRel(1.5, 0.05));
}

TEST_CASE("exponential samples come back as alpha = nu = 1") {
  // waiting times are integer days, so the continuous special case needs a
  // scale well above one day to keep rounding out of the likelihood
  const auto draws = gengamma_draws(1.0, 200.0, 1.0, 100000, 5150);
  const GenGammaParams fit = fit_gengamma(to_samples(draws));
  REQUIRE_THAT(fit.alpha, Catch::Matchers::WithinRel(1.0, 0.05));
  REQUIRE_THAT(fit.nu, Catch::Matchers::WithinRel(1.0, 0.05));
  // the scale itself rides the flat (alpha, nu, beta) likelihood ridge, but
  // the implied mean beta Gamma(alpha + 1/nu)/Gamma(alpha) is pinned tightly
  const double implied_mean =
      fit.beta * std::exp(std::lgamma(fit.alpha + 1.0 / fit.nu) - std::lgamma(fit.alpha));
  REQUIRE_THAT(implied_mean, Catch::Matchers::WithinRel(200.0, 0.02));
}

TEST_CASE("refit from the fitted point is idempotent") {
  const auto draws = gengamma_draws(2.0, 8.0, 1.2, 20000, 31007);
  const FptSamples samples = to_samples(draws);
  const GenGammaParams fit1 = fit_gengamma(samples);
  const GenGammaParams fit2 = fit_gengamma(samples, &fit1);
  REQUIRE_THAT(fit2.alpha, Catch::Matchers::WithinRel(fit1.alpha, 1e-6));
  REQUIRE_THAT(fit2.beta, Catch::Matchers::WithinRel(fit1.beta, 1e-6));
  REQUIRE_THAT(fit2.nu, Catch::Matchers::WithinRel(fit1.nu, 1e-6));
  REQUIRE(fit2.loglik >= fit1.loglik - 1e-9);
}

TEST_CASE("fit improves on the moment-matched start") {
  const auto draws = gengamma_draws(2.5, 12.0, 0.8, 50000, 8888);
  const FptSamples samples = to_samples(draws);
  const GenGammaParams fit = fit_gengamma(samples);
  // start = moment-matched gamma; evaluate its likelihood by fixing nu = 1
  double mean = 0.0, var = 0.0;
  for (int s : samples.samples) mean += s;
  mean /= static_cast<double>(samples.samples.size());
  for (int s : samples.samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.samples.size());
  GenGammaParams start;
  start.alpha = mean * mean / var;
  start.beta = var / mean;
  start.nu = 1.0;
  double start_ll = 0.0;
  for (int s : samples.samples) start_ll += gengamma_log_pdf(start, static_cast<double>(s));
  REQUIRE(fit.loglik >= start_ll - 1e-6);
}

TEST_CASE("gengamma fit input validation") {
  FptSamples few;
  few.rho = 0.1;
  few.samples.assign(99, 3);
  REQUIRE_THROWS_AS(fit_gengamma(few), SizeError);

  FptSamples atom;
  atom.rho = 0.1;
  atom.samples.assign(500, 7);
  REQUIRE_THROWS_AS(fit_gengamma(atom), DegenerateInputError);
}

TEST_CASE("asymmetry is zero for identical legs and antisymmetric under swap") {
  const auto draws = gengamma_draws(2.0, 15.0, 1.3, 30000, 909);
  const FptSamples samples = to_samples(draws);
  const AsymmetryMeasure same = asymmetry(samples, samples);
  REQUIRE(same.d_m == 0.0);

  const auto draws2 = gengamma_draws(2.2, 11.0, 1.1, 30000, 910);
  const FptSamples other = to_samples(draws2);
  const AsymmetryMeasure ab = asymmetry(samples, other);
  const AsymmetryMeasure ba = asymmetry(other, samples);
  REQUIRE_THAT(ab.d_m, Catch::Matchers::WithinAbs(-ba.d_m, 1e-12));
  REQUIRE(ab.mode_gain == ba.mode_loss);
}

TEST_CASE("linear fit on an exact line") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 9; ++i) {
    xs.push_back(i * 0.5 - 2.0);
    ys.push_back(2.0 * xs.back() + 1.0);
  }
  const LinearFit fit = linear_fit(xs, ys);
  REQUIRE_THAT(fit.slope, Catch::Matchers::WithinRel(2.0, 1e-12));
  REQUIRE_THAT(fit.intercept, Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(fit.r_squared, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("linear fit of constant ys has zero slope and zero r2") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys = {5.0, 5.0, 5.0, 5.0};
  const LinearFit fit = linear_fit(xs, ys);
  REQUIRE(fit.slope == 0.0);
  REQUIRE(fit.r_squared == 0.0);
}

TEST_CASE("linear fit recovers a noisy slope within its standard error") {
  Rng rng(31338);
  std::vector<double> xs, ys;
  const double slope = -1.7, intercept = 0.4, noise = 0.3;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    xs.push_back(i * 0.05);
    ys.push_back(intercept + slope * xs.back() + noise * rng.normal());
  }
  const LinearFit fit = linear_fit(xs, ys);
  double mx = 0.0;
  for (double x : xs) mx += x;
  mx /= n;
  double sxx = 0.0;
  for (double x : xs) sxx += (x - mx) * (x - mx);
  const double se = noise / std::sqrt(sxx);
  REQUIRE_THAT(fit.slope, Catch::Matchers::WithinAbs(slope, 4.0 * se));
}

TEST_CASE("linear fit degenerate inputs") {
  REQUIRE_THROWS_AS(linear_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DegenerateInputError);
  REQUIRE_THROWS_AS(linear_fit({1.0, 2.0}, {1.0, 2.0}), SizeError);
  REQUIRE_THROWS_AS(linear_fit({1.0, 2.0, 3.0}, {1.0, 2.0}), SizeError);
}

TEST_CASE("scaling ys scales the line, r2 unchanged") {
  Rng rng(2718);
  std::vector<double> xs, ys, ys_scaled;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(rng.uniform());
    ys.push_back(3.0 * xs.back() - 1.0 + 0.1 * rng.normal());
    ys_scaled.push_back(10.0 * ys.back());
  }
  const LinearFit f1 = linear_fit(xs, ys);
  const LinearFit f2 = linear_fit(xs, ys_scaled);
  REQUIRE_THAT(f2.slope, Catch::Matchers::WithinRel(10.0 * f1.slope, 1e-10));
  REQUIRE_THAT(f2.intercept, Catch::Matchers::WithinRel(10.0 * f1.intercept, 1e-10));
  REQUIRE_THAT(f2.r_squared, Catch::Matchers::WithinAbs(f1.r_squared, 1e-12));
}
