#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/rng.hpp"
#include "gainloss/series.hpp"

namespace gainloss {

// EGARCH(1,1):
//   dX_t      = mu - sigma_t^2 / 2 + eps_t,             eps_t = sigma_t z_t
//   log s_t^2 = a0 + a1a z_{t-1} + a1b (|z_{t-1}| - sqrt(2/pi)) + b1 log s_{t-1}^2
// a1a < 0 makes the conditional variance respond more strongly to negative
// innovations (the leverage coefficient); a1b is the magnitude response.
struct EgarchParams {
  double mu = 0.0;
  double a0 = 0.0;
  double a1a = 0.0;
  double a1b = 0.0;
  double b1 = 0.0;
};

// Retarded volatility price model:
//   dS_t = S^R_t eps_t,  eps_t ~ N(0, sigma^2)
//   S^R_t = S_{t-1} - c * sum_{tau>=1} alpha^tau dS_{t-1-tau}
// c = 1 recovers the original model.
struct RetardedParams {
  double sigma = 0.0;
  double alpha = 0.0;
  double c = 1.0;
  double s0 = 1.0;
};

struct SimulationSpec {
  long length = 0;    // number of recorded returns
  long burn_in = 0;   // discarded initial steps
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_spec(const SimulationSpec& spec) {
  if (spec.length < 1) {
    throw SizeError("simulation: length must be >= 1, got " + std::to_string(spec.length));
  }
  if (spec.burn_in < 0) {
    throw SizeError("simulation: burn_in must be >= 0, got " + std::to_string(spec.burn_in));
  }
}

inline void check_stationary(const EgarchParams& p) {
  if (!(std::abs(p.b1) < 1.0)) {
    throw StationarityError("egarch: |b1| must be < 1 for a stationary log-variance, got b1 = " +
                            std::to_string(p.b1));
  }
  for (double v : {p.mu, p.a0, p.a1a, p.a1b, p.b1}) {
    if (!std::isfinite(v)) throw DomainError("egarch: non-finite parameter");
  }
}

inline void check_retarded(const RetardedParams& p) {
  if (!(p.sigma > 0.0)) {
    throw DomainError("retarded: sigma must be > 0, got " + std::to_string(p.sigma));
  }
  if (!(p.alpha >= 0.0 && p.alpha < 1.0)) {
    throw DomainError("retarded: alpha must be in [0, 1), got " + std::to_string(p.alpha));
  }
  if (!(p.s0 > 0.0)) {
    throw DomainError("retarded: s0 must be > 0, got " + std::to_string(p.s0));
  }
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// E[exp(p z + q |z|)] for z ~ N(0,1).
inline double exp_signed_abs_moment(double p, double q) {
  return std::exp(0.5 * (p + q) * (p + q)) * normal_cdf(p + q) +
         std::exp(0.5 * (p - q) * (p - q)) * normal_cdf(q - p);
}

constexpr double sqrt_2_over_pi = 0.7978845608028653558798921198687637369;

}  // namespace detail

// Closed-form unconditional variance of the EGARCH(1,1) return innovation:
//   sigma_bar^2 = exp(a0 / (1 - b1)) * prod_{i>=0} E[exp(b1^i g(z))]
// with g(z) = a1a z + a1b (|z| - sqrt(2/pi)). The product is truncated once
// the next factor is within tol of 1.
inline double egarch_unconditional_variance(const EgarchParams& p, double tol = 1e-12) {
  detail::check_stationary(p);
  if (!(tol > 0.0)) throw DomainError("egarch_unconditional_variance: tol must be > 0");
  double result = std::exp(p.a0 / (1.0 - p.b1));
  double weight = 1.0;  // b1^i
  for (int i = 0; i < 20000; ++i) {
    const double factor = std::exp(-weight * p.a1b * detail::sqrt_2_over_pi) *
                          detail::exp_signed_abs_moment(weight * p.a1a, weight * p.a1b);
    result *= factor;
    if (std::abs(factor - 1.0) < tol) break;
    weight *= p.b1;
  }
  return result;
}

// Full simulated state, kept separately so tests can check the variance
// recursion and the news-impact response directly.
struct EgarchPath {
  ReturnSeries returns;            // recorded returns, origin 0
  std::vector<double> sigma_sq;    // conditional variance per recorded step
  std::vector<double> innovations; // standardized z per recorded step
};

inline EgarchPath simulate_egarch_path(const EgarchParams& p, const SimulationSpec& spec) {
  detail::check_stationary(p);
  detail::check_spec(spec);
  Rng rng(spec.seed);

  EgarchPath path;
  path.returns.origin = 0.0;
  path.returns.values.reserve(static_cast<std::size_t>(spec.length));
  path.sigma_sq.reserve(static_cast<std::size_t>(spec.length));
  path.innovations.reserve(static_cast<std::size_t>(spec.length));

  double log_var = std::log(egarch_unconditional_variance(p));  // sigma_0^2 = sigma_bar^2
  double z_prev = 0.0;
  const long total = spec.burn_in + spec.length;
  for (long t = 0; t < total; ++t) {
    if (t > 0) {
      log_var = p.a0 + p.a1a * z_prev +
                p.a1b * (std::abs(z_prev) - detail::sqrt_2_over_pi) + p.b1 * log_var;
    }
    const double var = std::exp(log_var);
    const double z = rng.normal();
    const double ret = p.mu - 0.5 * var + std::sqrt(var) * z;
    z_prev = z;
    if (t >= spec.burn_in) {
      path.returns.values.push_back(ret);
      path.sigma_sq.push_back(var);
      path.innovations.push_back(z);
    }
  }
  return path;
}

inline ReturnSeries simulate_egarch(const EgarchParams& p, const SimulationSpec& spec) {
  return simulate_egarch_path(p, spec).returns;
}

// Default burn-in lengths: ten memory time constants.
inline long default_burn_in(const EgarchParams&) { return 1000; }
inline long default_burn_in(const RetardedParams& p) {
  return static_cast<long>(std::ceil(10.0 / (1.0 - p.alpha) - 1e-9));
}

// Evolves the exact retarded recursion via the exponential memory
//   W_{t+1} = alpha * (dS_{t-1} + W_t),  S^R_t = S_{t-1} - c W_t,
// starting from a flat pre-history (W = 0). The multiplicative form drifts
// downward in log scale (-sigma^2/2 per day), so long paths legitimately
// decay to tiny positive prices; the guard only aborts on an actual loss of
// positivity, which silently clamping would turn into biased leverage
// estimates.
inline PriceSeries simulate_retarded(const RetardedParams& p, const SimulationSpec& spec) {
  detail::check_retarded(p);
  detail::check_spec(spec);
  Rng rng(spec.seed);

  PriceSeries out;
  out.values.reserve(static_cast<std::size_t>(spec.length) + 1);

  double price = p.s0;
  double memory = 0.0;      // W_t
  double delta_prev = 0.0;  // dS_{t-1}
  const long total = spec.burn_in + spec.length;
  for (long t = 1; t <= total; ++t) {
    const double retarded_price = price - p.c * memory;
    const double delta = retarded_price * (p.sigma * rng.normal());
    memory = p.alpha * (delta_prev + memory);
    delta_prev = delta;
    price += delta;
    if (!(price > 0.0) || !std::isfinite(price)) {
      throw SimulationError("retarded: price lost positivity at step " + std::to_string(t) +
                                "; re-seed or lower sigma/c",
                            t);
    }
    if (t == spec.burn_in) out.values.push_back(price);  // path anchor after burn-in
    if (t > spec.burn_in) out.values.push_back(price);
  }
  if (spec.burn_in == 0) out.values.insert(out.values.begin(), p.s0);
  return out;
}

inline ReturnSeries simulate_iid_gaussian(double mu, double sigma, const SimulationSpec& spec) {
  if (!(sigma > 0.0)) {
    throw DomainError("iid_gaussian: sigma must be > 0, got " + std::to_string(sigma));
  }
  detail::check_spec(spec);
  Rng rng(spec.seed);
  ReturnSeries out;
  out.origin = 0.0;
  out.values.reserve(static_cast<std::size_t>(spec.length));
  const long total = spec.burn_in + spec.length;
  for (long t = 0; t < total; ++t) {
    const double r = mu + sigma * rng.normal();
    if (t >= spec.burn_in) out.values.push_back(r);
  }
  return out;
}

}  // namespace gainloss
