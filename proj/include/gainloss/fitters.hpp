#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/fpt.hpp"
#include "gainloss/leverage.hpp"

namespace gainloss {

// Least-squares fit of -A exp(-tau/T) to a leverage curve. A > 0 is the
// standard leverage direction (negative curve).
struct ExpDecayFit {
  double a = 0.0;        // amplitude A
  double t_scale = 0.0;  // decay time T, days
  double residual = 0.0; // root-mean-square residual
};

// Stacy generalized gamma: f(t) = nu t^{alpha nu - 1} exp(-(t/beta)^nu)
//                                 / (beta^{alpha nu} Gamma(alpha)).
struct GenGammaParams {
  double alpha = 1.0;  // shape
  double beta = 1.0;   // scale, days
  double nu = 1.0;     // power
  double loglik = 0.0; // attained log-likelihood (0 when analytically set)
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Gain/loss asymmetry: d_m > 0 means the loss barrier is typically reached
// sooner than the equally sized gain barrier.
struct AsymmetryMeasure {
  double d_m = 0.0;  // mode(gain fit) - mode(loss fit), days
  double mode_gain = 0.0;
  double mode_loss = 0.0;
};

namespace detail {

// Golden-section minimization on [lo, hi]; f must be unimodal there.
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-12, int max_iter = 300) {
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol * (std::abs(a) + std::abs(b) + 1e-300); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Nelder-Mead simplex minimization; deterministic for a fixed start.
// Returns the best point visited (the start vertex is never lost). Stops on
// relative f-spread, or on simplex diameter when diam_tol > 0.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> start, double step = 0.25,
                                       int max_iter = 500, double rel_tol = 1e-8,
                                       double diam_tol = 0.0) {
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> pts(dim + 1, start);
  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(pts[i]);

  const auto order = [&] {
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> p2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) { p2[i] = pts[idx[i]]; f2[i] = fv[idx[i]]; }
    pts = std::move(p2);
    fv = std::move(f2);
  };
  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) d = std::max(d, std::abs(pts[i][j] - pts[0][j]));
    }
    return d;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (diam_tol > 0.0 && diameter() < diam_tol) break;
    if (rel_tol > 0.0 &&
        std::abs(fv[dim] - fv[0]) <= rel_tol * (std::abs(fv[0]) + std::abs(fv[dim]) + 1e-300)) {
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    const auto affine = [&](double coef) {
      std::vector<double> p(dim);
      for (std::size_t j = 0; j < dim; ++j) p[j] = centroid[j] + coef * (pts[dim][j] - centroid[j]);
      return p;
    };

    const std::vector<double> reflected = affine(-1.0);
    const double fr = f(reflected);
    if (fr < fv[0]) {
      const std::vector<double> expanded = affine(-2.0);
      const double fe = f(expanded);
      if (fe < fr) { pts[dim] = expanded; fv[dim] = fe; }
      else { pts[dim] = reflected; fv[dim] = fr; }
    } else if (fr < fv[dim - 1]) {
      pts[dim] = reflected; fv[dim] = fr;
    } else {
      const bool outside = fr < fv[dim];
      const std::vector<double> contracted = affine(outside ? -0.5 : 0.5);
      const double fc = f(contracted);
      if (fc < (outside ? fr : fv[dim])) {
        pts[dim] = contracted; fv[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {  // shrink toward best
          for (std::size_t j = 0; j < dim; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  return pts[0];
}

inline void check_gengamma_params(const GenGammaParams& p, const char* where) {
  if (!(p.alpha > 0.0 && p.beta > 0.0 && p.nu > 0.0)) {
    throw DomainError(std::string(where) + ": alpha, beta, nu must all be > 0");
  }
}

}  // namespace detail

inline double gengamma_log_pdf(const GenGammaParams& p, double t) {
  detail::check_gengamma_params(p, "gengamma_log_pdf");
  if (!(t > 0.0)) throw DomainError("gengamma_log_pdf: t must be > 0");
  const double an = p.alpha * p.nu;
  return std::log(p.nu) + (an - 1.0) * std::log(t) - std::pow(t / p.beta, p.nu) -
         an * std::log(p.beta) - std::lgamma(p.alpha);
}

inline double gengamma_pdf(const GenGammaParams& p, double t) {
  return std::exp(gengamma_log_pdf(p, t));
}

// Interior mode t* = beta (alpha - 1/nu)^{1/nu}; exists iff alpha nu > 1.
inline double gengamma_mode(const GenGammaParams& p) {
  detail::check_gengamma_params(p, "gengamma_mode");
  if (!(p.alpha * p.nu > 1.0)) {
    throw BoundaryModeError("gengamma_mode: alpha*nu <= 1, density peaks at 0+");
  }
  return p.beta * std::pow(p.alpha - 1.0 / p.nu, 1.0 / p.nu);
}

namespace detail {

struct GengammaData {
  std::vector<double> value;     // distinct waiting times
  std::vector<double> log_value;
  std::vector<double> count;
  double n = 0.0;
  double sum_log = 0.0;  // sum of counts * log t
};

inline GengammaData aggregate_samples(const FptSamples& samples) {
  std::map<int, std::int64_t> counts;
  for (int s : samples.samples) {
    if (s < 1) throw DomainError("fit_gengamma: waiting times must be >= 1");
    ++counts[s];
  }
  GengammaData d;
  for (const auto& [v, c] : counts) {
    d.value.push_back(static_cast<double>(v));
    d.log_value.push_back(std::log(static_cast<double>(v)));
    d.count.push_back(static_cast<double>(c));
  }
  d.n = static_cast<double>(samples.samples.size());
  for (std::size_t i = 0; i < d.value.size(); ++i) d.sum_log += d.count[i] * d.log_value[i];
  return d;
}

inline double gengamma_loglik(const GengammaData& d, double alpha, double beta, double nu) {
  const double an = alpha * nu;
  double sum_pow = 0.0;  // sum of counts * t^nu
  for (std::size_t i = 0; i < d.value.size(); ++i) {
    sum_pow += d.count[i] * std::exp(nu * d.log_value[i]);
  }
  return d.n * std::log(nu) + (an - 1.0) * d.sum_log - std::pow(beta, -nu) * sum_pow -
         d.n * (an * std::log(beta) + std::lgamma(alpha));
}

}  // namespace detail

// Maximum-likelihood generalized-gamma fit over (alpha, beta, nu), optimized
// in log coordinates with a derivative-free simplex. The default start is a
// moment-matched ordinary gamma (nu = 1); passing `start` re-optimizes from
// a previous fit. Deterministic for fixed input.
//
// Heavy-tailed waiting-time samples drive the family toward its lognormal
// limit (alpha up, beta and nu down along a flat likelihood ridge), so the
// log-parameters are constrained to [-25, 25]; the fitted mode is stable
// there even when the ridge is.
inline GenGammaParams fit_gengamma(const FptSamples& samples,
                                   const GenGammaParams* start = nullptr) {
  if (samples.samples.size() < 100) {
    throw SizeError("fit_gengamma: need >= 100 samples, got " +
                    std::to_string(samples.samples.size()));
  }
  const detail::GengammaData data = detail::aggregate_samples(samples);
  if (data.value.size() < 2) {
    throw DegenerateInputError("fit_gengamma: all waiting times identical");
  }

  std::vector<double> theta0(3);
  if (start != nullptr) {
    detail::check_gengamma_params(*start, "fit_gengamma");
    theta0 = {std::log(start->alpha), std::log(start->beta), std::log(start->nu)};
  } else {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.value.size(); ++i) mean += data.count[i] * data.value[i];
    mean /= data.n;
    double var = 0.0;
    for (std::size_t i = 0; i < data.value.size(); ++i) {
      const double dlt = data.value[i] - mean;
      var += data.count[i] * dlt * dlt;
    }
    var /= data.n;
    const double alpha0 = std::max(mean * mean / var, 1e-3);
    const double beta0 = std::max(var / mean, 1e-6);
    theta0 = {std::log(alpha0), std::log(beta0), 0.0};
  }

  const auto objective = [&](const std::vector<double>& theta) {
    // keep the optimizer inside a sane box in log space
    for (double v : theta) {
      if (!std::isfinite(v) || std::abs(v) > 25.0) return 1e300;
    }
    const double ll = detail::gengamma_loglik(data, std::exp(theta[0]), std::exp(theta[1]),
                                              std::exp(theta[2]));
    return std::isfinite(ll) ? -ll : 1e300;
  };

  const double f0 = objective(theta0);
  if (!(f0 < 1e299)) throw FitError("fit_gengamma: log-likelihood not finite at the start point");

  // Restarted simplex: the (alpha, nu) trade-off forms a shallow ridge, and
  // re-running with a shrinking initial simplex pins the optimum down to a
  // fixed simplex diameter, so refitting from the result is a fixed point.
  // A fit seeded from previous parameters only polishes locally.
  std::vector<double> best = theta0;
  if (start == nullptr) {
    best = detail::nelder_mead(objective, best, 0.25, 500, 1e-8);
    best = detail::nelder_mead(objective, best, 0.05, 500, 1e-10);
  } else {
    best = detail::nelder_mead(objective, best, 0.02, 500, 1e-10);
  }
  best = detail::nelder_mead(objective, best, 0.005, 2000, 0.0, 1e-10);

  double f_best = objective(best);
  if (!(f_best <= f0)) {
    throw FitError("fit_gengamma: optimizer failed to improve on the start point (start " +
                   std::to_string(-f0) + ", best " + std::to_string(-f_best) + ")");
  }
  if (start != nullptr && f_best == f0) {
    best = theta0;  // no strict improvement: keep the incumbent exactly
  }
  GenGammaParams p;
  p.alpha = std::exp(best[0]);
  p.beta = std::exp(best[1]);
  p.nu = std::exp(best[2]);
  p.loglik = -f_best;
  return p;
}

// Exponential-decay fit: a coarse scan over log-spaced decay times brackets
// the best basin, then a 1-D golden-section search on T refines it, with A
// solved in closed form for each candidate T. Decay times are searched in
// [0.5, 1000] days; anything faster than half a day degenerates into
// fitting a single lag with an arbitrarily large amplitude.
inline ExpDecayFit fit_expdecay(const LeverageCurve& curve, int fit_first = 1, int fit_last = 50) {
  std::vector<double> taus;
  std::vector<double> vals;
  for (std::size_t i = 0; i < curve.lags.size(); ++i) {
    if (curve.lags[i] >= fit_first && curve.lags[i] <= fit_last) {
      if (!std::isfinite(curve.values[i])) {
        throw FitError("fit_expdecay: non-finite curve value at lag " +
                       std::to_string(curve.lags[i]));
      }
      taus.push_back(static_cast<double>(curve.lags[i]));
      vals.push_back(curve.values[i]);
    }
  }
  if (taus.size() < 4) {
    throw SizeError("fit_expdecay: need >= 4 curve points in the fit range, got " +
                    std::to_string(taus.size()));
  }

  const auto amplitude_for = [&](double t_scale) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double e = std::exp(-taus[i] / t_scale);
      num += vals[i] * e;
      den += e * e;
    }
    return den > 0.0 ? -num / den : 0.0;
  };
  const auto sse_for = [&](double log_t) {
    const double t_scale = std::exp(log_t);
    const double a = amplitude_for(t_scale);
    double sse = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double r = vals[i] + a * std::exp(-taus[i] / t_scale);
      sse += r * r;
    }
    return sse;
  };

  const double lo = std::log(0.5);
  const double hi = std::log(1000.0);
  const int n_grid = 80;
  int best_i = 0;
  double best_sse = sse_for(lo);
  for (int i = 1; i <= n_grid; ++i) {
    const double sse = sse_for(lo + (hi - lo) * i / n_grid);
    if (sse < best_sse) {
      best_sse = sse;
      best_i = i;
    }
  }
  const double bracket_lo = lo + (hi - lo) * std::max(0, best_i - 1) / n_grid;
  const double bracket_hi = lo + (hi - lo) * std::min(n_grid, best_i + 1) / n_grid;
  const double log_t = detail::golden_section_min(sse_for, bracket_lo, bracket_hi);
  ExpDecayFit fit;
  fit.t_scale = std::exp(log_t);
  fit.a = amplitude_for(fit.t_scale);
  fit.residual = std::sqrt(sse_for(log_t) / static_cast<double>(taus.size()));
  if (!std::isfinite(fit.a) || !std::isfinite(fit.t_scale)) {
    throw FitError("fit_expdecay: fit did not converge to finite parameters");
  }
  return fit;
}

inline AsymmetryMeasure asymmetry_from_fits(const GenGammaParams& fit_gain,
                                            const GenGammaParams& fit_loss) {
  AsymmetryMeasure m;
  m.mode_gain = gengamma_mode(fit_gain);
  m.mode_loss = gengamma_mode(fit_loss);
  m.d_m = m.mode_gain - m.mode_loss;
  return m;
}

inline AsymmetryMeasure asymmetry(const FptSamples& gain, const FptSamples& loss) {
  return asymmetry_from_fits(fit_gengamma(gain), fit_gengamma(loss));
}

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw SizeError("linear_fit: size mismatch");
  const std::size_t n = xs.size();
  if (n < 3) throw SizeError("linear_fit: need >= 3 points, got " + std::to_string(n));

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateInputError("linear_fit: xs are all equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      sse += r * r;
    }
    fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 0.0;
  }
  return fit;
}

}  // namespace gainloss
