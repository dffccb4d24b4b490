#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/series.hpp"

namespace gainloss {

enum class LeverageKind { correlation, homogeneous_cov, bouchaud };

inline const char* to_string(LeverageKind k) {
  switch (k) {
    case LeverageKind::correlation: return "correlation";
    case LeverageKind::homogeneous_cov: return "homogeneous-cov";
    case LeverageKind::bouchaud: return "bouchaud";
  }
  return "?";
}

// Lagged return/squared-return dependence under one of three normalizations:
//   correlation:      Corr[dX_t, dX_{t+tau}^2]
//   homogeneous-cov:  Cov[dX_t, dX_{t+tau}^2] / Var[dX_t]^{3/2}
//   bouchaud:         Cov[dX_t, dX_{t+tau}^2] / Var[dX_t]^2
// The first two are invariant under rescaling of the returns; the bouchaud
// form scales as 1/c and is provided for comparison only.
struct LeverageCurve {
  std::vector<int> lags;        // strictly increasing, may include negatives
  std::vector<double> values;
  std::vector<std::int64_t> n_pairs;
  LeverageKind kind = LeverageKind::correlation;
};

namespace detail {

// Shared estimator core. Returns are demeaned once; both legs use
// full-sample moments (not per-lag demeaning of a common window), so the
// homogeneous form collapses exactly to the sample skewness at tau = 0.
inline LeverageCurve leverage_curve(const ReturnSeries& rets, int first_lag, int last_lag,
                                    LeverageKind kind, int min_pairs = 30) {
  if (first_lag > last_lag) {
    throw DomainError("leverage: first_lag must be <= last_lag");
  }
  const std::size_t n = rets.values.size();
  if (n < 2) throw SizeError("leverage: need at least 2 returns");

  double mean = 0.0;
  for (double r : rets.values) mean += r;
  mean /= static_cast<double>(n);

  std::vector<double> y(n);       // demeaned returns
  std::vector<double> y2(n);      // their squares
  double var = 0.0;               // biased second moment of y
  double mean_sq = 0.0;           // mean of y^2 == var
  for (std::size_t t = 0; t < n; ++t) {
    y[t] = rets.values[t] - mean;
    y2[t] = y[t] * y[t];
    var += y2[t];
  }
  var /= static_cast<double>(n);
  mean_sq = var;

  double var_sq = 0.0;            // biased variance of y^2
  for (std::size_t t = 0; t < n; ++t) {
    const double d = y2[t] - mean_sq;
    var_sq += d * d;
  }
  var_sq /= static_cast<double>(n);

  if (!(var > 0.0)) throw DegenerateInputError("leverage: zero variance in returns");
  if (kind == LeverageKind::correlation && !(var_sq > 0.0)) {
    throw DegenerateInputError("leverage: zero variance in squared returns");
  }

  double norm = 0.0;
  switch (kind) {
    case LeverageKind::correlation: norm = std::sqrt(var) * std::sqrt(var_sq); break;
    case LeverageKind::homogeneous_cov: norm = std::pow(var, 1.5); break;
    case LeverageKind::bouchaud: norm = var * var; break;
  }

  LeverageCurve curve;
  curve.kind = kind;
  for (int lag = first_lag; lag <= last_lag; ++lag) {
    // pairs (y_t, y2_{t+lag}) with both indices in range
    const std::int64_t lo = lag < 0 ? -static_cast<std::int64_t>(lag) : 0;
    const std::int64_t hi = lag > 0 ? static_cast<std::int64_t>(n) - lag : static_cast<std::int64_t>(n);
    const std::int64_t pairs = hi - lo;
    if (pairs < min_pairs) {
      throw SizeError("leverage: only " + std::to_string(pairs > 0 ? pairs : 0) +
                      " overlapping pairs at lag " + std::to_string(lag) + ", need >= " +
                      std::to_string(min_pairs));
    }
    double cov = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) {
      cov += y[static_cast<std::size_t>(t)] *
             (y2[static_cast<std::size_t>(t + lag)] - mean_sq);
    }
    cov /= static_cast<double>(pairs);
    curve.lags.push_back(lag);
    curve.values.push_back(cov / norm);
    curve.n_pairs.push_back(pairs);
  }
  return curve;
}

}  // namespace detail

inline LeverageCurve leverage_corr(const ReturnSeries& rets, int first_lag, int last_lag) {
  return detail::leverage_curve(rets, first_lag, last_lag, LeverageKind::correlation);
}

inline LeverageCurve leverage_homogeneous(const ReturnSeries& rets, int first_lag, int last_lag) {
  return detail::leverage_curve(rets, first_lag, last_lag, LeverageKind::homogeneous_cov);
}

inline LeverageCurve leverage_bouchaud(const ReturnSeries& rets, int first_lag, int last_lag) {
  return detail::leverage_curve(rets, first_lag, last_lag, LeverageKind::bouchaud);
}

}  // namespace gainloss
