#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/rng.hpp"

namespace gainloss {

// Daily closing prices S_t, strictly positive. Labels, when present, are
// opaque date strings of the same length; calendar gaps are ignored and t
// counts trading days.
struct PriceSeries {
  std::vector<double> values;
  std::vector<std::string> labels;  // empty or same size as values
};

// Log price path X_t = log S_t.
struct LogPriceSeries {
  std::vector<double> values;
};

// Daily increments dX_t = X_t - X_{t-1}, plus the anchor X_0 needed to
// rebuild the path.
struct ReturnSeries {
  std::vector<double> values;
  double origin = 0.0;
};

struct SeriesStats {
  double mean = 0.0;
  double std = 0.0;       // sample standard deviation, n-1 divisor
  double skewness = 0.0;  // standardized third central moment; 0 if std == 0
};

inline LogPriceSeries to_log(const PriceSeries& series) {
  LogPriceSeries out;
  out.values.reserve(series.values.size());
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double s = series.values[i];
    if (!(s > 0.0)) {
      throw DomainError("to_log: non-positive price " + std::to_string(s) +
                        " at index " + std::to_string(i));
    }
    out.values.push_back(std::log(s));
  }
  return out;
}

inline ReturnSeries returns(const LogPriceSeries& series) {
  if (series.values.size() < 2) {
    throw SizeError("returns: need at least 2 log prices, got " +
                    std::to_string(series.values.size()));
  }
  ReturnSeries out;
  out.origin = series.values.front();
  out.values.reserve(series.values.size() - 1);
  for (std::size_t t = 1; t < series.values.size(); ++t) {
    out.values.push_back(series.values[t] - series.values[t - 1]);
  }
  return out;
}

inline LogPriceSeries rebuild(const ReturnSeries& rets) {
  LogPriceSeries out;
  out.values.reserve(rets.values.size() + 1);
  double x = rets.origin;
  out.values.push_back(x);
  for (double r : rets.values) {
    x += r;
    out.values.push_back(x);
  }
  return out;
}

// Uniformly random permutation of the return values (Fisher-Yates), same
// origin. Deterministic per seed.
inline ReturnSeries permute_returns(const ReturnSeries& rets, std::uint64_t seed) {
  ReturnSeries out = rets;
  Rng rng(seed);
  for (std::size_t i = out.values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(out.values[i - 1], out.values[j]);
  }
  return out;
}

inline SeriesStats stats(const ReturnSeries& rets) {
  const std::size_t n = rets.values.size();
  if (n < 2) {
    throw SizeError("stats: need at least 2 returns, got " + std::to_string(n));
  }
  double sum = 0.0;
  for (double r : rets.values) sum += r;
  const double mean = sum / static_cast<double>(n);

  double m2 = 0.0;
  double m3 = 0.0;
  for (double r : rets.values) {
    const double d = r - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);

  SeriesStats s;
  s.mean = mean;
  s.std = std::sqrt(m2 * static_cast<double>(n) / static_cast<double>(n - 1));
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return s;
}

// FNV-1a over the raw bytes of the values; used to tag derived artifacts
// with their source series.
inline std::uint64_t series_hash(const std::vector<double>& values) {
  return detail::fnv1a64(values.data(), values.size() * sizeof(double));
}

}  // namespace gainloss
