#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/series.hpp"

namespace gainloss {

enum class WaveletFamily { haar, daubechies4 };

inline const char* to_string(WaveletFamily f) {
  return f == WaveletFamily::haar ? "haar" : "daubechies4";
}

// Orthonormal decimated transform with periodic boundary handling. Detail
// level j carries fluctuations on horizons of roughly 2^{j-1}..2^j days.
struct WaveletSpec {
  WaveletFamily family = WaveletFamily::daubechies4;
  int levels = 1;  // decomposition depth J >= 1
};

struct WaveletPyramid {
  std::vector<std::vector<double>> details;  // details[j-1] = level j, length n/2^j
  std::vector<double> approx;                // approximation at level J
  WaveletFamily family = WaveletFamily::daubechies4;
  std::size_t length = 0;                    // transformed series length
};

// High-pass filtration R_k: the series rebuilt from detail levels 1..k-1
// only, i.e. with content on horizons of ~2^{k-1} days and longer removed.
struct Filtration {
  int k = 0;
  LogPriceSeries series;
  std::size_t truncated_prefix = 0;  // samples dropped from the front
};

namespace detail {

// Orthonormal scaling filter; the wavelet filter is its quadrature mirror
// g[m] = (-1)^m h[L-1-m].
inline std::vector<double> scaling_filter(WaveletFamily family) {
  if (family == WaveletFamily::haar) {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s};
  }
  const double r3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return {(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
}

inline std::vector<double> wavelet_filter(const std::vector<double>& h) {
  const std::size_t len = h.size();
  std::vector<double> g(len);
  for (std::size_t m = 0; m < len; ++m) {
    g[m] = (m % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - m];
  }
  return g;
}

inline void dwt_step(const std::vector<double>& in, const std::vector<double>& h,
                     const std::vector<double>& g, std::vector<double>& approx,
                     std::vector<double>& detail) {
  const std::size_t n = in.size();
  const std::size_t half = n / 2;
  const std::size_t len = h.size();
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
      const double v = in[(2 * k + m) % n];
      a += h[m] * v;
      d += g[m] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

inline void idwt_step(const std::vector<double>& approx, const std::vector<double>& detail,
                      const std::vector<double>& h, const std::vector<double>& g,
                      std::vector<double>& out) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  const std::size_t len = h.size();
  out.assign(n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    for (std::size_t m = 0; m < len; ++m) {
      out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
    }
  }
}

inline void check_spec_against_length(std::size_t n, const WaveletSpec& spec) {
  if (spec.levels < 1) throw SizeError("wavelet: levels must be >= 1");
  const std::size_t block = std::size_t{1} << spec.levels;
  if (n < block || n % block != 0) {
    throw SizeError("wavelet: series length " + std::to_string(n) +
                    " is not a positive multiple of 2^levels = " + std::to_string(block));
  }
}

}  // namespace detail

// Drops a prefix so the length becomes the largest multiple of 2^levels;
// keeps the most recent data. Returns the number of dropped samples.
inline std::size_t truncate_front_to_multiple(LogPriceSeries& x, int levels) {
  if (levels < 1) throw SizeError("wavelet: levels must be >= 1");
  const std::size_t block = std::size_t{1} << levels;
  const std::size_t keep = (x.values.size() / block) * block;
  if (keep == 0) {
    throw SizeError("wavelet: series of length " + std::to_string(x.values.size()) +
                    " is shorter than 2^levels = " + std::to_string(block));
  }
  const std::size_t drop = x.values.size() - keep;
  x.values.erase(x.values.begin(), x.values.begin() + static_cast<std::ptrdiff_t>(drop));
  return drop;
}

inline WaveletPyramid dwt(const LogPriceSeries& x, const WaveletSpec& spec) {
  detail::check_spec_against_length(x.values.size(), spec);
  const std::vector<double> h = detail::scaling_filter(spec.family);
  const std::vector<double> g = detail::wavelet_filter(h);

  WaveletPyramid pyr;
  pyr.family = spec.family;
  pyr.length = x.values.size();
  std::vector<double> current = x.values;
  for (int level = 1; level <= spec.levels; ++level) {
    std::vector<double> approx, det;
    detail::dwt_step(current, h, g, approx, det);
    pyr.details.push_back(std::move(det));
    current = std::move(approx);
  }
  pyr.approx = std::move(current);
  return pyr;
}

inline LogPriceSeries idwt(const WaveletPyramid& pyr, const WaveletSpec& spec) {
  if (pyr.details.size() != static_cast<std::size_t>(spec.levels)) {
    throw SizeError("idwt: pyramid depth " + std::to_string(pyr.details.size()) +
                    " does not match spec.levels " + std::to_string(spec.levels));
  }
  std::size_t expect = pyr.length >> spec.levels;
  if (pyr.approx.size() != expect) {
    throw SizeError("idwt: approximation length mismatch");
  }
  for (int level = spec.levels; level >= 1; --level) {
    if (pyr.details[static_cast<std::size_t>(level - 1)].size() !=
        pyr.length >> level) {
      throw SizeError("idwt: detail length mismatch at level " + std::to_string(level));
    }
  }
  if (pyr.family != spec.family) {
    throw SizeError("idwt: pyramid family does not match spec");
  }

  const std::vector<double> h = detail::scaling_filter(spec.family);
  const std::vector<double> g = detail::wavelet_filter(h);
  std::vector<double> current = pyr.approx;
  for (int level = spec.levels; level >= 1; --level) {
    std::vector<double> next;
    detail::idwt_step(current, pyr.details[static_cast<std::size_t>(level - 1)], h, g, next);
    current = std::move(next);
  }
  LogPriceSeries out;
  out.values = std::move(current);
  return out;
}

inline double pyramid_energy(const WaveletPyramid& pyr) {
  double e = 0.0;
  for (const auto& d : pyr.details) {
    for (double v : d) e += v * v;
  }
  for (double v : pyr.approx) e += v * v;
  return e;
}

// Builds R_k from x: truncates the front to a multiple of 2^levels, runs the
// transform, zeroes detail levels >= k and the approximation, reconstructs.
// The removed approximation carries the mean, so the output is zero-mean.
inline Filtration high_pass_filtration(const LogPriceSeries& x, int k, const WaveletSpec& spec) {
  if (k < 2) throw SizeError("high_pass_filtration: k must be >= 2");
  if (k > spec.levels) {
    throw SizeError("high_pass_filtration: k = " + std::to_string(k) +
                    " exceeds spec.levels = " + std::to_string(spec.levels));
  }
  Filtration out;
  out.k = k;
  LogPriceSeries trimmed = x;
  out.truncated_prefix = truncate_front_to_multiple(trimmed, spec.levels);

  WaveletPyramid pyr = dwt(trimmed, spec);
  for (int level = k; level <= spec.levels; ++level) {
    auto& d = pyr.details[static_cast<std::size_t>(level - 1)];
    std::fill(d.begin(), d.end(), 0.0);
  }
  std::fill(pyr.approx.begin(), pyr.approx.end(), 0.0);
  out.series = idwt(pyr, spec);
  return out;
}

}  // namespace gainloss
