#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/series.hpp"

namespace gainloss {

// Waiting times until the log price first moves by rho from each start day.
// One observation per start index t that crosses before the series ends;
// starts are overlapping, so samples are serially dependent (this affects
// error bars, not point estimates).
struct FptSamples {
  double rho = 0.0;
  std::vector<int> samples;         // in start order, each >= 1
  std::int64_t starts_scanned = 0;  // start indices attempted
  std::int64_t starts_hit = 0;      // == samples.size()
};

struct FptDistribution {
  std::vector<int> support;            // sorted unique waiting times
  std::vector<double> probabilities;   // relative frequencies, sum to 1
  std::vector<double> bin_edges;       // optional logarithmic bins, display only
};

namespace detail {

inline void check_rho(double rho) {
  if (rho == 0.0 || !std::isfinite(rho)) {
    throw DomainError("fpt: rho must be a finite nonzero level");
  }
}

inline void check_series_for_fpt(const LogPriceSeries& x) {
  if (x.values.size() < 2) {
    throw SizeError("fpt: need at least 2 log prices, got " +
                    std::to_string(x.values.size()));
  }
}

// Idempotent range queries over an immutable array, O(n log n) build and
// O(1) per query.
template <typename Op>
class SparseTable {
 public:
  SparseTable(const std::vector<double>& values, Op op) : op_(op) {
    const int n = static_cast<int>(values.size());
    const int log = std::bit_width(static_cast<std::uint32_t>(n));
    rows_.resize(static_cast<std::size_t>(log));
    rows_[0] = values;
    for (int level = 1; level < log; ++level) {
      const int span = 1 << level;
      rows_[level].resize(static_cast<std::size_t>(n - span + 1));
      for (int j = 0; j + span <= n; ++j) {
        rows_[level][j] = op_(rows_[level - 1][j], rows_[level - 1][j + span / 2]);
      }
    }
  }

  // inclusive [first, last], first <= last
  double query(int first, int last) const {
    const int level = std::bit_width(static_cast<std::uint32_t>(last - first + 1)) - 1;
    return op_(rows_[level][first], rows_[level][last - (1 << level) + 1]);
  }

 private:
  Op op_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace detail

// Reference sampler: for each start t scans forward for the first s with
// X_{t+s} - X_t >= rho (rho > 0) or <= rho (rho < 0); starts whose barrier
// is never reached before the series end are dropped.
inline FptSamples fpt_samples_naive(const LogPriceSeries& x, double rho) {
  detail::check_rho(rho);
  detail::check_series_for_fpt(x);
  const std::vector<double>& v = x.values;
  const std::size_t n = v.size();

  FptSamples out;
  out.rho = rho;
  out.starts_scanned = static_cast<std::int64_t>(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double target = v[t] + rho;
    for (std::size_t j = t + 1; j < n; ++j) {
      const bool crossed = rho > 0.0 ? v[j] >= target : v[j] <= target;
      if (crossed) {
        out.samples.push_back(static_cast<int>(j - t));
        break;
      }
    }
  }
  out.starts_hit = static_cast<std::int64_t>(out.samples.size());
  return out;
}

// Same contract as fpt_samples_naive. A sparse table answers range-max in
// O(1); the first crossing index is then found by binary search on the
// monotone prefix maximum, O(log n) per start. The down-crossing case is
// reduced to the up-crossing one by reflection (first j with X_j <= X_t + rho
// equals first j with -X_j >= -X_t - rho).
inline FptSamples fpt_samples_fast(const LogPriceSeries& x, double rho) {
  detail::check_rho(rho);
  detail::check_series_for_fpt(x);

  std::vector<double> v = x.values;
  double level = rho;
  if (rho < 0.0) {
    for (double& val : v) val = -val;
    level = -rho;
  }
  const int n = static_cast<int>(v.size());
  const auto max_op = [](double a, double b) { return a > b ? a : b; };
  const detail::SparseTable<decltype(max_op)> table(v, max_op);

  FptSamples out;
  out.rho = rho;
  out.starts_scanned = n - 1;
  for (int t = 0; t + 1 < n; ++t) {
    const double target = v[t] + level;
    if (table.query(t + 1, n - 1) < target) continue;
    int lo = t + 1;
    int hi = n - 1;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (table.query(t + 1, mid) >= target) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    out.samples.push_back(lo - t);
  }
  out.starts_hit = static_cast<std::int64_t>(out.samples.size());
  return out;
}

// Logarithmically spaced bin edges, `per_decade` bins per decade, covering
// [1, max_s]. Edges are snapped outward to integer boundaries so every bin
// holds at least one whole waiting time; below ~10 days the bins degenerate
// to single integers and the binned density equals the raw pmf. Display and
// histogram-mode use only; probabilities are always computed unbinned.
inline std::vector<double> log_bin_edges(int max_s, int per_decade = 10) {
  if (max_s < 1) throw DomainError("log_bin_edges: max_s must be >= 1");
  if (per_decade < 1) throw DomainError("log_bin_edges: per_decade must be >= 1");
  std::vector<double> edges;
  edges.push_back(1.0);
  for (int i = 1;; ++i) {
    const double e = std::ceil(std::pow(10.0, static_cast<double>(i) / per_decade));
    if (e > edges.back()) edges.push_back(e);
    if (e > static_cast<double>(max_s)) break;
  }
  return edges;
}

inline FptDistribution empirical_distribution(const FptSamples& samples,
                                              bool with_display_bins = false) {
  if (samples.samples.empty()) {
    throw EmptyInputError("empirical_distribution: no waiting-time samples");
  }
  std::vector<int> sorted = samples.samples;
  std::sort(sorted.begin(), sorted.end());

  FptDistribution dist;
  const double total = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    dist.support.push_back(sorted[i]);
    dist.probabilities.push_back(static_cast<double>(j - i) / total);
    i = j;
  }
  if (with_display_bins) dist.bin_edges = log_bin_edges(sorted.back());
  return dist;
}

}  // namespace gainloss
