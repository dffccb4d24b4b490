#pragma once

// Shared test-only helpers: independent oracles and small utilities. These
// deliberately avoid the library's own implementation paths where they are
// used as cross-checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gainloss/rng.hpp"
#include "gainloss/series.hpp"

namespace testutil {

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gainloss_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Random-walk log-price series for property tests.
inline gainloss::LogPriceSeries random_walk(std::uint64_t seed, std::size_t n, double step_sigma,
                                            double drift = 0.0) {
  gainloss::Rng rng(seed);
  gainloss::LogPriceSeries x;
  x.values.reserve(n);
  double v = 0.0;
  x.values.push_back(v);
  for (std::size_t i = 1; i < n; ++i) {
    v += drift + step_sigma * rng.normal();
    x.values.push_back(v);
  }
  return x;
}

// Two-sample Kolmogorov-Smirnov distance between integer samples.
inline double ks_distance(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// KS critical value at level alpha for two samples (asymptotic).
inline double ks_critical(double alpha, std::size_t n1, std::size_t n2) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n1 + n2) / (static_cast<double>(n1) * n2));
}

// Adaptive-ish Simpson quadrature on [a, b] with fixed refinement.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return sum * h / 3.0;
}

// Minimal XML well-formedness check: balanced tags, proper quoting. Good
// enough to catch structurally broken SVG emission.
inline bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (text[i] != '<') {
      if (text[i] == '>') return false;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (j < n && text[j] == '?') {  // declaration
      while (j + 1 < n && !(text[j] == '?' && text[j + 1] == '>')) ++j;
      if (j + 1 >= n) return false;
      i = j + 2;
      continue;
    }
    bool closing = false;
    if (j < n && text[j] == '/') {
      closing = true;
      ++j;
    }
    std::size_t name_start = j;
    while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == ':' ||
                     text[j] == '-' || text[j] == '_')) {
      ++j;
    }
    if (j == name_start) return false;
    const std::string name = text.substr(name_start, j - name_start);
    bool in_quote = false;
    char quote_char = 0;
    bool self_closing = false;
    while (j < n) {
      const char c = text[j];
      if (in_quote) {
        if (c == quote_char) in_quote = false;
      } else if (c == '"' || c == '\'') {
        in_quote = true;
        quote_char = c;
      } else if (c == '>') {
        break;
      } else if (c == '/' && j + 1 < n && text[j + 1] == '>') {
        self_closing = true;
      } else if (c == '<') {
        return false;
      }
      ++j;
    }
    if (j >= n || in_quote) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
    i = j + 1;
  }
  return stack.empty();
}

inline int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace testutil
