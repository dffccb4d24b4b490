#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"
#include "gainloss/series.hpp"

namespace gainloss {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_double(const std::string& s, double& out) {
  const char* p = s.c_str();
  char* end = nullptr;
  out = std::strtod(p, &end);
  return end != p && *end == '\0' && std::isfinite(out);
}

inline bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// days-from-civil / civil-from-days (proleptic Gregorian), used to
// synthesize dates for simulated series.
inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097L + static_cast<long>(doe) - 719468L;
}

inline void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468L;
  const long era = (z >= 0 ? z : z - 146096L) / 146097L;
  const unsigned doe = static_cast<unsigned>(z - era * 146097L);
  const unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
  const long yy = static_cast<long>(yoe) + era * 400L;
  const unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
  const unsigned mp = (5u * doy + 2u) / 153u;
  d = static_cast<int>(doy - (153u * mp + 2u) / 5u + 1u);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

inline std::string format_date(long days_since_epoch) {
  int y, m, d;
  civil_from_days(days_since_epoch, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

// Shortest round-trippable decimal representation.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  for (int prec = 15; prec <= 16; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (parse_double(probe, back) && back == v) return probe;
  }
  return buf;
}

}  // namespace detail

// Reads `date,close` CSV: ISO-8601 dates in strictly ascending order,
// positive decimal closes. Malformed rows abort with "path:line".
inline PriceSeries read_price_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  long line_no = 0;

  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(path + ":" + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (detail::trim(line) != "date,close") {
    throw fail("expected header 'date,close', got '" + line + "'");
  }

  PriceSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw fail("expected 'date,close' row");
    const std::string date = detail::trim(line.substr(0, comma));
    const std::string close_str = detail::trim(line.substr(comma + 1));
    if (!detail::is_iso_date(date)) throw fail("bad ISO-8601 date '" + date + "'");
    if (!series.labels.empty() && !(series.labels.back() < date)) {
      throw fail("dates not in ascending order ('" + series.labels.back() +
                 "' then '" + date + "')");
    }
    double close = 0.0;
    if (!detail::parse_double(close_str, close)) {
      throw fail("bad close value '" + close_str + "'");
    }
    if (!(close > 0.0)) throw fail("close must be > 0, got '" + close_str + "'");
    series.labels.push_back(date);
    series.values.push_back(close);
  }
  if (series.values.size() < 2) {
    throw ParseError(path + ": need at least 2 rows, got " +
                     std::to_string(series.values.size()));
  }
  return series;
}

// Emits the ingestion schema; dates are synthesized from t0 when the series
// carries no labels, so simulated and ingested series are interchangeable.
inline void write_price_csv(const std::string& path, const PriceSeries& series,
                            const std::string& t0 = "1970-01-01") {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "date,close\n";
  long day0 = 0;
  if (series.labels.empty()) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(t0.c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
      throw ConfigError("write_price_csv: bad t0 '" + t0 + "'");
    }
    day0 = detail::days_from_civil(y, m, d);
  }
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const std::string date = series.labels.empty()
                                 ? detail::format_date(day0 + static_cast<long>(i))
                                 : series.labels[i];
    out << date << ',' << detail::format_double(series.values[i]) << '\n';
  }
}

inline void write_columns_csv(const std::string& path, const std::string& header,
                              const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

// Generic two-column numeric reader for the toolkit's own emission formats
// (`s,count`, `s,probability`, `tau,value,...`). Extra columns are ignored.
inline std::vector<std::pair<double, double>> read_pairs_csv(const std::string& path,
                                                             const std::string& header_prefix) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(header_prefix, 0) != 0) {
    throw ParseError(path + ":1: expected header starting with '" + header_prefix + "'");
  }
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    double x = 0.0, y = 0.0;
    if (!detail::parse_double(detail::trim(a), x) || !detail::parse_double(detail::trim(b), y)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad numeric value");
    }
    out.emplace_back(x, y);
  }
  return out;
}

}  // namespace gainloss
