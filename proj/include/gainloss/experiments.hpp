#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gainloss/config.hpp"
#include "gainloss/csv.hpp"
#include "gainloss/errors.hpp"
#include "gainloss/fitters.hpp"
#include "gainloss/fpt.hpp"
#include "gainloss/leverage.hpp"
#include "gainloss/manifest.hpp"
#include "gainloss/models.hpp"
#include "gainloss/rng.hpp"
#include "gainloss/series.hpp"
#include "gainloss/svg.hpp"
#include "gainloss/wavelet.hpp"

namespace gainloss {

// How the barrier level is set: either an absolute log-return level or a
// multiple of the measured daily standard deviation of the analyzed series.
struct RhoSpec {
  double multiple = 5.0;
  std::optional<double> absolute;
};

inline double resolve_rho(const RhoSpec& spec, double sigma) {
  if (spec.absolute.has_value()) {
    if (!(*spec.absolute > 0.0)) throw DomainError("rho: absolute level must be > 0");
    return *spec.absolute;
  }
  if (!(spec.multiple > 0.0)) throw DomainError("rho: sigma multiple must be > 0");
  return spec.multiple * sigma;
}

// How the position of an FPT density is measured: mode of the fitted
// generalized-gamma density (default), or argmax of the log-binned
// empirical histogram.
enum class AsymmetryMethod { fitted_mode, histogram_mode };

inline AsymmetryMethod parse_asymmetry_method(const std::string& s) {
  if (s == "fitted") return AsymmetryMethod::fitted_mode;
  if (s == "histogram") return AsymmetryMethod::histogram_mode;
  throw ConfigError("dm_method: expected 'fitted' or 'histogram', got '" + s + "'");
}

// Peak of the log-binned empirical density, refined by fitting a parabola
// through the top bin and its neighbors in log time (standard sub-bin peak
// interpolation); without it the estimate is quantized to the bin grid.
inline double histogram_mode(const FptDistribution& dist) {
  if (dist.support.empty()) throw EmptyInputError("histogram_mode: empty distribution");
  const std::vector<double> edges = log_bin_edges(dist.support.back());
  const std::size_t n_bins = edges.size() - 1;
  std::vector<double> density(n_bins, 0.0);
  std::vector<double> log_mid(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins; ++b) {
    double mass = 0.0;
    for (std::size_t i = 0; i < dist.support.size(); ++i) {
      const double s = static_cast<double>(dist.support[i]);
      if (s >= edges[b] && s < edges[b + 1]) mass += dist.probabilities[i];
    }
    density[b] = mass / (edges[b + 1] - edges[b]);
    log_mid[b] = 0.5 * (std::log(edges[b]) + std::log(edges[b + 1]));
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < n_bins; ++b) {
    if (density[b] > density[best]) best = b;
  }
  if (best == 0 || best + 1 >= n_bins) return std::exp(log_mid[best]);

  // parabola vertex through three (log_mid, density) points
  const double x0 = log_mid[best - 1], x1 = log_mid[best], x2 = log_mid[best + 1];
  const double f0 = density[best - 1], f1 = density[best], f2 = density[best + 1];
  const double d01 = (f1 - f0) / (x1 - x0);
  const double d12 = (f2 - f1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) return std::exp(x1);
  const double vertex = 0.5 * (x0 + x1 - d01 / curvature);
  return std::exp(std::clamp(vertex, x0, x2));
}

// One series, both barriers: resolves rho, samples first passage times for
// the gain and loss legs, fits both densities, measures the mode shift.
struct FptAnalysis {
  double sigma = 0.0;
  double rho_abs = 0.0;
  FptSamples gain;
  FptSamples loss;
  FptDistribution dist_gain;
  FptDistribution dist_loss;
  GenGammaParams fit_gain;
  GenGammaParams fit_loss;
  AsymmetryMeasure asym;
  std::uint64_t source_hash = 0;
};

inline FptAnalysis analyze_fpt(const LogPriceSeries& x, const RhoSpec& rho,
                               AsymmetryMethod method = AsymmetryMethod::fitted_mode) {
  FptAnalysis a;
  a.sigma = stats(returns(x)).std;
  a.rho_abs = resolve_rho(rho, a.sigma);
  a.source_hash = series_hash(x.values);
  a.gain = fpt_samples_fast(x, a.rho_abs);
  a.loss = fpt_samples_fast(x, -a.rho_abs);
  a.dist_gain = empirical_distribution(a.gain);
  a.dist_loss = empirical_distribution(a.loss);
  a.fit_gain = fit_gengamma(a.gain);
  a.fit_loss = fit_gengamma(a.loss);
  if (method == AsymmetryMethod::fitted_mode) {
    a.asym = asymmetry_from_fits(a.fit_gain, a.fit_loss);
  } else {
    a.asym.mode_gain = histogram_mode(a.dist_gain);
    a.asym.mode_loss = histogram_mode(a.dist_loss);
    a.asym.d_m = a.asym.mode_gain - a.asym.mode_loss;
  }
  return a;
}

struct LeverageAnalysis {
  LeverageCurve curve;
  ExpDecayFit fit;
};

inline LeverageAnalysis analyze_leverage(const ReturnSeries& rets, int curve_first,
                                         int curve_last, int fit_first, int fit_last) {
  LeverageAnalysis a;
  a.curve = leverage_corr(rets, curve_first, curve_last);
  a.fit = fit_expdecay(a.curve, fit_first, fit_last);
  return a;
}

// ---------------------------------------------------------------------------
// emission helpers

namespace detail {

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

}  // namespace detail

inline void write_samples_csv(const std::string& path, const FptSamples& samples) {
  std::map<int, std::int64_t> counts;
  for (int s : samples.samples) ++counts[s];
  std::vector<std::vector<std::string>> rows;
  for (const auto& [s, c] : counts) {
    rows.push_back({std::to_string(s), std::to_string(c)});
  }
  write_columns_csv(path, "s,count", rows);
}

inline void write_distribution_csv(const std::string& path, const FptDistribution& dist) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    rows.push_back({std::to_string(dist.support[i]), detail::format_double(dist.probabilities[i])});
  }
  write_columns_csv(path, "s,probability", rows);
}

inline void write_curve_csv(const std::string& path, const LeverageCurve& curve) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < curve.lags.size(); ++i) {
    rows.push_back({std::to_string(curve.lags[i]), detail::format_double(curve.values[i]),
                    to_string(curve.kind)});
  }
  write_columns_csv(path, "tau,value,kind", rows);
}

inline nlohmann::json gengamma_json(const GenGammaParams& p, std::size_t n_samples) {
  return {{"kind", "gengamma"},
          {"alpha", p.alpha},
          {"beta", p.beta},
          {"nu", p.nu},
          {"loglik", p.loglik},
          {"n_samples", n_samples}};
}

inline nlohmann::json expdecay_json(const ExpDecayFit& f, std::size_t n_points) {
  return {{"kind", "expdecay"},
          {"a", f.a},
          {"t_scale", f.t_scale},
          {"residual", f.residual},
          {"n_samples", n_points}};
}

inline nlohmann::json fpt_analysis_json(const FptAnalysis& a) {
  nlohmann::json j;
  j["sigma"] = a.sigma;
  j["rho_abs"] = a.rho_abs;
  j["source_hash"] = detail::hash_hex(a.source_hash);
  j["gain"] = {{"rho", a.gain.rho},
               {"starts_scanned", a.gain.starts_scanned},
               {"starts_hit", a.gain.starts_hit}};
  j["loss"] = {{"rho", a.loss.rho},
               {"starts_scanned", a.loss.starts_scanned},
               {"starts_hit", a.loss.starts_hit}};
  j["fit_gain"] = gengamma_json(a.fit_gain, a.gain.samples.size());
  j["fit_loss"] = gengamma_json(a.fit_loss, a.loss.samples.size());
  j["d_m"] = a.asym.d_m;
  j["mode_gain"] = a.asym.mode_gain;
  j["mode_loss"] = a.asym.mode_loss;
  return j;
}

// Binned FPT densities (stars = gains, rings = losses) with the fitted
// generalized-gamma densities overlaid, log time axis.
inline std::vector<PlotSeries> fpt_plot_series(const FptAnalysis& a) {
  const auto binned = [](const FptDistribution& dist) {
    std::vector<double> xs, ys;
    const std::vector<double> edges = log_bin_edges(dist.support.back());
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      double mass = 0.0;
      for (std::size_t i = 0; i < dist.support.size(); ++i) {
        const double s = static_cast<double>(dist.support[i]);
        if (s >= edges[b] && s < edges[b + 1]) mass += dist.probabilities[i];
      }
      if (mass <= 0.0) continue;
      xs.push_back(std::sqrt(edges[b] * edges[b + 1]));
      ys.push_back(mass / (edges[b + 1] - edges[b]));
    }
    return std::make_pair(xs, ys);
  };
  const auto pdf_line = [](const GenGammaParams& fit, double t_max) {
    std::vector<double> xs, ys;
    const int n = 180;
    const double lo = std::log(1.0);
    const double hi = std::log(std::max(t_max * 1.25, 2.0));
    for (int i = 0; i <= n; ++i) {
      const double t = std::exp(lo + (hi - lo) * i / n);
      xs.push_back(t);
      ys.push_back(gengamma_pdf(fit, t));
    }
    return std::make_pair(xs, ys);
  };

  std::vector<PlotSeries> out;
  PlotSeries gain;
  gain.label = "gain";
  gain.style = PlotSeries::Style::stars;
  gain.color = "#c02020";
  std::tie(gain.x, gain.y) = binned(a.dist_gain);
  PlotSeries loss;
  loss.label = "loss";
  loss.style = PlotSeries::Style::rings;
  loss.color = "#2040c0";
  std::tie(loss.x, loss.y) = binned(a.dist_loss);
  PlotSeries fit_g;
  fit_g.label = "gain fit";
  fit_g.style = PlotSeries::Style::line;
  fit_g.color = "#c02020";
  std::tie(fit_g.x, fit_g.y) = pdf_line(a.fit_gain, static_cast<double>(a.dist_gain.support.back()));
  PlotSeries fit_l;
  fit_l.label = "loss fit";
  fit_l.style = PlotSeries::Style::line;
  fit_l.color = "#2040c0";
  std::tie(fit_l.x, fit_l.y) = pdf_line(a.fit_loss, static_cast<double>(a.dist_loss.support.back()));
  out.push_back(std::move(gain));
  out.push_back(std::move(loss));
  out.push_back(std::move(fit_g));
  out.push_back(std::move(fit_l));
  return out;
}

inline void write_fpt_plot(const std::filesystem::path& path, const FptAnalysis& a,
                           const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "waiting time [days]";
  spec.y_label = "density";
  spec.log_x = true;
  write_plot_svg(path.string(), spec, fpt_plot_series(a));
}

inline void write_leverage_plot(const std::filesystem::path& path, const LeverageAnalysis& a,
                                const std::string& title) {
  PlotSeries pts;
  pts.label = "L(tau)";
  pts.style = PlotSeries::Style::rings;
  pts.color = "#2040c0";
  for (std::size_t i = 0; i < a.curve.lags.size(); ++i) {
    pts.x.push_back(static_cast<double>(a.curve.lags[i]));
    pts.y.push_back(a.curve.values[i]);
  }
  PlotSeries fit;
  fit.label = "-A exp(-tau/T)";
  fit.style = PlotSeries::Style::line;
  fit.color = "#c02020";
  const double lo = static_cast<double>(a.curve.lags.front());
  const double hi = static_cast<double>(a.curve.lags.back());
  for (int i = 0; i <= 200; ++i) {
    const double tau = lo + (hi - lo) * i / 200.0;
    fit.x.push_back(tau);
    fit.y.push_back(-a.fit.a * std::exp(-tau / a.fit.t_scale));
  }
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "lag tau [days]";
  spec.y_label = "L(tau)";
  write_plot_svg(path.string(), spec, {pts, fit});
}

// Tracks emitted files and finishes with a manifest next to them.
class ExperimentWriter {
 public:
  ExperimentWriter(const std::filesystem::path& out_dir, const std::string& experiment,
                   const Config& config_echo)
      : dir_(out_dir), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(dir_);
    manifest_.experiment = experiment;
    manifest_.config = config_echo;
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path(const std::string& rel) const { return dir_ / rel; }

  void record(const std::string& rel) { add_manifest_file(manifest_, dir_, rel); }

  void note(const std::string& message) { notes_.push_back(message); }

  void finish() {
    manifest_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (!notes_.empty()) {
      nlohmann::json j = notes_;
      detail::write_json(dir_ / "notes.json", j);
      record("notes.json");
    }
    write_manifest(dir_, manifest_);
  }

 private:
  std::filesystem::path dir_;
  ReportManifest manifest_;
  std::vector<std::string> notes_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// model-source plumbing shared by the experiments

namespace detail {

inline EgarchParams egarch_from_config(const Config& cfg) {
  EgarchParams p;
  p.mu = get_double(cfg, "mu", 0.0);
  p.a0 = get_double(cfg, "a0", -0.70);
  p.a1a = get_double(cfg, "a1a", -0.15);
  p.a1b = get_double(cfg, "a1b", 0.20);
  p.b1 = get_double(cfg, "b1", 0.92);
  return p;
}

inline RetardedParams retarded_from_config(const Config& cfg) {
  RetardedParams p;
  p.sigma = get_double(cfg, "sigma", 0.013);
  p.alpha = get_double(cfg, "alpha", 0.90);
  p.c = get_double(cfg, "c", 1.0);
  p.s0 = get_double(cfg, "s0", 100.0);
  return p;
}

inline RhoSpec rho_from_config(const Config& cfg) {
  RhoSpec rho;
  rho.multiple = get_double(cfg, "rho_mult", 5.0);
  if (has_key(cfg, "rho_abs")) rho.absolute = get_double(cfg, "rho_abs", 0.0);
  return rho;
}

// Simulates returns for `model` = egarch | iid, or log returns of the
// retarded price model.
inline ReturnSeries simulate_model_returns(const std::string& model, const Config& cfg,
                                           long length, std::uint64_t seed) {
  SimulationSpec spec;
  spec.length = length;
  spec.seed = seed;
  if (model == "egarch") {
    const EgarchParams p = egarch_from_config(cfg);
    spec.burn_in = get_long(cfg, "burn_in", default_burn_in(p));
    return simulate_egarch(p, spec);
  }
  if (model == "retarded") {
    const RetardedParams p = retarded_from_config(cfg);
    spec.burn_in = get_long(cfg, "burn_in", default_burn_in(p));
    return returns(to_log(simulate_retarded(p, spec)));
  }
  if (model == "iid") {
    spec.burn_in = get_long(cfg, "burn_in", 0);
    return simulate_iid_gaussian(get_double(cfg, "mu", 0.0), get_double(cfg, "sigma", 0.013),
                                 spec);
  }
  throw ConfigError("model: expected egarch, retarded, or iid, got '" + model + "'");
}

// A log-price source for permutation/filtration runs: either an ingested
// CSV (key series_csv) or a simulated model path.
inline LogPriceSeries source_log_series(const Config& cfg, std::uint64_t seed) {
  if (has_key(cfg, "series_csv")) {
    return to_log(read_price_csv(require_string(cfg, "series_csv")));
  }
  const std::string model = get_string(cfg, "model", "egarch");
  const long length = get_long(cfg, "length", 1000000);
  return rebuild(simulate_model_returns(model, cfg, length, seed));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// named experiments

struct StockResult {
  std::string name;
  SeriesStats return_stats;
  FptAnalysis fpt;
  bool asym_ok = true;
  std::string asym_error;
};

inline const std::set<std::string>& stock_asymmetry_keys() {
  static const std::set<std::string> keys = {"rho_mult", "rho_abs", "dm_method", "seed"};
  return keys;
}

// Per-stock gain/loss asymmetry at volatility-scaled barriers. Each CSV gets
// its own distributions, fits, and figure; a failed density fit is recorded
// rather than aborting the batch.
inline std::vector<StockResult> run_stock_asymmetry(const std::vector<std::string>& csv_paths,
                                                    const Config& cfg,
                                                    const std::filesystem::path& out_dir) {
  require_known_keys(cfg, stock_asymmetry_keys(), "stock-asymmetry");
  if (csv_paths.empty()) throw EmptyInputError("stock-asymmetry: no input CSVs");
  const RhoSpec rho = detail::rho_from_config(cfg);
  const AsymmetryMethod method =
      parse_asymmetry_method(get_string(cfg, "dm_method", "histogram"));

  ExperimentWriter writer(out_dir, "stock-asymmetry", cfg);
  std::vector<StockResult> results;
  for (const std::string& path : csv_paths) {
    StockResult r;
    r.name = std::filesystem::path(path).stem().string();
    const PriceSeries prices = read_price_csv(path);
    const LogPriceSeries x = to_log(prices);
    r.return_stats = stats(returns(x));
    try {
      r.fpt = analyze_fpt(x, rho, method);
    } catch (const Error& e) {
      r.asym_ok = false;
      r.asym_error = e.what();
      writer.note(r.name + ": " + e.what());
      results.push_back(std::move(r));
      continue;
    }

    const std::string base = r.name;
    write_samples_csv(writer.path(base + "_samples_gain.csv").string(), r.fpt.gain);
    writer.record(base + "_samples_gain.csv");
    write_samples_csv(writer.path(base + "_samples_loss.csv").string(), r.fpt.loss);
    writer.record(base + "_samples_loss.csv");
    write_distribution_csv(writer.path(base + "_dist_gain.csv").string(), r.fpt.dist_gain);
    writer.record(base + "_dist_gain.csv");
    write_distribution_csv(writer.path(base + "_dist_loss.csv").string(), r.fpt.dist_loss);
    writer.record(base + "_dist_loss.csv");

    nlohmann::json j = fpt_analysis_json(r.fpt);
    j["name"] = r.name;
    j["mean"] = r.return_stats.mean;
    j["skewness"] = r.return_stats.skewness;
    detail::write_json(writer.path(base + "_result.json"), j);
    writer.record(base + "_result.json");

    write_fpt_plot(writer.path(base + "_fpt.svg"), r.fpt, r.name + " first passage times");
    writer.record(base + "_fpt.svg");
    results.push_back(std::move(r));
  }
  writer.finish();
  return results;
}

struct PanelEntry {
  EgarchParams params;
  double sigma_bar_sq = 0.0;
  LeverageAnalysis lev;
  FptAnalysis fpt;
};

inline const std::set<std::string>& egarch_panel_keys() {
  static const std::set<std::string> keys = {"a1a_list", "mu",        "a0",       "a1b",
                                             "b1",       "length",    "burn_in",  "seed",
                                             "rho_mult", "lag_min",   "lag_max",  "fit_min",
                                             "fit_max",  "dm_method"};
  return keys;
}

// Leverage curve + exponential fit + FPT pair per a1a value, with the
// barrier set to rho_mult * sigma_bar from the closed-form unconditional
// variance of each configuration.
inline std::vector<PanelEntry> run_egarch_panel(const Config& cfg,
                                                const std::filesystem::path& out_dir) {
  require_known_keys(cfg, egarch_panel_keys(), "egarch-panel");
  const std::vector<double> a1a_list = get_double_list(cfg, "a1a_list", {0.0, -0.15, -0.30});
  const long length = get_long(cfg, "length", 1000000);
  const std::uint64_t master = get_seed(cfg, "seed", 1);
  const double rho_mult = get_double(cfg, "rho_mult", 5.0);
  const int lag_min = static_cast<int>(get_long(cfg, "lag_min", 0));
  const int lag_max = static_cast<int>(get_long(cfg, "lag_max", 250));
  const int fit_min = static_cast<int>(get_long(cfg, "fit_min", 1));
  const int fit_max = static_cast<int>(get_long(cfg, "fit_max", 50));
  const AsymmetryMethod method =
      parse_asymmetry_method(get_string(cfg, "dm_method", "histogram"));

  ExperimentWriter writer(out_dir, "egarch-panel", cfg);
  std::vector<PanelEntry> entries;
  for (std::size_t i = 0; i < a1a_list.size(); ++i) {
    PanelEntry entry;
    entry.params = detail::egarch_from_config(cfg);
    entry.params.a1a = a1a_list[i];
    entry.sigma_bar_sq = egarch_unconditional_variance(entry.params);

    SimulationSpec spec;
    spec.length = length;
    spec.burn_in = get_long(cfg, "burn_in", default_burn_in(entry.params));
    spec.seed = derive_seed(master, "egarch-panel", i, 0);
    const ReturnSeries rets = simulate_egarch(entry.params, spec);

    entry.lev = analyze_leverage(rets, lag_min, lag_max, fit_min, fit_max);
    RhoSpec rho;
    rho.absolute = rho_mult * std::sqrt(entry.sigma_bar_sq);
    entry.fpt = analyze_fpt(rebuild(rets), rho, method);

    const std::string base = "panel_" + std::to_string(i);
    write_curve_csv(writer.path(base + "_leverage.csv").string(), entry.lev.curve);
    writer.record(base + "_leverage.csv");
    {
      nlohmann::json meta = {{"kind", to_string(entry.lev.curve.kind)},
                             {"lag_min", lag_min},
                             {"lag_max", lag_max},
                             {"n_pairs", entry.lev.curve.n_pairs},
                             {"source_hash", detail::hash_hex(entry.fpt.source_hash)}};
      detail::write_json(writer.path(base + "_leverage_meta.json"), meta);
      writer.record(base + "_leverage_meta.json");
    }
    write_distribution_csv(writer.path(base + "_dist_gain.csv").string(), entry.fpt.dist_gain);
    writer.record(base + "_dist_gain.csv");
    write_distribution_csv(writer.path(base + "_dist_loss.csv").string(), entry.fpt.dist_loss);
    writer.record(base + "_dist_loss.csv");

    nlohmann::json j = fpt_analysis_json(entry.fpt);
    j["a1a"] = entry.params.a1a;
    j["sigma_bar_sq"] = entry.sigma_bar_sq;
    j["leverage_fit"] = expdecay_json(entry.lev.fit, entry.lev.curve.lags.size());
    j["seed"] = spec.seed;
    detail::write_json(writer.path(base + "_result.json"), j);
    writer.record(base + "_result.json");

    char title[96];
    std::snprintf(title, sizeof title, "EGARCH a1a = %g", entry.params.a1a);
    write_leverage_plot(writer.path(base + "_leverage.svg"), entry.lev, title);
    writer.record(base + "_leverage.svg");
    write_fpt_plot(writer.path(base + "_fpt.svg"), entry.fpt, title);
    writer.record(base + "_fpt.svg");
    entries.push_back(std::move(entry));
  }
  writer.finish();
  return entries;
}

struct ScanPoint {
  double param = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double a = 0.0;
  double t_scale = 0.0;
  double d_m = 0.0;
  bool ok = false;
  std::string error;
};

struct ScanSummaryPoint {
  double param = 0.0;
  double a = 0.0;
  double t_scale = 0.0;
  double d_m = 0.0;
  int n_ok = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::vector<ScanSummaryPoint> summary;
  LinearFit fit_a;
  LinearFit fit_dm;
};

inline const std::set<std::string>& scan_keys() {
  static const std::set<std::string> keys = {
      "model", "grid",    "replicates", "length",  "burn_in", "seed",    "mu",
      "a0",    "a1a",     "a1b",        "b1",      "sigma",   "alpha",   "c",
      "s0",    "rho_mult", "fit_min",   "fit_max", "dm_method"};
  return keys;
}

// Sweeps the leverage parameter (a1a for EGARCH, c for retarded) over a
// grid, estimating the leverage amplitude A and the asymmetry d_m per point
// with replicate averaging, then fits A-vs-parameter and d_m-vs-parameter
// lines. Individual point failures are recorded and skipped.
inline ScanResult run_scan(const Config& cfg, const std::filesystem::path& out_dir) {
  require_known_keys(cfg, scan_keys(), "scan");
  const std::string model = get_string(cfg, "model", "egarch");
  if (model != "egarch" && model != "retarded") {
    throw ConfigError("scan: model must be egarch or retarded, got '" + model + "'");
  }
  const std::vector<double> grid =
      get_double_list(cfg, "grid", model == "egarch"
                                       ? std::vector<double>{-0.30, -0.225, -0.15, -0.075, 0.0,
                                                             0.075, 0.15, 0.225, 0.30}
                                       : std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  if (grid.size() < 5) throw ConfigError("scan: grid needs >= 5 points");
  const long replicates = get_long(cfg, "replicates", 3);
  if (replicates < 1) throw ConfigError("scan: replicates must be >= 1");
  const long length = get_long(cfg, "length", 1000000);
  if (length < 10000) throw ConfigError("scan: length must be >= 10000");
  const std::uint64_t master = get_seed(cfg, "seed", 1);
  const double rho_mult = get_double(cfg, "rho_mult", 5.0);
  const int fit_min = static_cast<int>(get_long(cfg, "fit_min", 1));
  const int fit_max = static_cast<int>(get_long(cfg, "fit_max", 50));
  const AsymmetryMethod method =
      parse_asymmetry_method(get_string(cfg, "dm_method", "histogram"));

  ExperimentWriter writer(out_dir, "scan", cfg);
  ScanResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (long r = 0; r < replicates; ++r) {
      ScanPoint point;
      point.param = grid[i];
      point.replicate = static_cast<int>(r);
      point.seed = derive_seed(master, "scan-" + model, i, static_cast<std::uint64_t>(r));
      try {
        Config point_cfg = cfg;
        point_cfg[model == "egarch" ? "a1a" : "c"] = detail::format_double(grid[i]);
        const ReturnSeries rets =
            detail::simulate_model_returns(model, point_cfg, length, point.seed);
        const LeverageAnalysis lev =
            analyze_leverage(rets, std::min(fit_min, 1), fit_max, fit_min, fit_max);
        point.a = lev.fit.a;
        point.t_scale = lev.fit.t_scale;
        RhoSpec rho;
        rho.multiple = rho_mult;
        const FptAnalysis fpt = analyze_fpt(rebuild(rets), rho, method);
        point.d_m = fpt.asym.d_m;
        point.ok = true;
      } catch (const Error& e) {
        point.error = e.what();
        writer.note("point " + detail::format_double(grid[i]) + " replicate " +
                    std::to_string(r) + ": " + e.what());
      }
      result.points.push_back(std::move(point));
    }

    ScanSummaryPoint s;
    s.param = grid[i];
    for (const ScanPoint& p : result.points) {
      if (p.param == grid[i] && p.ok) {
        s.a += p.a;
        s.t_scale += p.t_scale;
        s.d_m += p.d_m;
        ++s.n_ok;
      }
    }
    if (s.n_ok > 0) {
      s.a /= s.n_ok;
      s.t_scale /= s.n_ok;
      s.d_m /= s.n_ok;
    }
    result.summary.push_back(s);
  }

  std::vector<double> xs, as, dms;
  for (const ScanSummaryPoint& s : result.summary) {
    if (s.n_ok == 0) continue;
    xs.push_back(s.param);
    as.push_back(s.a);
    dms.push_back(s.d_m);
  }
  if (xs.size() < 3) {
    writer.finish();
    throw FitError("scan: fewer than 3 surviving grid points, cannot fit lines");
  }
  result.fit_a = linear_fit(xs, as);
  result.fit_dm = linear_fit(xs, dms);

  {
    std::vector<std::vector<std::string>> rows;
    for (const ScanPoint& p : result.points) {
      rows.push_back({detail::format_double(p.param), std::to_string(p.replicate),
                      std::to_string(p.seed), detail::format_double(p.a),
                      detail::format_double(p.t_scale),
                      p.ok ? detail::format_double(p.d_m) : "",
                      p.ok ? "ok" : "failed"});
    }
    write_columns_csv(writer.path("scan_points.csv").string(),
                      "param,replicate,seed,a,t_scale,d_m,status", rows);
    writer.record("scan_points.csv");
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const ScanSummaryPoint& s : result.summary) {
      rows.push_back({detail::format_double(s.param), detail::format_double(s.a),
                      detail::format_double(s.t_scale), detail::format_double(s.d_m),
                      std::to_string(s.n_ok)});
    }
    write_columns_csv(writer.path("scan_summary.csv").string(), "param,a,t_scale,d_m,n_ok",
                      rows);
    writer.record("scan_summary.csv");
  }
  {
    nlohmann::json j;
    j["model"] = model;
    j["a_vs_param"] = {{"kind", "linear"},
                       {"slope", result.fit_a.slope},
                       {"intercept", result.fit_a.intercept},
                       {"r_squared", result.fit_a.r_squared}};
    j["dm_vs_param"] = {{"kind", "linear"},
                        {"slope", result.fit_dm.slope},
                        {"intercept", result.fit_dm.intercept},
                        {"r_squared", result.fit_dm.r_squared}};
    detail::write_json(writer.path("scan_fits.json"), j);
    writer.record("scan_fits.json");
  }

  const auto scatter_plot = [&](const std::string& rel, const std::string& ylab,
                                const LinearFit& fit, bool use_dm) {
    PlotSeries pts;
    pts.label = ylab;
    pts.style = PlotSeries::Style::rings;
    pts.color = "#2040c0";
    for (const ScanSummaryPoint& s : result.summary) {
      if (s.n_ok == 0) continue;
      pts.x.push_back(s.param);
      pts.y.push_back(use_dm ? s.d_m : s.a);
    }
    PlotSeries line;
    line.label = "linear fit";
    line.style = PlotSeries::Style::line;
    line.color = "#c02020";
    for (double v : {pts.x.front(), pts.x.back()}) {
      line.x.push_back(v);
      line.y.push_back(fit.intercept + fit.slope * v);
    }
    PlotSpec spec;
    spec.title = ylab + " vs " + (model == "egarch" ? "a1a" : "C");
    spec.x_label = model == "egarch" ? "a1a" : "C";
    spec.y_label = ylab;
    write_plot_svg(writer.path(rel).string(), spec, {pts, line});
    writer.record(rel);
  };
  scatter_plot("scan_a.svg", "leverage amplitude A", result.fit_a, false);
  scatter_plot("scan_dm.svg", "asymmetry d_m [days]", result.fit_dm, true);

  writer.finish();
  return result;
}

struct PermutationResult {
  LeverageAnalysis lev_original;
  LeverageAnalysis lev_permuted;
  FptAnalysis fpt_original;
  FptAnalysis fpt_permuted;
};

inline const std::set<std::string>& permutation_keys() {
  static const std::set<std::string> keys = {
      "series_csv", "model",   "mu",      "a0",      "a1a",     "a1b",      "b1",
      "sigma",      "alpha",   "c",       "s0",      "length",  "burn_in",  "seed",
      "rho_mult",   "rho_abs", "lag_min", "lag_max", "fit_min", "fit_max",  "dm_method"};
  return keys;
}

// Same analyses before and after a seeded random permutation of the
// returns. Permutation preserves every unconditional moment, so whatever
// survives it cannot be a serial-dependence effect.
inline PermutationResult run_permutation_test(const Config& cfg,
                                              const std::filesystem::path& out_dir) {
  require_known_keys(cfg, permutation_keys(), "permutation");
  const std::uint64_t master = get_seed(cfg, "seed", 1);
  const LogPriceSeries x = detail::source_log_series(cfg, derive_seed(master, "permute-sim"));
  const ReturnSeries original = returns(x);
  const ReturnSeries permuted = permute_returns(original, derive_seed(master, "permute-shuffle"));

  const RhoSpec rho = detail::rho_from_config(cfg);
  const int lag_min = static_cast<int>(get_long(cfg, "lag_min", 0));
  const int lag_max = static_cast<int>(get_long(cfg, "lag_max", 250));
  const int fit_min = static_cast<int>(get_long(cfg, "fit_min", 1));
  const int fit_max = static_cast<int>(get_long(cfg, "fit_max", 50));
  const AsymmetryMethod method =
      parse_asymmetry_method(get_string(cfg, "dm_method", "histogram"));

  PermutationResult result;
  result.lev_original = analyze_leverage(original, lag_min, lag_max, fit_min, fit_max);
  result.lev_permuted = analyze_leverage(permuted, lag_min, lag_max, fit_min, fit_max);
  result.fpt_original = analyze_fpt(rebuild(original), rho, method);
  result.fpt_permuted = analyze_fpt(rebuild(permuted), rho, method);

  ExperimentWriter writer(out_dir, "permutation", cfg);
  write_curve_csv(writer.path("original_leverage.csv").string(), result.lev_original.curve);
  writer.record("original_leverage.csv");
  write_curve_csv(writer.path("permuted_leverage.csv").string(), result.lev_permuted.curve);
  writer.record("permuted_leverage.csv");
  write_distribution_csv(writer.path("original_dist_gain.csv").string(),
                         result.fpt_original.dist_gain);
  writer.record("original_dist_gain.csv");
  write_distribution_csv(writer.path("original_dist_loss.csv").string(),
                         result.fpt_original.dist_loss);
  writer.record("original_dist_loss.csv");
  write_distribution_csv(writer.path("permuted_dist_gain.csv").string(),
                         result.fpt_permuted.dist_gain);
  writer.record("permuted_dist_gain.csv");
  write_distribution_csv(writer.path("permuted_dist_loss.csv").string(),
                         result.fpt_permuted.dist_loss);
  writer.record("permuted_dist_loss.csv");

  nlohmann::json j;
  j["original"] = fpt_analysis_json(result.fpt_original);
  j["original"]["leverage_fit"] =
      expdecay_json(result.lev_original.fit, result.lev_original.curve.lags.size());
  j["permuted"] = fpt_analysis_json(result.fpt_permuted);
  j["permuted"]["leverage_fit"] =
      expdecay_json(result.lev_permuted.fit, result.lev_permuted.curve.lags.size());
  detail::write_json(writer.path("permutation_result.json"), j);
  writer.record("permutation_result.json");

  write_leverage_plot(writer.path("original_leverage.svg"), result.lev_original,
                      "leverage, original");
  writer.record("original_leverage.svg");
  write_leverage_plot(writer.path("permuted_leverage.svg"), result.lev_permuted,
                      "leverage, permuted");
  writer.record("permuted_leverage.svg");
  write_fpt_plot(writer.path("original_fpt.svg"), result.fpt_original,
                 "first passage times, original");
  writer.record("original_fpt.svg");
  write_fpt_plot(writer.path("permuted_fpt.svg"), result.fpt_permuted,
                 "first passage times, permuted");
  writer.record("permuted_fpt.svg");
  writer.finish();
  return result;
}

struct FiltrationEntry {
  int k = 0;  // 0 marks the unfiltered baseline
  double sigma = 0.0;
  FptAnalysis fpt;
};

struct FiltrationResult {
  std::vector<FiltrationEntry> entries;  // baseline first, then ks as given
  std::optional<double> sigma_bar_sq;    // closed form, when the source is EGARCH
};

inline const std::set<std::string>& filtration_keys() {
  static const std::set<std::string> keys = {
      "series_csv", "model", "mu",     "a0",      "a1a",    "a1b",       "b1",
      "sigma",      "alpha", "c",      "s0",      "length", "burn_in",   "seed",
      "rho_mult",   "ks",    "levels", "family",  "dm_method", "rho_source"};
  return keys;
}

// FPT pairs for the unfiltered series and for each high-pass filtration
// R_k. By default every panel uses one fixed barrier, rho_mult times the
// source's unconditional daily std (the closed form for a simulated EGARCH
// source, the sample std otherwise); rho_source = per_filtration rescales
// the barrier to each filtration's own daily std instead.
inline FiltrationResult run_filtration_test(const Config& cfg,
                                            const std::filesystem::path& out_dir) {
  require_known_keys(cfg, filtration_keys(), "filtration");
  const std::uint64_t master = get_seed(cfg, "seed", 1);
  const std::vector<int> ks = get_int_list(cfg, "ks", {10, 8, 6});
  int levels = static_cast<int>(get_long(cfg, "levels", 0));
  if (levels == 0) {
    levels = 2;
    for (int k : ks) levels = std::max(levels, k);
  }
  const std::string family_name = get_string(cfg, "family", "daubechies4");
  WaveletSpec wspec;
  wspec.levels = levels;
  if (family_name == "haar") {
    wspec.family = WaveletFamily::haar;
  } else if (family_name == "daubechies4") {
    wspec.family = WaveletFamily::daubechies4;
  } else {
    throw ConfigError("filtration: family must be haar or daubechies4");
  }

  const LogPriceSeries x = detail::source_log_series(cfg, derive_seed(master, "filter-sim"));
  const AsymmetryMethod method =
      parse_asymmetry_method(get_string(cfg, "dm_method", "histogram"));
  const double rho_mult = get_double(cfg, "rho_mult", 5.0);
  const std::string rho_source = get_string(cfg, "rho_source", "sigma_bar");
  if (rho_source != "sigma_bar" && rho_source != "per_filtration") {
    throw ConfigError("filtration: rho_source must be sigma_bar or per_filtration");
  }

  FiltrationResult result;
  if (!has_key(cfg, "series_csv") && get_string(cfg, "model", "egarch") == "egarch") {
    result.sigma_bar_sq = egarch_unconditional_variance(detail::egarch_from_config(cfg));
  }
  RhoSpec rho;
  rho.multiple = rho_mult;
  if (rho_source == "sigma_bar") {
    const double sigma = result.sigma_bar_sq.has_value() ? std::sqrt(*result.sigma_bar_sq)
                                                         : stats(returns(x)).std;
    rho.absolute = rho_mult * sigma;
  }

  ExperimentWriter writer(out_dir, "filtration", cfg);

  const auto analyze_entry = [&](int k, const LogPriceSeries& series,
                                 std::size_t truncated_prefix) {
    FiltrationEntry entry;
    entry.k = k;
    entry.fpt = analyze_fpt(series, rho, method);
    entry.sigma = entry.fpt.sigma;

    const std::string base = k == 0 ? "unfiltered" : "filtration_k" + std::to_string(k);
    write_distribution_csv(writer.path(base + "_dist_gain.csv").string(), entry.fpt.dist_gain);
    writer.record(base + "_dist_gain.csv");
    write_distribution_csv(writer.path(base + "_dist_loss.csv").string(), entry.fpt.dist_loss);
    writer.record(base + "_dist_loss.csv");
    if (k != 0) {
      // standard series schema; close = exp(value) keeps downstream
      // analyses source-agnostic
      PriceSeries prices;
      prices.values.reserve(series.values.size());
      for (double v : series.values) prices.values.push_back(std::exp(v));
      write_price_csv(writer.path(base + ".csv").string(), prices);
      writer.record(base + ".csv");
      nlohmann::json meta = {{"k", k},
                             {"family", to_string(wspec.family)},
                             {"levels", wspec.levels},
                             {"truncated_prefix_length", truncated_prefix}};
      detail::write_json(writer.path(base + "_meta.json"), meta);
      writer.record(base + "_meta.json");
    }
    write_fpt_plot(writer.path(base + "_fpt.svg"), entry.fpt,
                   k == 0 ? "unfiltered" : "high-pass filtration R_" + std::to_string(k));
    writer.record(base + "_fpt.svg");
    result.entries.push_back(std::move(entry));
  };

  analyze_entry(0, x, 0);
  for (int k : ks) {
    const Filtration f = high_pass_filtration(x, k, wspec);
    analyze_entry(k, f.series, f.truncated_prefix);
  }

  nlohmann::json j;
  if (result.sigma_bar_sq.has_value()) j["sigma_bar_sq"] = *result.sigma_bar_sq;
  nlohmann::json arr = nlohmann::json::array();
  for (const FiltrationEntry& e : result.entries) {
    nlohmann::json je = fpt_analysis_json(e.fpt);
    je["k"] = e.k;
    arr.push_back(je);
  }
  j["entries"] = arr;
  j["family"] = to_string(wspec.family);
  j["levels"] = wspec.levels;
  detail::write_json(writer.path("filtration_result.json"), j);
  writer.record("filtration_result.json");
  writer.finish();
  return result;
}

}  // namespace gainloss
