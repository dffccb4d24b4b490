// Command-line front end: simulation, first-passage-time and leverage
// analysis, density fits, and the named experiments, all emitting CSV/JSON
// artifacts plus a manifest into --out.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gainloss/config.hpp"
#include "gainloss/csv.hpp"
#include "gainloss/errors.hpp"
#include "gainloss/experiments.hpp"
#include "gainloss/fitters.hpp"
#include "gainloss/fpt.hpp"
#include "gainloss/leverage.hpp"
#include "gainloss/manifest.hpp"
#include "gainloss/models.hpp"
#include "gainloss/series.hpp"
#include "gainloss/version.hpp"

namespace gl = gainloss;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
};

// Final key/value view of one invocation: file config overlaid with any
// explicitly supplied command-line values.
gl::Config merge_config(const GlobalOpts& global, const gl::Config& cli_values) {
  gl::Config cfg;
  if (!global.config_path.empty()) cfg = gl::load_config(global.config_path);
  for (const auto& [k, v] : cli_values) cfg[k] = v;
  if (global.seed.has_value()) cfg["seed"] = std::to_string(*global.seed);
  return cfg;
}

std::string fmt(double v) { return gl::detail::format_double(v); }

void run_ingest(const GlobalOpts& global, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw gl::ConfigError("ingest: need at least one --in file");
  gl::ExperimentWriter writer(global.out_dir, "ingest", {});
  for (const std::string& path : inputs) {
    const gl::PriceSeries prices = gl::read_price_csv(path);
    const gl::LogPriceSeries x = gl::to_log(prices);
    const gl::SeriesStats s = gl::stats(gl::returns(x));
    const std::string stem = fs::path(path).stem().string();

    gl::write_price_csv(writer.path(stem + "_normalized.csv").string(), prices);
    writer.record(stem + "_normalized.csv");
    nlohmann::json meta = {{"name", stem},
                           {"rows", prices.values.size()},
                           {"first_date", prices.labels.front()},
                           {"last_date", prices.labels.back()},
                           {"mean", s.mean},
                           {"sigma", s.std},
                           {"skewness", s.skewness},
                           {"source_hash", gl::detail::hash_hex(gl::series_hash(x.values))}};
    gl::detail::write_json(writer.path(stem + "_meta.json"), meta);
    writer.record(stem + "_meta.json");
    std::cout << stem << ": " << prices.values.size() << " rows, sigma = " << fmt(s.std)
              << ", mean = " << fmt(s.mean) << "\n";
  }
  writer.finish();
}

void run_simulate(const GlobalOpts& global, const gl::Config& cli_values) {
  gl::Config cfg = merge_config(global, cli_values);
  gl::require_known_keys(cfg,
                         {"model", "length", "burn_in", "seed", "mu", "a0", "a1a", "a1b", "b1",
                          "sigma", "alpha", "c", "s0", "t0"},
                         "simulate");
  const std::string model = gl::get_string(cfg, "model", "egarch");
  const long length = gl::get_long(cfg, "length", 100000);
  const std::uint64_t seed = gl::get_seed(cfg, "seed", 1);

  gl::PriceSeries prices;
  nlohmann::json meta;
  if (model == "retarded") {
    const gl::RetardedParams p = gl::detail::retarded_from_config(cfg);
    gl::SimulationSpec spec{length, gl::get_long(cfg, "burn_in", gl::default_burn_in(p)), seed};
    prices = gl::simulate_retarded(p, spec);
    meta = {{"model", model}, {"sigma", p.sigma},     {"alpha", p.alpha},
            {"c", p.c},       {"s0", p.s0},           {"length", spec.length},
            {"burn_in", spec.burn_in}, {"seed", spec.seed}};
  } else {
    gl::ReturnSeries rets;
    if (model == "egarch") {
      const gl::EgarchParams p = gl::detail::egarch_from_config(cfg);
      gl::SimulationSpec spec{length, gl::get_long(cfg, "burn_in", gl::default_burn_in(p)),
                              seed};
      rets = gl::simulate_egarch(p, spec);
      meta = {{"model", model}, {"mu", p.mu},   {"a0", p.a0},
              {"a1a", p.a1a},   {"a1b", p.a1b}, {"b1", p.b1},
              {"length", spec.length}, {"burn_in", spec.burn_in}, {"seed", spec.seed},
              {"sigma_bar_sq", gl::egarch_unconditional_variance(p)}};
    } else if (model == "iid") {
      gl::SimulationSpec spec{length, gl::get_long(cfg, "burn_in", 0), seed};
      const double mu = gl::get_double(cfg, "mu", 0.0);
      const double sigma = gl::get_double(cfg, "sigma", 0.013);
      rets = gl::simulate_iid_gaussian(mu, sigma, spec);
      meta = {{"model", model}, {"mu", mu}, {"sigma", sigma},
              {"length", spec.length}, {"burn_in", spec.burn_in}, {"seed", spec.seed}};
    } else {
      throw gl::ConfigError("simulate: model must be egarch, retarded, or iid, got '" + model +
                            "'");
    }
    const gl::LogPriceSeries x = gl::rebuild(rets);
    prices.values.reserve(x.values.size());
    for (double v : x.values) prices.values.push_back(std::exp(v));
  }

  gl::ExperimentWriter writer(global.out_dir, "simulate", cfg);
  gl::write_price_csv(writer.path("series.csv").string(), prices,
                      gl::get_string(cfg, "t0", "1970-01-01"));
  writer.record("series.csv");
  meta["rows"] = prices.values.size();
  gl::detail::write_json(writer.path("series_meta.json"), meta);
  writer.record("series_meta.json");
  writer.finish();
  std::cout << "simulate: wrote " << prices.values.size() << " prices to "
            << writer.path("series.csv").string() << "\n";
}

void run_fpt(const GlobalOpts& global, const std::vector<std::string>& inputs,
             const gl::Config& cli_values, bool naive) {
  if (inputs.empty()) throw gl::ConfigError("fpt: need at least one --in file");
  gl::Config cfg = merge_config(global, cli_values);

  if (gl::has_key(cfg, "rho") && inputs.size() == 1) {
    // raw signed-level sampling of a single series
    gl::require_known_keys(cfg, {"rho", "seed"}, "fpt");
    const double rho = gl::get_double(cfg, "rho", 0.0);
    const gl::LogPriceSeries x = gl::to_log(gl::read_price_csv(inputs[0]));
    const gl::FptSamples samples =
        naive ? gl::fpt_samples_naive(x, rho) : gl::fpt_samples_fast(x, rho);
    const gl::FptDistribution dist = gl::empirical_distribution(samples);

    gl::ExperimentWriter writer(global.out_dir, "fpt", cfg);
    gl::write_samples_csv(writer.path("fpt_samples.csv").string(), samples);
    writer.record("fpt_samples.csv");
    gl::write_distribution_csv(writer.path("fpt_dist.csv").string(), dist);
    writer.record("fpt_dist.csv");
    nlohmann::json meta = {{"rho", samples.rho},
                           {"starts_scanned", samples.starts_scanned},
                           {"starts_hit", samples.starts_hit},
                           {"sampler", naive ? "naive" : "fast"},
                           {"source_hash", gl::detail::hash_hex(gl::series_hash(x.values))}};
    gl::detail::write_json(writer.path("fpt_meta.json"), meta);
    writer.record("fpt_meta.json");
    writer.finish();
    std::cout << "fpt: " << samples.starts_hit << "/" << samples.starts_scanned
              << " starts crossed rho = " << fmt(rho) << "\n";
    return;
  }

  if (gl::has_key(cfg, "rho")) {
    throw gl::ConfigError("fpt: --rho works with exactly one --in; use --rho-mult for batches");
  }
  // volatility-scaled gain/loss pair per input
  const auto results = gl::run_stock_asymmetry(inputs, cfg, global.out_dir);
  for (const auto& r : results) {
    if (r.asym_ok) {
      std::cout << r.name << ": sigma = " << fmt(r.fpt.sigma) << ", rho = +/-"
                << fmt(r.fpt.rho_abs) << ", d_m = " << fmt(r.fpt.asym.d_m)
                << " (gain hits " << r.fpt.gain.starts_hit << ", loss hits "
                << r.fpt.loss.starts_hit << ")\n";
    } else {
      std::cout << r.name << ": analysis failed: " << r.asym_error << "\n";
    }
  }
}

void run_leverage(const GlobalOpts& global, const std::string& input,
                  const gl::Config& cli_values) {
  gl::Config cfg = merge_config(global, cli_values);
  gl::require_known_keys(cfg, {"kind", "lag_min", "lag_max", "seed"}, "leverage");
  const std::string kind = gl::get_string(cfg, "kind", "correlation");
  const int lag_min = static_cast<int>(gl::get_long(cfg, "lag_min", 0));
  const int lag_max = static_cast<int>(gl::get_long(cfg, "lag_max", 250));

  const gl::LogPriceSeries x = gl::to_log(gl::read_price_csv(input));
  const gl::ReturnSeries rets = gl::returns(x);
  gl::LeverageCurve curve;
  if (kind == "correlation") {
    curve = gl::leverage_corr(rets, lag_min, lag_max);
  } else if (kind == "homogeneous") {
    curve = gl::leverage_homogeneous(rets, lag_min, lag_max);
  } else if (kind == "bouchaud") {
    curve = gl::leverage_bouchaud(rets, lag_min, lag_max);
  } else {
    throw gl::ConfigError("leverage: kind must be correlation, homogeneous, or bouchaud");
  }

  gl::ExperimentWriter writer(global.out_dir, "leverage", cfg);
  gl::write_curve_csv(writer.path("leverage_curve.csv").string(), curve);
  writer.record("leverage_curve.csv");
  nlohmann::json meta = {{"kind", gl::to_string(curve.kind)},
                         {"lag_min", lag_min},
                         {"lag_max", lag_max},
                         {"n_pairs", curve.n_pairs},
                         {"source_hash", gl::detail::hash_hex(gl::series_hash(x.values))}};
  gl::detail::write_json(writer.path("leverage_meta.json"), meta);
  writer.record("leverage_meta.json");
  writer.finish();
  std::cout << "leverage: wrote " << curve.lags.size() << " lags to "
            << writer.path("leverage_curve.csv").string() << "\n";
}

void run_fit(const GlobalOpts& global, const std::string& input, const gl::Config& cli_values) {
  gl::Config cfg = merge_config(global, cli_values);
  gl::require_known_keys(cfg, {"kind", "fit_min", "fit_max", "seed"}, "fit");
  const std::string kind = gl::get_string(cfg, "kind", "");
  gl::ExperimentWriter writer(global.out_dir, "fit", cfg);
  nlohmann::json j;
  if (kind == "expdecay") {
    const auto pairs = gl::read_pairs_csv(input, "tau,value");
    gl::LeverageCurve curve;
    for (const auto& [tau, value] : pairs) {
      curve.lags.push_back(static_cast<int>(tau));
      curve.values.push_back(value);
      curve.n_pairs.push_back(0);
    }
    const int fit_min = static_cast<int>(gl::get_long(cfg, "fit_min", 1));
    const int fit_max = static_cast<int>(gl::get_long(cfg, "fit_max", 50));
    const gl::ExpDecayFit fit = gl::fit_expdecay(curve, fit_min, fit_max);
    j = gl::expdecay_json(fit, curve.lags.size());
    std::cout << "fit: A = " << fmt(fit.a) << ", T = " << fmt(fit.t_scale)
              << ", residual = " << fmt(fit.residual) << "\n";
  } else if (kind == "gengamma") {
    const auto pairs = gl::read_pairs_csv(input, "s,");
    gl::FptSamples samples;
    for (const auto& [s, count] : pairs) {
      for (long c = 0; c < static_cast<long>(count); ++c) {
        samples.samples.push_back(static_cast<int>(s));
      }
    }
    samples.starts_scanned = samples.starts_hit = static_cast<std::int64_t>(samples.samples.size());
    samples.rho = 1.0;  // unknown here; samples file carries no level
    const gl::GenGammaParams fit = gl::fit_gengamma(samples);
    j = gl::gengamma_json(fit, samples.samples.size());
    std::cout << "fit: alpha = " << fmt(fit.alpha) << ", beta = " << fmt(fit.beta)
              << ", nu = " << fmt(fit.nu) << ", loglik = " << fmt(fit.loglik) << "\n";
  } else {
    throw gl::ConfigError("fit: --kind must be expdecay or gengamma");
  }
  gl::detail::write_json(writer.path("fit.json"), j);
  writer.record("fit.json");
  writer.finish();
}

void run_report(const GlobalOpts& global) {
  const auto problems = gl::verify_manifest(global.out_dir);
  const gl::ReportManifest m = gl::read_manifest(fs::path(global.out_dir) / "manifest.json");
  std::cout << "experiment: " << m.experiment << " (tool " << m.tool_version << ")\n";
  std::cout << "files listed: " << m.files.size() << "\n";
  if (problems.empty()) {
    std::cout << "manifest OK: all files present, hashes match\n";
    return;
  }
  for (const std::string& p : problems) std::cout << "MISMATCH " << p << "\n";
  throw gl::Error("report: " + std::to_string(problems.size()) + " file(s) failed verification");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-passage-time asymmetry and leverage-effect toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GAINLOSS_VERSION);

  GlobalOpts global;
  app.add_option("--config", global.config_path, "key = value config file")->expected(1);
  app.add_option("--out", global.out_dir, "output directory (default: out)");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "master seed");

  // Per-subcommand option values are collected as strings and merged over
  // the config file; absent flags defer to the file, then to defaults.
  // Config keys use underscores, the matching flags use dashes.
  std::map<std::string, std::string> values;
  const auto bind = [&values](CLI::App* cmd, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    auto* opt = cmd->add_option_function<std::string>(
        flag, [&values, key](const std::string& v) { values[key] = v; }, help);
    opt->expected(1);
    return opt;
  };

  std::vector<std::string> inputs;
  bool naive = false;

  auto* ingest = app.add_subcommand("ingest", "validate price CSVs and report their stats");
  ingest->add_option("--in", inputs, "input CSV (date,close)")->required();

  auto* simulate = app.add_subcommand("simulate", "simulate a model price series");
  for (const char* k : {"model", "length", "burn_in", "mu", "a0", "a1a", "a1b", "b1", "sigma",
                        "alpha", "c", "s0", "t0"}) {
    bind(simulate, k, "");
  }

  auto* fpt = app.add_subcommand("fpt", "first-passage-time distributions");
  fpt->add_option("--in", inputs, "input series CSV(s)")->required();
  fpt->add_flag("--naive", naive, "use the reference O(T^2) sampler");
  bind(fpt, "rho", "signed absolute level (single input only)");
  bind(fpt, "rho_mult", "barrier as multiple of daily std (default 5)");
  bind(fpt, "rho_abs", "barrier as absolute level, both signs");
  bind(fpt, "dm_method", "fitted | histogram");

  auto* leverage = app.add_subcommand("leverage", "lagged return/volatility correlation curve");
  leverage->add_option("--in", inputs, "input series CSV")->required();
  bind(leverage, "kind", "correlation | homogeneous | bouchaud");
  bind(leverage, "lag_min", "first lag (default 0)");
  bind(leverage, "lag_max", "last lag (default 250)");

  auto* fit = app.add_subcommand("fit", "fit a curve or sample file");
  fit->add_option("--in", inputs, "curve CSV (expdecay) or samples CSV (gengamma)")->required();
  bind(fit, "kind", "expdecay | gengamma");
  bind(fit, "fit_min", "first lag in fit range");
  bind(fit, "fit_max", "last lag in fit range");

  auto* permute = app.add_subcommand("permute", "leverage and FPT before/after permuting returns");
  permute->add_option("--in", inputs, "input series CSV (else simulate per config)");
  for (const char* k : {"model", "length", "mu", "a0", "a1a", "a1b", "b1", "sigma", "alpha", "c",
                        "s0", "rho_mult", "dm_method"}) {
    bind(permute, k, "");
  }

  auto* filter = app.add_subcommand("filter", "FPT pairs on wavelet high-pass filtrations");
  filter->add_option("--in", inputs, "input series CSV (else simulate per config)");
  for (const char* k : {"model", "length", "mu", "a0", "a1a", "a1b", "b1", "sigma", "alpha", "c",
                        "s0", "rho_mult", "ks", "levels", "family", "dm_method"}) {
    bind(filter, k, "");
  }

  auto* panel = app.add_subcommand("panel", "EGARCH leverage/FPT panel over a1a values");
  for (const char* k : {"a1a_list", "length", "mu", "a0", "a1b", "b1", "rho_mult", "lag_min",
                        "lag_max", "fit_min", "fit_max", "dm_method"}) {
    bind(panel, k, "");
  }

  auto* scan = app.add_subcommand("scan", "linear a1a/C scan of leverage amplitude and d_m");
  for (const char* k : {"model", "grid", "replicates", "length", "mu", "a0", "a1b", "b1",
                        "sigma", "alpha", "s0", "rho_mult", "fit_min", "fit_max", "dm_method"}) {
    bind(scan, k, "");
  }

  auto* report = app.add_subcommand("report", "verify the manifest in --out");

  // global flags (--config/--seed/--out) may follow the subcommand
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (seed_opt->count() > 0) global.seed = seed_flag;

  try {
    if (ingest->parsed()) {
      run_ingest(global, inputs);
    } else if (simulate->parsed()) {
      run_simulate(global, values);
    } else if (fpt->parsed()) {
      run_fpt(global, inputs, values, naive);
    } else if (leverage->parsed()) {
      run_leverage(global, inputs.at(0), values);
    } else if (fit->parsed()) {
      run_fit(global, inputs.at(0), values);
    } else if (permute->parsed()) {
      gl::Config cfg = merge_config(global, values);
      if (!inputs.empty()) cfg["series_csv"] = inputs[0];
      gl::run_permutation_test(cfg, global.out_dir);
      std::cout << "permute: wrote results to " << global.out_dir << "\n";
    } else if (filter->parsed()) {
      gl::Config cfg = merge_config(global, values);
      if (!inputs.empty()) cfg["series_csv"] = inputs[0];
      gl::run_filtration_test(cfg, global.out_dir);
      std::cout << "filter: wrote results to " << global.out_dir << "\n";
    } else if (panel->parsed()) {
      gl::run_egarch_panel(merge_config(global, values), global.out_dir);
      std::cout << "panel: wrote results to " << global.out_dir << "\n";
    } else if (scan->parsed()) {
      const gl::ScanResult res = gl::run_scan(merge_config(global, values), global.out_dir);
      std::cout << "scan: A slope " << fmt(res.fit_a.slope) << " (r2 " << fmt(res.fit_a.r_squared)
                << "), d_m slope " << fmt(res.fit_dm.slope) << " (r2 "
                << fmt(res.fit_dm.r_squared) << ")\n";
    } else if (report->parsed()) {
      run_report(global);
    }
  } catch (const gl::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
