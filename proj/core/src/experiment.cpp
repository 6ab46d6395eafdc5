// SPDX-License-Identifier: Apache-2.0
#include "sparls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sparls/csv.hpp"
#include "sparls/svg_plot.hpp"
#include "sparls/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sparls {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Jakes: return "jakes";
    case Scenario::Volterra: return "volterra";
    case Scenario::Mts: return "mts";
    case Scenario::StaticDiag: return "static_diag";
  }
  return "unknown";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Rls: return "rls";
    case Algorithm::SparlsL1: return "sparls_l1";
    case Algorithm::SparlsMcp: return "sparls_mcp";
    case Algorithm::GroupLasso: return "group_lasso";
    case Algorithm::GroupMcp: return "group_mcp";
  }
  return "unknown";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  const std::string s = lower(name);
  if (s == "jakes") return Scenario::Jakes;
  if (s == "volterra") return Scenario::Volterra;
  if (s == "mts") return Scenario::Mts;
  if (s == "static_diag" || s == "static-diag" || s == "diag") return Scenario::StaticDiag;
  throw std::invalid_argument("unknown scenario: " + name);
}

Algorithm parse_algorithm(const std::string& name) {
  const std::string s = lower(name);
  if (s == "rls") return Algorithm::Rls;
  if (s == "sparls_l1" || s == "sparls-l1") return Algorithm::SparlsL1;
  if (s == "sparls_mcp" || s == "sparls-mcp") return Algorithm::SparlsMcp;
  if (s == "group_lasso" || s == "group-lasso") return Algorithm::GroupLasso;
  if (s == "group_mcp" || s == "group-mcp") return Algorithm::GroupMcp;
  throw std::invalid_argument("unknown algorithm: " + name);
}

double ExperimentConfig::resolved_gamma() const {
  if (gamma >= 0.0) return gamma;
  switch (scenario) {
    case Scenario::Jakes: return snr_db >= 25.0 ? 30.0 : 10.0;
    case Scenario::Volterra: return snr_db >= 25.0 ? 5.0 : 1.0;
    case Scenario::Mts: return 10.0;
    case Scenario::StaticDiag: return -1.0;  // chosen inside the feasible window
  }
  return 0.0;
}

double ExperimentConfig::resolved_alpha() const {
  if (alpha > 0.0) return alpha;
  return scenario == Scenario::Mts ? 5.0 : 0.5;
}

int ExperimentConfig::resolved_m() const {
  if (m > 0) return m;
  switch (scenario) {
    case Scenario::Jakes: return 100;
    case Scenario::Volterra: return kVolterraDim;
    case Scenario::Mts: return 16 * spline_v;
    case Scenario::StaticDiag: return 20;
  }
  return 0;
}

int ExperimentConfig::resolved_n() const {
  if (n > 0) return n;
  return scenario == Scenario::StaticDiag ? 10 * resolved_m() : 1000;
}

int ExperimentConfig::resolved_k() const {
  if (k_sparse > 0) return k_sparse;
  switch (scenario) {
    case Scenario::Jakes: return 5;
    case Scenario::StaticDiag: return 3;
    default: return 4;
  }
}

std::vector<Algorithm> ExperimentConfig::resolved_algorithms() const {
  if (!algorithms.empty()) return algorithms;
  if (scenario == Scenario::Mts) return {Algorithm::GroupLasso, Algorithm::GroupMcp};
  return {Algorithm::Rls, Algorithm::SparlsL1, Algorithm::SparlsMcp};
}

void ExperimentConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("config: lambda must be in (0, 1]");
  if (alpha == 0.0)
    throw std::invalid_argument("config: alpha must be > 0 (negative = scenario default)");
  if (!(jakes_input_var > 0.0))
    throw std::invalid_argument("config: jakes_input_var must be > 0");
  if (!(volterra_coeff_scale > 0.0))
    throw std::invalid_argument("config: volterra_coeff_scale must be > 0");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (em_iters < 1) throw std::invalid_argument("config: K must be >= 1");
  if (spline_v < 3) throw std::invalid_argument("config: spline_v must be >= 3");
  if (steady_window < 1) throw std::invalid_argument("config: steady_window must be >= 1");
  if (pred_window_start < 1)
    throw std::invalid_argument("config: pred_window_start must be >= 1");
  if (scenario == Scenario::Volterra && m > 0 && m != kVolterraDim)
    throw std::invalid_argument("config: the Volterra channel has 72 features");
  for (Algorithm a : resolved_algorithms()) {
    const bool grouped = a == Algorithm::GroupLasso || a == Algorithm::GroupMcp;
    if (grouped && scenario != Scenario::Mts)
      throw std::invalid_argument("config: group algorithms apply to the mts scenario only");
  }
}

namespace {

int switch_time_for(int n) { return n >= 1000 ? 501 : n / 2 + 1; }

// Bounded worker pool over trial indices; rethrows the first worker error.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = to_string(cfg.scenario);
  json algos = json::array();
  for (Algorithm a : cfg.resolved_algorithms()) algos.push_back(to_string(a));
  j["algorithms"] = algos;
  j["snr_db"] = cfg.snr_db;
  j["lambda"] = cfg.lambda;
  j["gamma"] = cfg.resolved_gamma();
  j["alpha"] = cfg.resolved_alpha();
  j["em_iters"] = cfg.em_iters;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["n"] = cfg.resolved_n();
  j["m"] = cfg.resolved_m();
  j["k_sparse"] = cfg.resolved_k();
  j["xi2_safety"] = cfg.xi2_safety;
  j["rls_delta"] = cfg.rls_delta;
  j["spline_v"] = cfg.spline_v;
  j["jakes_input_var"] = cfg.jakes_input_var;
  j["volterra_coeff_scale"] = cfg.volterra_coeff_scale;
  j["volterra_normalize_power"] = cfg.volterra_normalize_power;
  j["steady_window"] = cfg.steady_window;
  j["pred_window_start"] = cfg.pred_window_start;
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

Stream make_stream(const ExperimentConfig& cfg, int trial) {
  const std::uint64_t trial_seed = derive_trial_seed(cfg.seed, trial);
  switch (cfg.scenario) {
    case Scenario::Jakes: {
      JakesConfig jc;
      jc.M = cfg.resolved_m();
      jc.k_sparse = cfg.resolved_k();
      jc.n = cfg.resolved_n();
      jc.switch_time = switch_time_for(jc.n);
      jc.snr_db = cfg.snr_db;
      jc.seed = trial_seed;
      jc.input_elem_var = cfg.jakes_input_var;
      return jakes_stream(jc);
    }
    case Scenario::Volterra: {
      VolterraConfig vc;
      vc.n = cfg.resolved_n();
      vc.switch_time = switch_time_for(vc.n);
      vc.snr_db = cfg.snr_db;
      vc.seed = trial_seed;
      vc.normalize_power = cfg.volterra_normalize_power;
      vc.coeff_scale = cfg.volterra_coeff_scale;
      return volterra_stream(vc);
    }
    case Scenario::Mts: {
      MTSConfig mc;
      mc.n = cfg.resolved_n();
      mc.v = cfg.spline_v;
      mc.seed = trial_seed;
      return mts_stream(mc);
    }
    case Scenario::StaticDiag:
      throw std::invalid_argument("make_stream: static_diag is not stream-based");
  }
  throw std::logic_error("make_stream: unreachable");
}

TrialOutput run_algorithm(const Stream& stream, Algorithm algo,
                          const ExperimentConfig& cfg, bool record_path) {
  const int n = stream.length();
  if (n < 1) throw std::invalid_argument("run_algorithm: empty stream");
  const int m = stream.dim();
  const bool truth = stream.has_w_true();

  TrialOutput out;
  out.pred_errors.reserve(static_cast<size_t>(n));
  if (truth) {
    out.nmse.err2.reserve(static_cast<size_t>(n));
    out.nmse.ref2.reserve(static_cast<size_t>(n));
  }

  auto record = [&](const CVec& w_hat, int t) {
    if (truth) {
      out.nmse.err2.push_back((w_hat - stream.w_true[static_cast<size_t>(t)]).squaredNorm());
      out.nmse.ref2.push_back(stream.w_true[static_cast<size_t>(t)].squaredNorm());
    }
    if (record_path) out.w_path.push_back(w_hat);
  };

  if (algo == Algorithm::Rls) {
    RlsState state = rls_init(m, cfg.lambda, cfg.rls_delta);
    for (int t = 0; t < n; ++t) {
      out.pred_errors.push_back(
          std::real(stream.d[static_cast<size_t>(t)] -
                    state.w_hat.dot(stream.x[static_cast<size_t>(t)])));
      rls_step(state, stream.x[static_cast<size_t>(t)], stream.d[static_cast<size_t>(t)]);
      record(state.w_hat, t);
    }
    return out;
  }

  std::optional<GroupLayout> layout;
  if (algo == Algorithm::GroupLasso || algo == Algorithm::GroupMcp) {
    if (stream.meta.num_groups < 1)
      throw std::invalid_argument("run_algorithm: stream carries no group structure");
    layout = GroupLayout::uniform(stream.meta.num_groups, stream.meta.group_size);
  }
  const bool soft = algo == Algorithm::SparlsL1 || algo == Algorithm::GroupLasso;

  // The mts design has no per-observation noise model inside the estimator;
  // its weighted LS cost runs at unit sigma2 and gamma carries the scale.
  double sigma2 = stream.meta.scenario == "mts" ? 1.0 : stream.meta.sigma2;
  if (!(sigma2 > 0.0)) sigma2 = 1.0;  // noise-free stream: scale drops out

  // Latent-scale bound: the PSD constraint must hold at every t.  For
  // heavy-tailed regressors (third-order features) the leading eigenvalue of
  // the weighted Gram spikes between any fixed calibration checkpoints, so
  // the harness supplies the bound from a pre-pass that tracks lambda_1(t)
  // over the whole simulated stream.
  out.xi2 = cfg.xi2_safety * sigma2 /
            max_weighted_gram_eigenvalue(stream.x, cfg.lambda);

  PenaltyConfig penalty;
  penalty.alpha = cfg.resolved_alpha();
  penalty.gamma = cfg.resolved_gamma();
  penalty.xi2 = out.xi2;
  penalty.sigma2 = sigma2;

  out.pred_errors.push_back(std::real(stream.d[0]));  // w_hat(0) = 0
  FilterState state = sparls_mcp_init(stream.x[0], stream.d[0], penalty,
                                      cfg.em_iters, cfg.lambda);
  record(state.w_hat, 0);
  for (int t = 1; t < n; ++t) {
    out.pred_errors.push_back(
        std::real(stream.d[static_cast<size_t>(t)] -
                  state.w_hat.dot(stream.x[static_cast<size_t>(t)])));
    if (soft)
      sparls_l1_step(state, stream.x[static_cast<size_t>(t)],
                     stream.d[static_cast<size_t>(t)], layout);
    else
      sparls_mcp_step(state, stream.x[static_cast<size_t>(t)],
                      stream.d[static_cast<size_t>(t)], layout);
    record(state.w_hat, t);
  }
  return out;
}

namespace {

struct TrialBundle {
  std::map<Algorithm, TrialOutput> by_algo;
  std::uint64_t seed = 0;
  double feature_scale = 1.0;
  int switch_time = 0;
};

void write_nmse_csv(const std::string& path, const TraceSummary& summary) {
  csv::Writer out(path);
  out.header({"t", "nmse_linear", "nmse_db"});
  for (size_t t = 0; t < summary.nmse_linear.size(); ++t)
    out.row({static_cast<double>(t + 1), summary.nmse_linear[t], summary.nmse_db[t]});
}

void write_pred_error_csvs(const std::string& dir, Algorithm algo,
                           const std::vector<std::vector<double>>& per_trial_errors,
                           ExperimentResult& result,
                           const ExperimentConfig& cfg) {
  std::vector<PredErrorStats> per_trial;
  std::vector<double> pooled;
  for (const auto& errors : per_trial_errors) {
    per_trial.push_back(pred_error_stats(errors, cfg.pred_window_start));
    pooled.insert(pooled.end(),
                  errors.begin() + (cfg.pred_window_start - 1), errors.end());
  }
  result.pred_stats_per_trial[algo] = per_trial;
  // Pooled Table-style statistics over every seed's window.
  PredErrorStats pooled_stats = pred_error_stats(pooled, 1);
  result.pred_stats_pooled[algo] = pooled_stats;

  csv::Writer trials_csv(dir + "/pred_error_stats_trials_" + to_string(algo) + ".csv");
  trials_csv.header({"trial", "mean", "std", "quantile_2_5", "quantile_97_5"});
  for (size_t k = 0; k < per_trial.size(); ++k)
    trials_csv.row({static_cast<double>(k), per_trial[k].mean, per_trial[k].stddev,
                    per_trial[k].quantile_2_5, per_trial[k].quantile_97_5});
}

void write_spline_trajectory(const std::string& dir, Algorithm algo,
                             const std::vector<CVec>& w_path, bool write_plot,
                             std::vector<std::string>& files) {
  if (w_path.empty()) return;
  const int m = static_cast<int>(w_path.front().size());
  const std::string path = dir + "/spline_coeffs_" + to_string(algo) + ".csv";
  csv::Writer out(path);
  std::vector<std::string> header = {"t"};
  for (int j = 0; j < m; ++j) header.push_back("w_" + std::to_string(j));
  out.header(header);
  std::vector<double> row(static_cast<size_t>(m) + 1);
  for (size_t t = 0; t < w_path.size(); ++t) {
    row[0] = static_cast<double>(t + 1);
    for (int j = 0; j < m; ++j) row[static_cast<size_t>(j) + 1] = w_path[t][j].real();
    out.row(row);
  }
  files.push_back(path);

  if (!write_plot) return;
  const int stride = std::max<size_t>(1, w_path.size() / 250);
  std::vector<plot::Series> series;
  for (int j = 0; j < m; ++j) {
    plot::Series s;
    for (size_t t = 0; t < w_path.size(); t += static_cast<size_t>(stride)) {
      s.x.push_back(static_cast<double>(t + 1));
      s.y.push_back(w_path[t][j].real());
    }
    series.push_back(std::move(s));
  }
  const std::string svg = dir + "/spline_coeffs_" + to_string(algo) + ".svg";
  plot::write_line_chart(svg, "Spline coefficients (" + to_string(algo) + ")",
                         "t", "coefficient", series);
  files.push_back(svg);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.scenario == Scenario::StaticDiag) {
    run_static_diag(cfg);
    ExperimentResult result;
    result.files.push_back(cfg.output_dir + "/diag_report.json");
    return result;
  }

  fs::create_directories(cfg.output_dir);
  const std::vector<Algorithm> algos = cfg.resolved_algorithms();
  const bool mts = cfg.scenario == Scenario::Mts;

  std::vector<TrialBundle> bundles(static_cast<size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    Stream stream = make_stream(cfg, trial);
    TrialBundle& bundle = bundles[static_cast<size_t>(trial)];
    bundle.seed = stream.meta.seed;
    bundle.feature_scale = stream.meta.feature_scale;
    bundle.switch_time = stream.meta.switch_time;
    for (Algorithm algo : algos) {
      const bool record_path = mts && trial == 0;
      bundle.by_algo[algo] = run_algorithm(stream, algo, cfg, record_path);
    }
    if (cfg.dump_streams && trial == 0)
      write_stream_csv(stream, cfg.output_dir + "/stream_trial0.csv");
  });

  ExperimentResult result;
  result.algorithms = algos;
  const bool truth = !mts;

  json summary_json;
  std::vector<std::string> summary_header = {"algorithm"};
  csv::Writer summary_csv(cfg.output_dir + "/summary.csv");
  if (truth) {
    summary_csv.header({"algorithm", "steady_pre_db", "steady_post_db",
                        "trial_mean_post_db", "trial_std_db"});
  } else {
    summary_csv.header({"algorithm", "pooled_mean", "pooled_std",
                        "pooled_quantile_2_5", "pooled_quantile_97_5"});
  }

  std::vector<plot::Series> nmse_series;
  for (Algorithm algo : algos) {
    const std::string name = to_string(algo);
    if (truth) {
      std::vector<NmseTrace> traces;
      traces.reserve(static_cast<size_t>(cfg.trials));
      for (const auto& bundle : bundles) traces.push_back(bundle.by_algo.at(algo).nmse);
      TraceSummary summary =
          mc_aggregate(traces, bundles.front().switch_time, cfg.steady_window);
      const std::string path = cfg.output_dir + "/nmse_" + name + ".csv";
      write_nmse_csv(path, summary);
      result.files.push_back(path);
      summary_csv.raw_row({name, csv::format(summary.steady_pre_db),
                           csv::format(summary.steady_post_db),
                           csv::format(summary.trial_mean_post_db),
                           csv::format(summary.trial_std_db)});
      summary_json["algorithms"][name] = {
          {"steady_pre_db", summary.steady_pre_db},
          {"steady_post_db", summary.steady_post_db},
          {"trial_mean_post_db", summary.trial_mean_post_db},
          {"trial_std_db", summary.trial_std_db}};
      if (cfg.write_plots) {
        plot::Series s;
        s.label = name;
        for (size_t t = 0; t < summary.nmse_db.size(); ++t) {
          s.x.push_back(static_cast<double>(t + 1));
          s.y.push_back(summary.nmse_db[t]);
        }
        nmse_series.push_back(std::move(s));
      }
      result.nmse[algo] = std::move(summary);
    } else {
      std::vector<std::vector<double>> errors;
      errors.reserve(static_cast<size_t>(cfg.trials));
      for (const auto& bundle : bundles)
        errors.push_back(bundle.by_algo.at(algo).pred_errors);
      write_pred_error_csvs(cfg.output_dir, algo, errors, result, cfg);
      result.files.push_back(cfg.output_dir + "/pred_error_stats_trials_" + name + ".csv");
      const PredErrorStats& pooled = result.pred_stats_pooled.at(algo);
      summary_csv.raw_row({name, csv::format(pooled.mean), csv::format(pooled.stddev),
                           csv::format(pooled.quantile_2_5),
                           csv::format(pooled.quantile_97_5)});
      summary_json["algorithms"][name] = {{"pooled_mean", pooled.mean},
                                          {"pooled_std", pooled.stddev},
                                          {"pooled_quantile_2_5", pooled.quantile_2_5},
                                          {"pooled_quantile_97_5", pooled.quantile_97_5}};
      write_spline_trajectory(cfg.output_dir, algo,
                              bundles.front().by_algo.at(algo).w_path,
                              cfg.write_plots, result.files);
    }
  }
  result.files.push_back(cfg.output_dir + "/summary.csv");

  // Steady-state dB gaps between algorithm pairs.
  if (truth) {
    auto gap = [&](Algorithm a, Algorithm b) {
      return result.nmse.at(a).steady_post_db - result.nmse.at(b).steady_post_db;
    };
    auto have = [&](Algorithm a) { return result.nmse.count(a) > 0; };
    if (have(Algorithm::Rls) && have(Algorithm::SparlsMcp))
      summary_json["gaps_post_db"]["rls_minus_sparls_mcp"] =
          gap(Algorithm::Rls, Algorithm::SparlsMcp);
    if (have(Algorithm::Rls) && have(Algorithm::SparlsL1))
      summary_json["gaps_post_db"]["rls_minus_sparls_l1"] =
          gap(Algorithm::Rls, Algorithm::SparlsL1);
    if (have(Algorithm::SparlsL1) && have(Algorithm::SparlsMcp))
      summary_json["gaps_post_db"]["sparls_l1_minus_sparls_mcp"] =
          gap(Algorithm::SparlsL1, Algorithm::SparlsMcp);
  }
  write_json_file(summary_json, cfg.output_dir + "/summary.json");
  result.files.push_back(cfg.output_dir + "/summary.json");

  if (cfg.write_plots && !nmse_series.empty()) {
    const std::string path = cfg.output_dir + "/nmse_db.svg";
    plot::write_line_chart(path,
                           to_string(cfg.scenario) + " tracking, SNR " +
                               csv::format(cfg.snr_db) + " dB",
                           "t", "NMSE [dB]", nmse_series);
    result.files.push_back(path);
  }

  json manifest;
  manifest["library_version"] = kVersion;
  manifest["config"] = config_to_json(cfg);
  json seeds = json::array();
  for (const auto& bundle : bundles) seeds.push_back(bundle.seed);
  manifest["trial_seeds"] = seeds;
  if (cfg.scenario == Scenario::Volterra) {
    json scales = json::array();
    for (const auto& bundle : bundles) scales.push_back(bundle.feature_scale);
    manifest["feature_scales"] = scales;
  }
  {
    json xi2s = json::array();
    for (const auto& bundle : bundles) {
      for (Algorithm algo : algos) {
        if (algo == Algorithm::Rls) continue;
        xi2s.push_back(bundle.by_algo.at(algo).xi2);
        break;
      }
    }
    if (!xi2s.empty()) manifest["trial_xi2"] = xi2s;
  }
  manifest["outputs"] = result.files;
  // The only non-reproducible field, kept isolated here.
  manifest["generated_at_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  write_json_file(manifest, cfg.output_dir + "/manifest.json");
  result.files.push_back(cfg.output_dir + "/manifest.json");
  return result;
}

void write_prox_table(const std::string& path, double beta, double alpha,
                      double r_lo, double r_hi, int steps, TiePolicy tie) {
  if (steps < 2) throw std::invalid_argument("write_prox_table: need >= 2 grid points");
  csv::Writer out(path);
  out.header({"r", "prox"});
  for (int i = 0; i < steps; ++i) {
    const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) /
                                static_cast<double>(steps - 1);
    out.row({r, prox_scalar(Complex(r, 0.0), beta, alpha, tie).real()});
  }
}

std::vector<GammaSweepPoint> gamma_sweep(const ExperimentConfig& cfg,
                                         double gamma_lo, double gamma_hi,
                                         int points) {
  if (!(gamma_lo > 0.0 && gamma_hi > gamma_lo))
    throw std::invalid_argument("gamma_sweep: need 0 < gamma_lo < gamma_hi");
  if (points < 2) throw std::invalid_argument("gamma_sweep: need >= 2 grid points");
  cfg.validate();
  if (cfg.scenario == Scenario::StaticDiag)
    throw std::invalid_argument("gamma_sweep: not defined for static_diag");

  std::vector<Algorithm> algos;
  for (Algorithm a : cfg.resolved_algorithms())
    if (a != Algorithm::Rls) algos.push_back(a);

  // Streams are gamma-independent; generate once.
  std::vector<Stream> streams;
  streams.reserve(static_cast<size_t>(cfg.trials));
  for (int trial = 0; trial < cfg.trials; ++trial)
    streams.push_back(make_stream(cfg, trial));
  const bool truth = streams.front().has_w_true();

  std::vector<GammaSweepPoint> grid;
  for (int i = 0; i < points; ++i) {
    const double g = gamma_lo * std::pow(gamma_hi / gamma_lo,
                                         static_cast<double>(i) /
                                             static_cast<double>(points - 1));
    for (Algorithm algo : algos) grid.push_back({g, algo, 0.0});
  }

  parallel_for(static_cast<int>(grid.size()), cfg.threads, [&](int idx) {
    GammaSweepPoint& point = grid[static_cast<size_t>(idx)];
    ExperimentConfig local = cfg;
    local.gamma = point.gamma;
    if (truth) {
      std::vector<NmseTrace> traces;
      for (const Stream& stream : streams)
        traces.push_back(run_algorithm(stream, point.algorithm, local).nmse);
      point.metric_db =
          mc_aggregate(traces, streams.front().meta.switch_time, cfg.steady_window)
              .steady_post_db;
    } else {
      double acc = 0.0;
      long count = 0;
      for (const Stream& stream : streams) {
        const auto errors = run_algorithm(stream, point.algorithm, local).pred_errors;
        for (size_t t = static_cast<size_t>(cfg.pred_window_start) - 1;
             t < errors.size(); ++t) {
          acc += errors[t] * errors[t];
          ++count;
        }
      }
      point.metric_db = to_db(acc / static_cast<double>(count));
    }
  });

  fs::create_directories(cfg.output_dir);
  csv::Writer out(cfg.output_dir + "/gamma_sweep.csv");
  out.header({"gamma", "algorithm", "metric_db"});
  for (const auto& point : grid)
    out.raw_row({csv::format(point.gamma), to_string(point.algorithm),
                 csv::format(point.metric_db)});
  return grid;
}

DiagResult run_static_diag(const ExperimentConfig& cfg) {
  cfg.validate();
  const int m = cfg.resolved_m();
  const int n = cfg.scenario == Scenario::StaticDiag ? cfg.resolved_n() : 10 * m;
  const int k = std::min(cfg.resolved_k(), m);

  std::mt19937_64 rng(derive_trial_seed(cfg.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(-3.141592653589793, 3.141592653589793);
  auto cg = [&](double var) {
    const double s = std::sqrt(0.5 * var);
    const double re = normal(rng);
    const double im = normal(rng);
    return Complex(s * re, s * im);
  };

  CMat X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = cg(1.0);

  CVec w_true = CVec::Zero(m);
  {
    std::vector<int> idx(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) idx[static_cast<size_t>(j)] = j;
    for (int j = 0; j < k; ++j) {
      std::uniform_int_distribution<int> pick(j, m - 1);
      std::swap(idx[static_cast<size_t>(j)], idx[static_cast<size_t>(pick(rng))]);
      w_true[idx[static_cast<size_t>(j)]] = std::polar(1.0, phase(rng));
    }
  }
  CVec noise_unit(n);
  for (int i = 0; i < n; ++i) noise_unit[i] = cg(1.0);

  const double alpha1 = rsc_alpha1(X, cfg.lambda);
  const double alpha_used =
      std::min(cfg.resolved_alpha(), 0.75 * (4.0 / 3.0) * alpha1);

  // Gram spectrum and the unit-noise correlation, to place sigma so the
  // feasible gamma window is nonempty with margin 4.
  DiagResult result;
  {
    ErrorBoundReport probe =
        theorem2_bound(X, cfg.lambda, noise_unit, w_true, alpha_used, alpha1, 1.0);
    const double u = probe.noise_infnorm;  // ||X^H Lambda^{1/2} eps_unit||_inf
    const double sigma =
        0.25 * alpha_used * probe.rho_min / (4.0 * u * probe.rho_max);
    result.sigma2 = sigma * sigma;
    const CVec eps = sigma * noise_unit;
    result.report = theorem2_bound(X, cfg.lambda, eps, w_true, alpha_used, alpha1,
                                   result.sigma2);
    result.gamma_used =
        cfg.gamma >= 0.0 ? cfg.gamma : 2.0 * result.report.gamma_lower;
    result.alpha_used = alpha_used;

    BatchProblem problem;
    problem.X = X;
    problem.d = X * w_true + eps;
    problem.lambda = cfg.lambda;
    problem.sigma2 = result.sigma2;

    result.xi2 = select_xi2(X, cfg.lambda, result.sigma2, 0.999);
    PenaltyConfig penalty;
    penalty.alpha = alpha_used;
    penalty.gamma = result.gamma_used;
    penalty.xi2 = result.xi2;
    penalty.sigma2 = result.sigma2;
    penalty.validate();

    result.report.C = lipschitz_C(result.report.rho_min, alpha_used,
                                  result.gamma_used, result.sigma2, result.xi2,
                                  BetaConvention::Xi2);

    // Fixed point by direct iteration of the EM map.
    const CMat B = batch_B(problem, result.xi2);
    const CVec mu = batch_mu(problem, result.xi2);
    CVec w_star = CVec::Zero(m);
    for (int it = 0; it < 20000; ++it) {
      CVec next = prox_vector(em_e_step(B, mu, w_star), penalty.beta(),
                              alpha_used, penalty.tie_policy);
      const double move = (next - w_star).norm();
      w_star = std::move(next);
      if (move < 1e-12) break;
    }

    const int audit_iters = std::max(cfg.em_iters, 25);
    auto [w_final, trace] =
        spals_mcp(problem, penalty, CVec::Zero(m), audit_iters);
    result.audit = contraction_audit(trace, w_star, result.report.C);

    result.measured_error = (w_star - w_true).norm();
    result.em_error_final = (w_final - w_star).norm();
    result.em_error_bound = std::pow(result.report.C, audit_iters) * w_star.norm();
    result.em_bound_holds = result.em_error_final <= result.em_error_bound + 1e-9;
    result.relax_bound_holds =
        result.measured_error <= result.report.relax_bound + 1e-6;
  }

  fs::create_directories(cfg.output_dir);
  json j;
  j["library_version"] = kVersion;
  j["config"] = config_to_json(cfg);
  j["alpha_used"] = result.alpha_used;
  j["gamma_used"] = result.gamma_used;
  j["sigma2"] = result.sigma2;
  j["xi2"] = result.xi2;
  j["report"] = {{"C", result.report.C},
                 {"rho_min", result.report.rho_min},
                 {"rho_max", result.report.rho_max},
                 {"alpha1", result.report.alpha1},
                 {"relax_bound", result.report.relax_bound},
                 {"gamma_feasible", result.report.gamma_feasible},
                 {"gamma_lower", result.report.gamma_lower},
                 {"gamma_upper", result.report.gamma_upper},
                 {"noise_infnorm", result.report.noise_infnorm},
                 {"s", result.report.s}};
  j["contraction_audit"] = {{"passed", result.audit.passed},
                            {"C", result.audit.C},
                            {"ratios", result.audit.ratios},
                            {"distances", result.audit.distances}};
  j["measured_error"] = result.measured_error;
  j["relax_bound_holds"] = result.relax_bound_holds;
  j["em_error_final"] = result.em_error_final;
  j["em_error_bound"] = result.em_error_bound;
  j["em_bound_holds"] = result.em_bound_holds;
  write_json_file(j, cfg.output_dir + "/diag_report.json");
  return result;
}

}  // namespace sparls
