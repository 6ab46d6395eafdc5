// SPDX-License-Identifier: Apache-2.0
#include "sparls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparls {

double nmse(const CVec& w_hat, const CVec& w_true) {
  if (w_hat.size() != w_true.size())
    throw std::invalid_argument("nmse: dimension mismatch");
  const double ref = w_true.squaredNorm();
  if (ref == 0.0) throw std::domain_error("nmse: w_true has zero norm");
  return (w_hat - w_true).squaredNorm() / ref;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

namespace {

double window_mean(const std::vector<double>& v, int begin, int end) {
  double acc = 0.0;
  for (int t = begin; t < end; ++t) acc += v[static_cast<size_t>(t)];
  return acc / static_cast<double>(end - begin);
}

}  // namespace

TraceSummary mc_aggregate(const std::vector<NmseTrace>& trials, int switch_time,
                          int window) {
  if (trials.empty()) throw std::invalid_argument("mc_aggregate: no trials");
  const int n = trials.front().length();
  for (const auto& tr : trials)
    if (tr.length() != n || tr.ref2.size() != tr.err2.size())
      throw std::invalid_argument("mc_aggregate: trace length mismatch");

  TraceSummary summary;
  summary.nmse_linear.resize(static_cast<size_t>(n));
  summary.nmse_db.resize(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) {
    double num = 0.0, den = 0.0;
    for (const auto& tr : trials) {
      num += tr.err2[static_cast<size_t>(t)];
      den += tr.ref2[static_cast<size_t>(t)];
    }
    const double value = num / den;
    summary.nmse_linear[static_cast<size_t>(t)] = value;
    summary.nmse_db[static_cast<size_t>(t)] = to_db(value);
  }

  const int post_begin = std::max(0, n - window);
  summary.steady_post_db = to_db(window_mean(summary.nmse_linear, post_begin, n));
  if (switch_time >= 2 && switch_time <= n) {
    const int pre_end = switch_time - 1;  // last sample before the switch
    const int pre_begin = std::max(0, pre_end - window);
    summary.steady_pre_db = to_db(window_mean(summary.nmse_linear, pre_begin, pre_end));
  } else {
    summary.steady_pre_db = std::numeric_limits<double>::quiet_NaN();
  }

  // Per-trial post-window NMSE, in dB, across trials.
  std::vector<double> per_trial;
  per_trial.reserve(trials.size());
  for (const auto& tr : trials) {
    double num = 0.0, den = 0.0;
    for (int t = post_begin; t < n; ++t) {
      num += tr.err2[static_cast<size_t>(t)];
      den += tr.ref2[static_cast<size_t>(t)];
    }
    per_trial.push_back(to_db(num / den));
  }
  double mean = 0.0;
  for (double v : per_trial) mean += v;
  mean /= static_cast<double>(per_trial.size());
  double var = 0.0;
  for (double v : per_trial) var += (v - mean) * (v - mean);
  summary.trial_mean_post_db = mean;
  summary.trial_std_db = std::sqrt(var / static_cast<double>(per_trial.size()));
  return summary;
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile_linear: empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("quantile_linear: p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

PredErrorStats pred_error_stats(const std::vector<double>& errors,
                                int window_start) {
  if (window_start < 1) throw std::invalid_argument("pred_error_stats: window_start is 1-based");
  if (static_cast<size_t>(window_start) > errors.size())
    throw std::invalid_argument("pred_error_stats: empty window");
  std::vector<double> window(errors.begin() + (window_start - 1), errors.end());

  PredErrorStats stats;
  for (double e : window) stats.mean += e;
  stats.mean /= static_cast<double>(window.size());
  double var = 0.0;
  for (double e : window) var += (e - stats.mean) * (e - stats.mean);
  stats.stddev = std::sqrt(var / static_cast<double>(window.size()));
  stats.quantile_2_5 = quantile_linear(window, 0.025);
  stats.quantile_97_5 = quantile_linear(window, 0.975);
  return stats;
}

}  // namespace sparls
