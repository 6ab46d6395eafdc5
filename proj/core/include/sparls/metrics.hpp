// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sparls/types.hpp"

namespace sparls {

// ||w_hat - w_true||^2 / ||w_true||^2.  Throws std::domain_error when
// w_true is zero.
double nmse(const CVec& w_hat, const CVec& w_true);

double to_db(double linear);
double from_db(double db);

// Per-timestep squared error and reference power of one trial; numerator and
// denominator are kept separate so trials aggregate as a ratio of means.
struct NmseTrace {
  std::vector<double> err2;  // ||w_hat(t) - w_true(t)||^2
  std::vector<double> ref2;  // ||w_true(t)||^2

  int length() const { return static_cast<int>(err2.size()); }
};

// Monte Carlo aggregate of NMSE trajectories.  The pointwise curve is
// mean_trials(err2) / mean_trials(ref2) at each t (the ratio-of-means
// realization of E||w_hat-w||^2 / E||w||^2), converted to dB after averaging.
// Steady-state windows are the last `window` samples before switch_time and
// the last `window` samples of the stream.
struct TraceSummary {
  std::vector<double> nmse_linear;
  std::vector<double> nmse_db;
  double steady_pre_db = 0.0;   // NaN when no switch window exists
  double steady_post_db = 0.0;
  // Per-trial steady-state NMSE (post window) statistics across trials.
  double trial_mean_post_db = 0.0;
  double trial_std_db = 0.0;
};

TraceSummary mc_aggregate(const std::vector<NmseTrace>& trials, int switch_time,
                          int window = 100);

// Summary of signed prediction errors over [window_start, end], 1-based
// inclusive window start.  Quantiles use linear interpolation between order
// statistics: q(p) sits at rank p*(n-1) of the sorted sample.  Std is the
// population standard deviation.
struct PredErrorStats {
  double mean = 0.0;
  double stddev = 0.0;
  double quantile_2_5 = 0.0;
  double quantile_97_5 = 0.0;
};

PredErrorStats pred_error_stats(const std::vector<double>& errors,
                                int window_start);

// Linear-interpolation empirical quantile of an unsorted sample, p in [0, 1].
double quantile_linear(std::vector<double> values, double p);

}  // namespace sparls
