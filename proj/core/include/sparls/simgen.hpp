// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparls/penalty.hpp"
#include "sparls/types.hpp"

namespace sparls {

// Rayleigh-fading tap stream: M taps, k_sparse active, each active tap an
// independent sum-of-sinusoids fading envelope with Doppler shift f_d.  At
// switch_time one active tap mutes and one inactive tap activates.
struct JakesConfig {
  int M = 100;
  int k_sparse = 5;
  int n = 1000;
  double f_d = 1e-4;
  int n_paths = 64;       // propagation paths per tap
  int switch_time = 501;  // 1-based sample index; 0 disables the switch
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  // Per-element input variance; 0 selects 1/M (unit aggregate regressor
  // power).  The sample SNR then sits at snr_db + 10 log10(M * var / M) =
  // snr_db + 10 log10(var) relative to the E||w||^2 / sigma^2 definition.
  double input_elem_var = 0.0;
};

// Sparse third-order Volterra channel: memory 7, 72 features (8 first-order
// lags followed by the 64 products x^2(i-m) conj(x(i-n)) in row-major (m,n)
// order), 4 active coefficients before and after the switch.
struct VolterraConfig {
  int memory = 7;
  int n = 1000;
  int switch_time = 501;
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  // Global feature scale; the true weights absorb 1/scale so d is unchanged.
  // fixed_scale > 0 applies that value directly; otherwise normalize_power
  // calibrates the scale so the empirical aggregate feature power over the
  // prefix is 1, and the default (both off) leaves raw CN(0,1) products.
  // The scale used is recorded in the stream metadata.
  double fixed_scale = 0.0;
  bool normalize_power = false;
  int calib_len = 200;
  // Standard deviation multiplier on the CN(0,1) kernel coefficients.  Signal
  // and noise grow together (sigma2 follows E||w||^2), which leaves the
  // received SNR at its nominal value while strengthening the thresholds
  // relative to the data.
  double coeff_scale = 1.0;
};

static constexpr int kVolterraDim = 72;

// Two-dimensional time series X1 (white Gaussian) driving
//   X2_t = 0.4 X1_{t-2}^2 - 0.8 X1_{t-7} + 0.2 eps_t,
// observed through quadratic-spline features of 8 lags of both series:
// 2*8 = 16 groups of v spline coefficients each (design dimension 16 v).
struct MTSConfig {
  int lag = 8;
  int n = 1000;
  int v = 10;  // spline basis count per function
  double knot_lo = -3.0;
  double knot_hi = 3.0;
  std::uint64_t seed = 1;
};

struct StreamMeta {
  std::string scenario;
  int dim = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double sigma2 = 0.0;           // observation-noise variance actually used
  double expected_w_power = 0.0; // E ||w||^2 entering the SNR definition
  double feature_scale = 1.0;    // global feature rescale (Volterra)
  int switch_time = 0;           // 1-based; 0 = no switch
  std::vector<int> support_pre;
  std::vector<int> support_post;
  int num_groups = 0;            // MTS group structure (0 = ungrouped)
  int group_size = 0;
};

// A simulated identification stream: per step the regressor x(t), the desired
// response d(t) = w_true(t)^H x(t) + eps(t), and (when the scenario has one)
// the true weight vector.
struct Stream {
  std::vector<CVec> x;
  std::vector<Complex> d;
  std::vector<CVec> w_true;  // empty when no ground truth exists (MTS)
  // Latent driver series of the mts scenario per emitted step (empty
  // elsewhere); eps2 is the innovation entering X2.
  std::vector<double> x1_series, x2_series, eps2_series;
  StreamMeta meta;

  int length() const { return static_cast<int>(x.size()); }
  int dim() const { return meta.dim; }
  bool has_w_true() const { return !w_true.empty(); }
};

// Fading envelope w_i = sqrt(g_c(i)^2 + g_s(i)^2), i = 1..n, where g_c and
// g_s are sums of n_paths random-phase sinusoids scaled by sqrt(2/n_paths).
// E[w^2] = 2 and the quadrature autocorrelation at lag tau is J_0(2 pi tau f_d).
std::vector<double> jakes_gain_series(double f_d, int n, int n_paths,
                                      std::uint64_t seed);

Stream jakes_stream(const JakesConfig& cfg);

// 72-entry feature vector from the last 8 inputs, history = [x(i), x(i-1),
// ..., x(i-7)]: entries 0..7 are x(i-k), entry 8 + 8m + n is
// x^2(i-m) conj(x(i-n)).
CVec volterra_features(const CVec& history);

Stream volterra_stream(const VolterraConfig& cfg);

// Quadratic B-spline basis values at x: v functions on v-1 equally spaced
// knots spanning [knot_lo, knot_hi] with clamped ends.  Nonnegative,
// partition of unity inside the range; x outside evaluates on the clamped
// extension.
RVec quad_spline_basis(double x, int v, double knot_lo, double knot_hi);

Stream mts_stream(const MTSConfig& cfg);

// Group structure of the MTS design row: 2*lag groups of v coefficients.
GroupLayout mts_layout(const MTSConfig& cfg);

// sigma2 = expected_w_power / 10^(snr_db/10); +infinity dB maps to 0.
double sigma2_from_snr(double snr_db, double expected_w_power);

// Per-trial stream seed: a SplitMix64-style mix of (seed, trial_index), so
// parallel trials draw from disjoint deterministic streams.
std::uint64_t derive_trial_seed(std::uint64_t seed, int trial_index);

// CSV fixture format for cross-implementation comparison.  Columns:
//   t, x_re_<j>, x_im_<j> ..., d_re, d_im [, w_re_<j>, w_im_<j> ...]
// Values printed with %.17g so doubles round-trip exactly.
void write_stream_csv(const Stream& stream, const std::string& path);
Stream read_stream_csv(const std::string& path);

}  // namespace sparls
