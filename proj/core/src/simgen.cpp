// SPDX-License-Identifier: Apache-2.0
#include "sparls/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sparls {

namespace {

constexpr double kPi = std::numbers::pi;

// Circular complex Gaussian with E|z|^2 = var.
Complex cgauss(std::mt19937_64& rng, double var) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = std::sqrt(0.5 * var);
  const double re = normal(rng);
  const double im = normal(rng);
  return Complex(s * re, s * im);
}

// One tap's sum-of-sinusoids fading process; path angles and phases are
// frozen at construction.
class JakesFader {
 public:
  JakesFader(double f_d, int n_paths, std::mt19937_64& rng) : f_d_(f_d) {
    std::uniform_real_distribution<double> unif(-kPi, kPi);
    angles_.resize(static_cast<size_t>(n_paths));
    phases_.resize(static_cast<size_t>(n_paths));
    for (auto& a : angles_) a = unif(rng);
    for (auto& p : phases_) p = unif(rng);
  }

  void quadratures(long i, double& g_c, double& g_s) const {
    const double scale = std::sqrt(2.0 / static_cast<double>(angles_.size()));
    double c = 0.0, s = 0.0;
    for (size_t k = 0; k < angles_.size(); ++k) {
      const double arg =
          2.0 * kPi * f_d_ * static_cast<double>(i) * std::cos(angles_[k]) + phases_[k];
      c += std::cos(arg);
      s += std::sin(arg);
    }
    g_c = scale * c;
    g_s = scale * s;
  }

  double envelope(long i) const {
    double g_c = 0.0, g_s = 0.0;
    quadratures(i, g_c, g_s);
    return std::hypot(g_c, g_s);
  }

 private:
  double f_d_;
  std::vector<double> angles_;
  std::vector<double> phases_;
};

std::vector<int> sample_without_replacement(std::mt19937_64& rng, int population,
                                            int count) {
  std::vector<int> pool(static_cast<size_t>(population));
  for (int j = 0; j < population; ++j) pool[static_cast<size_t>(j)] = j;
  for (int j = 0; j < count; ++j) {
    std::uniform_int_distribution<int> pick(j, population - 1);
    std::swap(pool[static_cast<size_t>(j)], pool[static_cast<size_t>(pick(rng))]);
  }
  pool.resize(static_cast<size_t>(count));
  return pool;
}

void append_row(std::string& out, const std::vector<double>& values) {
  char buf[32];
  for (size_t j = 0; j < values.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[j]);
    if (j) out += ',';
    out += buf;
  }
  out += '\n';
}

}  // namespace

std::vector<double> jakes_gain_series(double f_d, int n, int n_paths,
                                      std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("jakes_gain_series: n_paths must be >= 1");
  if (n < 1) throw std::invalid_argument("jakes_gain_series: n must be >= 1");
  std::mt19937_64 rng(seed);
  JakesFader fader(f_d, n_paths, rng);
  std::vector<double> envelope(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i)
    envelope[static_cast<size_t>(i - 1)] = fader.envelope(i);
  return envelope;
}

Stream jakes_stream(const JakesConfig& cfg) {
  if (cfg.k_sparse < 1 || cfg.k_sparse > cfg.M)
    throw std::invalid_argument("jakes_stream: k_sparse must be in [1, M]");
  if (cfg.switch_time > cfg.n)
    throw std::invalid_argument("jakes_stream: switch_time must be <= n");
  const bool switching = cfg.switch_time >= 1 && cfg.k_sparse < cfg.M;

  std::mt19937_64 rng(cfg.seed);
  // Draw order is fixed: faders, support, switch choice, then the per-step
  // inputs and noise.
  std::vector<JakesFader> faders;
  faders.reserve(static_cast<size_t>(cfg.k_sparse) + 1);
  for (int k = 0; k < cfg.k_sparse + (switching ? 1 : 0); ++k)
    faders.emplace_back(cfg.f_d, cfg.n_paths, rng);

  std::vector<int> support = sample_without_replacement(rng, cfg.M, cfg.k_sparse);
  std::sort(support.begin(), support.end());

  Stream stream;
  stream.meta.scenario = "jakes";
  stream.meta.dim = cfg.M;
  stream.meta.seed = cfg.seed;
  stream.meta.snr_db = cfg.snr_db;
  stream.meta.switch_time = switching ? cfg.switch_time : 0;
  stream.meta.support_pre = support;
  stream.meta.expected_w_power = 2.0 * static_cast<double>(cfg.k_sparse);
  stream.meta.sigma2 = sigma2_from_snr(cfg.snr_db, stream.meta.expected_w_power);

  // The switch mutes one active tap and activates one inactive tap; the
  // replacement tap reuses the muted tap's slot and gets the spare fader.
  int muted_pos = 0;
  std::vector<int> support_post = support;
  if (switching) {
    std::uniform_int_distribution<int> pick_active(0, cfg.k_sparse - 1);
    muted_pos = pick_active(rng);
    std::vector<int> inactive;
    inactive.reserve(static_cast<size_t>(cfg.M - cfg.k_sparse));
    for (int j = 0; j < cfg.M; ++j)
      if (!std::binary_search(support.begin(), support.end(), j)) inactive.push_back(j);
    std::uniform_int_distribution<int> pick_new(0, static_cast<int>(inactive.size()) - 1);
    support_post[static_cast<size_t>(muted_pos)] = inactive[static_cast<size_t>(pick_new(rng))];
  }
  stream.meta.support_post = support_post;

  stream.x.reserve(static_cast<size_t>(cfg.n));
  stream.d.reserve(static_cast<size_t>(cfg.n));
  stream.w_true.reserve(static_cast<size_t>(cfg.n));
  const double sigma = std::sqrt(stream.meta.sigma2);
  const double input_var =
      cfg.input_elem_var > 0.0 ? cfg.input_elem_var : 1.0 / cfg.M;
  for (int i = 1; i <= cfg.n; ++i) {
    const bool post = switching && i >= cfg.switch_time;
    CVec w = CVec::Zero(cfg.M);
    for (int k = 0; k < cfg.k_sparse; ++k) {
      const int tap = (post ? support_post : support)[static_cast<size_t>(k)];
      const int fader_idx = (post && k == muted_pos) ? cfg.k_sparse : k;
      w[tap] = faders[static_cast<size_t>(fader_idx)].envelope(i);
    }
    CVec x(cfg.M);
    for (int j = 0; j < cfg.M; ++j) x[j] = cgauss(rng, input_var);
    const Complex noise = sigma > 0.0 ? sigma * cgauss(rng, 1.0) : Complex(0.0, 0.0);
    stream.w_true.push_back(w);
    stream.d.push_back(w.dot(x) + noise);  // w^H x + eps
    stream.x.push_back(std::move(x));
  }
  return stream;
}

CVec volterra_features(const CVec& history) {
  if (history.size() != 8)
    throw std::invalid_argument("volterra_features: history must contain 8 inputs");
  CVec phi(kVolterraDim);
  for (int k = 0; k < 8; ++k) phi[k] = history[k];
  for (int m = 0; m < 8; ++m)
    for (int n = 0; n < 8; ++n)
      phi[8 + 8 * m + n] = history[m] * history[m] * std::conj(history[n]);
  return phi;
}

Stream volterra_stream(const VolterraConfig& cfg) {
  if (cfg.memory != 7)
    throw std::invalid_argument("volterra_stream: only memory 7 (72 features) is supported");
  if (cfg.switch_time > cfg.n)
    throw std::invalid_argument("volterra_stream: switch_time must be <= n");
  std::mt19937_64 rng(cfg.seed);

  // Coefficients first (fixed draw order), then inputs, then noise per step.
  const double cv = cfg.coeff_scale * cfg.coeff_scale;
  const Complex a3 = cgauss(rng, cv), a5 = cgauss(rng, cv);
  const Complex b14 = cgauss(rng, cv), b51 = cgauss(rng, cv);
  const Complex a3p = cgauss(rng, cv), a7p = cgauss(rng, cv);
  const Complex b14p = cgauss(rng, cv), b61p = cgauss(rng, cv);

  // First-order lag k maps to feature k; third-order (m,n) to 8 + 8m + n.
  const std::vector<std::pair<int, Complex>> pre = {
      {3, a3}, {5, a5}, {8 + 8 * 1 + 4, b14}, {8 + 8 * 5 + 1, b51}};
  const std::vector<std::pair<int, Complex>> post = {
      {3, a3p}, {7, a7p}, {8 + 8 * 1 + 4, b14p}, {8 + 8 * 6 + 1, b61p}};

  // Inputs padded with 7 pre-samples so every step has a full history.
  std::vector<Complex> input(static_cast<size_t>(cfg.n) + 7);
  for (auto& v : input) v = cgauss(rng, 1.0);

  std::vector<CVec> raw_features(static_cast<size_t>(cfg.n));
  CVec history(8);
  for (int t = 1; t <= cfg.n; ++t) {
    for (int k = 0; k < 8; ++k) history[k] = input[static_cast<size_t>(t - k + 6)];
    raw_features[static_cast<size_t>(t - 1)] = volterra_features(history);
  }

  double scale = 1.0;
  if (cfg.fixed_scale > 0.0) {
    scale = cfg.fixed_scale;
  } else if (cfg.normalize_power) {
    const int calib = std::min(cfg.calib_len, cfg.n);
    double mean_power = 0.0;
    for (int t = 0; t < calib; ++t)
      mean_power += raw_features[static_cast<size_t>(t)].squaredNorm();
    mean_power /= static_cast<double>(calib);
    scale = 1.0 / std::sqrt(mean_power);
  }

  Stream stream;
  stream.meta.scenario = "volterra";
  stream.meta.dim = kVolterraDim;
  stream.meta.seed = cfg.seed;
  stream.meta.snr_db = cfg.snr_db;
  stream.meta.switch_time = cfg.switch_time >= 1 ? cfg.switch_time : 0;
  stream.meta.feature_scale = scale;
  for (const auto& [idx, coeff] : pre) stream.meta.support_pre.push_back(idx);
  for (const auto& [idx, coeff] : post) stream.meta.support_post.push_back(idx);
  stream.meta.expected_w_power = 4.0 * cv / (scale * scale);
  stream.meta.sigma2 = sigma2_from_snr(cfg.snr_db, stream.meta.expected_w_power);

  CVec w_pre = CVec::Zero(kVolterraDim), w_post = CVec::Zero(kVolterraDim);
  // d = w^H phi requires w to carry the conjugated coefficients.
  for (const auto& [idx, coeff] : pre) w_pre[idx] = std::conj(coeff) / scale;
  for (const auto& [idx, coeff] : post) w_post[idx] = std::conj(coeff) / scale;

  const double sigma = std::sqrt(stream.meta.sigma2);
  for (int t = 1; t <= cfg.n; ++t) {
    const bool is_post = stream.meta.switch_time >= 1 && t >= cfg.switch_time;
    const CVec& w = is_post ? w_post : w_pre;
    CVec phi = scale * raw_features[static_cast<size_t>(t - 1)];
    const Complex noise = sigma > 0.0 ? sigma * cgauss(rng, 1.0) : Complex(0.0, 0.0);
    stream.w_true.push_back(w);
    stream.d.push_back(w.dot(phi) + noise);
    stream.x.push_back(std::move(phi));
  }
  return stream;
}

RVec quad_spline_basis(double x, int v, double knot_lo, double knot_hi) {
  if (v < 3) throw std::invalid_argument("quad_spline_basis: v must be >= 3");
  if (!(knot_hi > knot_lo))
    throw std::invalid_argument("quad_spline_basis: empty knot range");
  constexpr int kDegree = 2;
  // Clamped knot vector: 3 copies of each end around v-3 interior knots,
  // v+3 knots in total for v basis functions.
  const int num_knots = v + kDegree + 1;
  std::vector<double> knots(static_cast<size_t>(num_knots));
  const int segments = v - kDegree;  // v-2 intervals between the v-1 knots
  const double h = (knot_hi - knot_lo) / static_cast<double>(segments);
  for (int j = 0; j < num_knots; ++j) {
    const int interior = std::clamp(j - kDegree, 0, segments);
    knots[static_cast<size_t>(j)] = knot_lo + h * static_cast<double>(interior);
  }

  const double xc = std::clamp(x, knot_lo, knot_hi);
  // Knot span index: largest i with knots[i] <= xc < knots[i+1], right-closed
  // at the top end.
  int span = kDegree;
  while (span < v - 1 && xc >= knots[static_cast<size_t>(span + 1)]) ++span;

  // Iterative basis evaluation (Cox-de Boor triangle for the active span).
  double tri[kDegree + 1] = {1.0, 0.0, 0.0};
  double left[kDegree + 1], right[kDegree + 1];
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = xc - knots[static_cast<size_t>(span + 1 - j)];
    right[j] = knots[static_cast<size_t>(span + j)] - xc;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double tmp = denom != 0.0 ? tri[r] / denom : 0.0;
      tri[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    tri[j] = saved;
  }

  RVec basis = RVec::Zero(v);
  for (int j = 0; j <= kDegree; ++j) basis[span - kDegree + j] = tri[j];
  return basis;
}

GroupLayout mts_layout(const MTSConfig& cfg) {
  return GroupLayout::uniform(2 * cfg.lag, cfg.v);
}

Stream mts_stream(const MTSConfig& cfg) {
  if (cfg.lag != 8)
    throw std::invalid_argument("mts_stream: the generating model has lag 8");
  if (cfg.v < 3) throw std::invalid_argument("mts_stream: v must be >= 3");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Burn-in so both series have full 8-lag histories at t = 1: X1 from
  // t = -14, X2 from t = -7 (X2 needs X1 back to lag 7).
  constexpr int kX1Lead = 15;  // indices t = -14..0
  constexpr int kX2Lead = 8;   // indices t = -7..0
  std::vector<double> x1(static_cast<size_t>(cfg.n) + kX1Lead);
  for (auto& v : x1) v = normal(rng);
  std::vector<double> eps2(static_cast<size_t>(cfg.n) + kX2Lead);
  for (auto& v : eps2) v = normal(rng);

  auto x1_at = [&](int t) { return x1[static_cast<size_t>(t + kX1Lead - 1)]; };
  std::vector<double> x2(static_cast<size_t>(cfg.n) + kX2Lead);
  auto x2_ref = [&](int t) -> double& { return x2[static_cast<size_t>(t + kX2Lead - 1)]; };
  for (int t = -(kX2Lead - 1); t <= cfg.n; ++t) {
    const double a = x1_at(t - 2);
    x2_ref(t) = 0.4 * a * a - 0.8 * x1_at(t - 7) +
                0.2 * eps2[static_cast<size_t>(t + kX2Lead - 1)];
  }

  const int dim = 2 * cfg.lag * cfg.v;
  Stream stream;
  stream.meta.scenario = "mts";
  stream.meta.dim = dim;
  stream.meta.seed = cfg.seed;
  stream.meta.snr_db = std::numeric_limits<double>::quiet_NaN();
  stream.meta.sigma2 = 0.04;  // variance of the 0.2 eps_t innovation
  stream.meta.num_groups = 2 * cfg.lag;
  stream.meta.group_size = cfg.v;

  for (int t = 1; t <= cfg.n; ++t) {
    CVec row = CVec::Zero(dim);
    for (int i = 1; i <= cfg.lag; ++i) {
      const RVec b1 = quad_spline_basis(x1_at(t - i), cfg.v, cfg.knot_lo, cfg.knot_hi);
      const RVec b2 =
          quad_spline_basis(x2[static_cast<size_t>(t - i + kX2Lead - 1)], cfg.v,
                            cfg.knot_lo, cfg.knot_hi);
      const int base = 2 * (i - 1) * cfg.v;
      for (int j = 0; j < cfg.v; ++j) {
        row[base + j] = Complex(b1[j], 0.0);
        row[base + cfg.v + j] = Complex(b2[j], 0.0);
      }
    }
    stream.x.push_back(std::move(row));
    stream.d.push_back(Complex(x2_ref(t), 0.0));
    stream.x1_series.push_back(x1_at(t));
    stream.x2_series.push_back(x2_ref(t));
    stream.eps2_series.push_back(eps2[static_cast<size_t>(t + kX2Lead - 1)]);
  }
  return stream;
}

double sigma2_from_snr(double snr_db, double expected_w_power) {
  if (expected_w_power < 0.0)
    throw std::invalid_argument("sigma2_from_snr: power must be >= 0");
  if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
  return expected_w_power / std::pow(10.0, snr_db / 10.0);
}

std::uint64_t derive_trial_seed(std::uint64_t seed, int trial_index) {
  // SplitMix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL *
                               (static_cast<std::uint64_t>(trial_index) + 1ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void write_stream_csv(const Stream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_stream_csv: cannot open " + path);
  const int m = stream.dim();
  std::string header = "t";
  for (int j = 0; j < m; ++j) {
    header += ",x_re_" + std::to_string(j) + ",x_im_" + std::to_string(j);
  }
  header += ",d_re,d_im";
  if (stream.has_w_true())
    for (int j = 0; j < m; ++j)
      header += ",w_re_" + std::to_string(j) + ",w_im_" + std::to_string(j);
  out << header << '\n';

  std::string body;
  std::vector<double> row;
  for (int t = 0; t < stream.length(); ++t) {
    row.clear();
    row.push_back(static_cast<double>(t + 1));
    for (int j = 0; j < m; ++j) {
      row.push_back(stream.x[static_cast<size_t>(t)][j].real());
      row.push_back(stream.x[static_cast<size_t>(t)][j].imag());
    }
    row.push_back(stream.d[static_cast<size_t>(t)].real());
    row.push_back(stream.d[static_cast<size_t>(t)].imag());
    if (stream.has_w_true()) {
      for (int j = 0; j < m; ++j) {
        row.push_back(stream.w_true[static_cast<size_t>(t)][j].real());
        row.push_back(stream.w_true[static_cast<size_t>(t)][j].imag());
      }
    }
    append_row(body, row);
  }
  out << body;
}

Stream read_stream_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_stream_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_stream_csv: empty file");
  const size_t columns = static_cast<size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  const bool has_w = line.find(",w_re_0") != std::string::npos;
  // t + 2m x-columns + 2 d-columns (+ 2m w-columns).
  const int m = static_cast<int>((columns - 3) / (has_w ? 4 : 2));

  Stream stream;
  stream.meta.dim = m;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != columns)
      throw std::runtime_error("read_stream_csv: ragged row");
    size_t pos = 1;
    CVec x(m);
    for (int j = 0; j < m; ++j, pos += 2) x[j] = Complex(values[pos], values[pos + 1]);
    stream.x.push_back(std::move(x));
    stream.d.push_back(Complex(values[pos], values[pos + 1]));
    pos += 2;
    if (has_w) {
      CVec w(m);
      for (int j = 0; j < m; ++j, pos += 2) w[j] = Complex(values[pos], values[pos + 1]);
      stream.w_true.push_back(std::move(w));
    }
  }
  return stream;
}

}  // namespace sparls
