// SPDX-License-Identifier: Apache-2.0
#include "sparls/estimators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sparls {

namespace {

// Lambda^{1/2}-scaled copy of the rows of A: row i gets lambda^{(n-1-i)/2}.
CMat weighted_rows(const CMat& A, double lambda) {
  CMat W = A;
  const Eigen::Index n = A.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    W.row(i) *= std::pow(lambda, 0.5 * static_cast<double>(n - 1 - i));
  return W;
}

CVec weighted_entries(const CVec& v, double lambda) {
  CVec w = v;
  const Eigen::Index n = v.size();
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] *= std::pow(lambda, 0.5 * static_cast<double>(n - 1 - i));
  return w;
}

CVec m_step(const CVec& r, const PenaltyConfig& penalty, bool soft,
            const std::optional<GroupLayout>& layout) {
  const double beta = penalty.beta();
  if (soft) {
    if (layout) return prox_group_soft(r, *layout, beta);
    return prox_soft_vector(r, beta);
  }
  if (penalty.gamma == 0.0) return r;  // zero penalty: M-step is the identity
  if (layout) return prox_group(r, *layout, beta, penalty.alpha);
  return prox_vector(r, beta, penalty.alpha, penalty.tie_policy);
}

void check_sample_dim(const FilterState& state, const CVec& x) {
  if (x.size() != state.dim())
    throw std::invalid_argument("sparls step: sample dimension mismatch");
}

void run_em(FilterState& state, const std::optional<GroupLayout>& layout,
            bool soft) {
  CVec w = state.w_hat;
  for (int k = 0; k < state.em_iters; ++k)
    w = m_step(em_e_step(state.B, state.mu, w), state.penalty, soft, layout);
  state.w_hat = std::move(w);
}

void recursion_update(FilterState& state, const CVec& x, Complex d) {
  check_sample_dim(state, x);
  const double c = state.penalty.xi2 / state.penalty.sigma2;
  const double lambda = state.lambda;
  state.B *= lambda;
  state.B.noalias() -= c * x * x.adjoint();
  state.B.diagonal().array() += (1.0 - lambda);
  state.mu *= lambda;
  state.mu.noalias() += c * std::conj(d) * x;
  state.t += 1;
}

}  // namespace

void BatchProblem::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("BatchProblem: X must be nonempty");
  if (d.size() != X.rows())
    throw std::invalid_argument("BatchProblem: d length must equal rows of X");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("BatchProblem: lambda must be in (0, 1]");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("BatchProblem: sigma2 must be > 0");
}

CMat batch_B(const BatchProblem& problem, double xi2) {
  const CMat W = weighted_rows(problem.X, problem.lambda);
  CMat B = -(xi2 / problem.sigma2) * (W.adjoint() * W);
  B.diagonal().array() += 1.0;
  return B;
}

CVec batch_mu(const BatchProblem& problem, double xi2) {
  const CMat W = weighted_rows(problem.X, problem.lambda);
  return (xi2 / problem.sigma2) *
         (W.adjoint() * weighted_entries(problem.d, problem.lambda));
}

double em_objective(const BatchProblem& problem, const PenaltyConfig& penalty,
                    const CVec& w, const std::optional<GroupLayout>& layout) {
  const CMat W = weighted_rows(problem.X, problem.lambda);
  const CVec dw = weighted_entries(problem.d, problem.lambda);
  const double wls = (dw - W * w).squaredNorm();
  if (penalty.gamma == 0.0) return wls / (2.0 * problem.sigma2);
  const double rho = layout ? group_mcp_penalty(w, *layout, penalty.alpha)
                            : mcp_penalty(w, penalty.alpha);
  return wls / (2.0 * problem.sigma2 * penalty.gamma) + rho;
}

double largest_eigenvalue_power(const CMat& S, double tol, int max_iters) {
  if (S.rows() != S.cols() || S.rows() < 1)
    throw std::invalid_argument("largest_eigenvalue_power: square matrix required");
  // Deterministic pseudo-random start; a fixed vector could be orthogonal to
  // the dominant eigenvector.
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CVec q(S.rows());
  for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = Complex(unif(rng), unif(rng));
  q.normalize();

  double eig = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    CVec z = S * q;
    const double norm = z.norm();
    if (norm == 0.0) return 0.0;  // zero matrix
    const double next = std::real(q.dot(z));
    q = z / norm;
    if (it > 0 && std::abs(next - eig) <= tol * std::abs(next)) return next;
    eig = next;
  }
  throw std::runtime_error("largest_eigenvalue_power: no convergence within iteration budget");
}

double select_xi2(const CMat& X, double lambda, double sigma2, double safety) {
  if (X.rows() < 1) throw std::invalid_argument("select_xi2: X must be nonempty");
  if (!(safety > 0.0 && safety <= 1.0))
    throw std::invalid_argument("select_xi2: safety must be in (0, 1]");
  const CMat W = weighted_rows(X, lambda);
  const CMat S = W.adjoint() * W;
  const double lambda1 = largest_eigenvalue_power(S);
  if (!(lambda1 > 0.0)) throw std::domain_error("select_xi2: X^H Lambda X has zero spectrum");
  return safety * sigma2 / lambda1;
}

double calibrate_xi2(const std::vector<CVec>& prefix_x, double lambda,
                     double sigma2, double safety) {
  if (prefix_x.empty()) throw std::invalid_argument("calibrate_xi2: empty prefix");
  const Eigen::Index m = prefix_x.front().size();
  CMat X(static_cast<Eigen::Index>(prefix_x.size()), m);
  for (size_t i = 0; i < prefix_x.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = prefix_x[i].adjoint();
  return select_xi2(X, lambda, sigma2, safety);
}

double max_weighted_gram_eigenvalue(const std::vector<CVec>& xs, double lambda,
                                    int iters_per_step) {
  if (xs.empty())
    throw std::invalid_argument("max_weighted_gram_eigenvalue: empty stream");
  const Eigen::Index m = xs.front().size();
  CMat S = xs.front() * xs.front().adjoint();
  double best = xs.front().squaredNorm();
  CVec v = xs.front().norm() > 0.0 ? CVec(xs.front().normalized())
                                   : CVec(CVec::Ones(m).normalized());
  for (size_t t = 1; t < xs.size(); ++t) {
    S *= lambda;
    S.noalias() += xs[t] * xs[t].adjoint();
    // Warm-started iteration, plus a probe along the new sample (the top
    // direction jumps there when a heavy-tailed sample dominates).
    const double sample_norm = xs[t].norm();
    if (sample_norm > 0.0) {
      const CVec probe = xs[t] / sample_norm;
      if (std::real(probe.dot(S * probe)) > std::real(v.dot(S * v))) v = probe;
    }
    double quotient = 0.0;
    for (int it = 0; it < iters_per_step; ++it) {
      CVec z = S * v;
      const double norm = z.norm();
      if (norm == 0.0) break;
      quotient = std::real(v.dot(z));
      v = z / norm;
    }
    best = std::max(best, quotient);
  }
  return best;
}

CVec em_e_step(const CMat& B, const CVec& mu, const CVec& w_prev) {
  if (B.rows() != B.cols() || B.cols() != w_prev.size() || mu.size() != w_prev.size())
    throw std::invalid_argument("em_e_step: dimension mismatch");
  return B * w_prev + mu;
}

std::pair<CVec, EMTrace> spals_mcp(const BatchProblem& problem,
                                   const PenaltyConfig& penalty, const CVec& w0,
                                   int num_em_iters,
                                   const std::optional<GroupLayout>& layout) {
  problem.validate();
  penalty.validate();
  if (w0.size() != problem.dim())
    throw std::invalid_argument("spals_mcp: w0 dimension mismatch");
  if (num_em_iters < 1) throw std::invalid_argument("spals_mcp: K must be >= 1");
  if (layout && layout->dim() != problem.dim())
    throw std::invalid_argument("spals_mcp: layout dimension mismatch");

  const CMat B = batch_B(problem, penalty.xi2);
  const CVec mu = batch_mu(problem, penalty.xi2);

  EMTrace trace;
  trace.beta = penalty.beta();
  trace.alpha = penalty.alpha;
  trace.grouped = layout.has_value();
  trace.iterates.reserve(static_cast<size_t>(num_em_iters) + 1);
  trace.objective_values.reserve(static_cast<size_t>(num_em_iters) + 1);

  CVec w = w0;
  trace.iterates.push_back(w);
  trace.objective_values.push_back(em_objective(problem, penalty, w, layout));
  for (int k = 0; k < num_em_iters; ++k) {
    w = m_step(em_e_step(B, mu, w), penalty, /*soft=*/false, layout);
    trace.iterates.push_back(w);
    trace.objective_values.push_back(em_objective(problem, penalty, w, layout));
  }
  return {w, std::move(trace)};
}

FilterState sparls_mcp_init(const CVec& x1, Complex d1,
                            const PenaltyConfig& penalty, int em_iters,
                            double lambda) {
  penalty.validate();
  if (em_iters < 1) throw std::invalid_argument("sparls_mcp_init: em_iters must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("sparls_mcp_init: lambda must be in (0, 1]");
  const double c = penalty.xi2 / penalty.sigma2;
  FilterState state;
  state.B = -c * (x1 * x1.adjoint());
  state.B.diagonal().array() += 1.0;
  state.mu = c * std::conj(d1) * x1;
  state.w_hat = CVec::Zero(x1.size());
  state.t = 1;
  state.penalty = penalty;
  state.em_iters = em_iters;
  state.lambda = lambda;
  return state;
}

void sparls_mcp_step(FilterState& state, const CVec& x, Complex d,
                     const std::optional<GroupLayout>& layout) {
  recursion_update(state, x, d);
  run_em(state, layout, /*soft=*/false);
}

void sparls_l1_step(FilterState& state, const CVec& x, Complex d,
                    const std::optional<GroupLayout>& layout) {
  recursion_update(state, x, d);
  run_em(state, layout, /*soft=*/true);
}

RlsState rls_init(Eigen::Index dim, double lambda, double delta) {
  if (dim < 1) throw std::invalid_argument("rls_init: dim must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("rls_init: lambda must be in (0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("rls_init: delta must be > 0");
  RlsState state;
  state.P = CMat::Identity(dim, dim) / delta;
  state.w_hat = CVec::Zero(dim);
  state.t = 0;
  state.lambda = lambda;
  return state;
}

void rls_step(RlsState& state, const CVec& x, Complex d) {
  if (x.size() != state.dim())
    throw std::invalid_argument("rls_step: sample dimension mismatch");
  const CVec Px = state.P * x;
  const Complex denom = state.lambda + x.dot(Px);  // x^H P x is real >= 0
  const CVec gain = Px / denom;
  const Complex err = d - state.w_hat.dot(x);  // a priori error d - w^H x
  state.w_hat += gain * std::conj(err);
  state.P = (state.P - gain * Px.adjoint()) / state.lambda;
  state.P = 0.5 * (state.P + state.P.adjoint().eval());  // keep Hermitian
  state.t += 1;
}

}  // namespace sparls
