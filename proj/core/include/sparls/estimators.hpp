// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sparls/penalty.hpp"
#include "sparls/types.hpp"

namespace sparls {

// Weighted least-squares problem at a fixed time horizon:
//   minimize (1/2 sigma2) || Lambda^{1/2} (d - X w) ||^2 + gamma * penalty(w)
// with Lambda = diag(lambda^{n-1}, ..., 1).  Rows of X are the regressor
// vectors conjugate-transposed (row i = x(i)^H), so the normal-equations
// matrix X^H Lambda X = sum_i lambda^{n-i} x(i) x(i)^H is Hermitian.
//
// Observations following the channel model d_obs(i) = w^H x(i) + eps(i) enter
// here with d(i) = conj(d_obs(i)); the streaming recursion below applies that
// conjugation itself.
struct BatchProblem {
  CMat X;          // n x M, row i = x(i)^H
  CVec d;          // length n
  double lambda = 1.0;
  double sigma2 = 1.0;

  Eigen::Index num_samples() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  void validate() const;
};

// Iterate history of one EM run, for convergence diagnostics.  Objectives are
// the penalized weighted LS cost in prox units,
//   (1/(2 sigma2 gamma)) || Lambda^{1/2}(d - X w) ||^2 + penalty_alpha(w)
// (for gamma = 0 the unscaled (1/2 sigma2) cost is stored instead).
struct EMTrace {
  std::vector<CVec> iterates;           // w^(0) .. w^(K)
  std::vector<double> objective_values; // same length
  double beta = 0.0;                    // prox scale used in the M-step
  double alpha = 0.0;
  bool grouped = false;

  bool firm() const { return beta < alpha; }
};

// B(n) = I - (xi2/sigma2) X^H Lambda X and mu(n) = (xi2/sigma2) X^H Lambda d,
// materialized directly from the batch quantities.
CMat batch_B(const BatchProblem& problem, double xi2);
CVec batch_mu(const BatchProblem& problem, double xi2);

// Objective of the penalized problem evaluated at w (see EMTrace).  With a
// layout the group MCP penalty is used.
double em_objective(const BatchProblem& problem, const PenaltyConfig& penalty,
                    const CVec& w,
                    const std::optional<GroupLayout>& layout = std::nullopt);

// Largest eigenvalue of a Hermitian PSD matrix by power iteration, relative
// tolerance `tol`; throws std::runtime_error if not converged in max_iters.
double largest_eigenvalue_power(const CMat& S, double tol = 1e-6,
                                int max_iters = 10000);

// Latent-noise scale obeying xi2 <= sigma2 / lambda_max(X^H Lambda X):
// returns safety * sigma2 / lambda_max, lambda_max by power iteration.
double select_xi2(const CMat& X, double lambda, double sigma2,
                  double safety = 1.0);

// select_xi2 evaluated on a stream prefix, the streaming calibration recipe:
// the prefix is weighted as if it were the full history.
double calibrate_xi2(const std::vector<CVec>& prefix_x, double lambda,
                     double sigma2, double safety = 0.9);

// max over t of lambda_max( sum_{i<=t} lambda^{t-i} x(i) x(i)^H ), tracked by
// a warm-started power iteration that also probes each arriving sample's
// direction.  Supplies the streaming xi2 bound over a whole recorded stream.
double max_weighted_gram_eigenvalue(const std::vector<CVec>& xs, double lambda,
                                    int iters_per_step = 3);

// E-step: r = B w_prev + mu.
CVec em_e_step(const CMat& B, const CVec& mu, const CVec& w_prev);

// Batch solver: K EM iterations of r = B w + mu, w = prox_{xi2 gamma}(r)
// (groupwise when layout is present).  Returns the final iterate and the
// full trace.
std::pair<CVec, EMTrace> spals_mcp(
    const BatchProblem& problem, const PenaltyConfig& penalty, const CVec& w0,
    int num_em_iters, const std::optional<GroupLayout>& layout = std::nullopt);

// State of the streaming recursion.  B and mu carry the same values as their
// batch definitions over the samples seen so far; w_hat is the estimate after
// the most recent update.  Single-owner: one stream mutates one state.
struct FilterState {
  CMat B;
  CVec mu;
  CVec w_hat;
  long t = 0;
  PenaltyConfig penalty;
  int em_iters = 5;
  double lambda = 1.0;

  Eigen::Index dim() const { return mu.size(); }
};

// First sample: B(1) = I - (xi2/sigma2) x1 x1^H, mu(1) = (xi2/sigma2) x1
// conj(d1), w_hat(1) = 0.  No EM pass runs at t = 1.
FilterState sparls_mcp_init(const CVec& x1, Complex d1,
                            const PenaltyConfig& penalty, int em_iters,
                            double lambda);

// One streaming update:
//   B <- lambda B - (xi2/sigma2) x x^H + (1 - lambda) I
//   mu <- lambda mu + (xi2/sigma2) x conj(d)
// then em_iters EM iterations warm-started at the previous estimate.
void sparls_mcp_step(FilterState& state, const CVec& x, Complex d,
                     const std::optional<GroupLayout>& layout = std::nullopt);

// Same recursion with the soft-thresholding M-step (ell_1 / group-lasso
// regularization) at threshold xi2 * gamma.
void sparls_l1_step(FilterState& state, const CVec& x, Complex d,
                    const std::optional<GroupLayout>& layout = std::nullopt);

// Exponentially-weighted RLS with inverse-correlation update, the
// conventional unregularized baseline.  P is re-symmetrized every step.
struct RlsState {
  CMat P;
  CVec w_hat;
  long t = 0;
  double lambda = 1.0;

  Eigen::Index dim() const { return w_hat.size(); }
};

RlsState rls_init(Eigen::Index dim, double lambda, double delta = 1e-2);
void rls_step(RlsState& state, const CVec& x, Complex d);

}  // namespace sparls
