// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sparls/types.hpp"

namespace sparls {

// Resolution of the measure-zero prox ties that appear once beta >= alpha
// (the thresholding rule is set-valued exactly at the threshold).  Zero keeps
// runs bit-reproducible; Keep passes the input through instead.
enum class TiePolicy { Zero, Keep };

// Bundle of the MCP-regularization hyperparameters shared by the batch and
// streaming estimators:
//   alpha  - envelope height of the scaled MCP (penalty is flat at alpha/2
//            beyond |w| = alpha),
//   gamma  - penalization level,
//   xi2    - latent-noise scale of the EM decomposition; must satisfy
//            xi2 <= sigma2 / lambda_max(X^H Lambda X),
//   sigma2 - observation-noise variance.
// The effective prox scale used in the M-step is beta() = xi2 * gamma.
struct PenaltyConfig {
  double alpha = 0.5;
  double gamma = 0.0;
  double xi2 = 1.0;
  double sigma2 = 1.0;
  TiePolicy tie_policy = TiePolicy::Zero;

  double beta() const { return xi2 * gamma; }
  // Throws std::invalid_argument unless alpha > 0, xi2 > 0, sigma2 > 0 and
  // gamma >= 0.
  void validate() const;
};

// Partition of the weight indices 0..M-1 into contiguous groups of given
// sizes.  Group l covers [offset(l), offset(l) + size(l)).
class GroupLayout {
 public:
  explicit GroupLayout(std::vector<int> group_sizes);
  // L equal groups of size p.
  static GroupLayout uniform(int num_groups, int group_size);

  int num_groups() const { return static_cast<int>(sizes_.size()); }
  int dim() const { return dim_; }
  int size(int l) const { return sizes_[static_cast<size_t>(l)]; }
  int offset(int l) const { return offsets_[static_cast<size_t>(l)]; }
  const std::vector<int>& sizes() const { return sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

// Scaled MCP rho_alpha(w) = |w| - env_alpha(|w|):
//   w - w^2/(2 alpha) for w <= alpha, alpha/2 otherwise.
// Continuous, nondecreasing, bounded by alpha/2.
double mcp_value(double w_abs, double alpha);

// Moreau envelope of |.|: w^2/(2 alpha) for w <= alpha, w - alpha/2 beyond.
double moreau_env(double w_abs, double alpha);

// Minimizer of (1/2 beta)|r - w|^2 + rho_alpha(|w|) over complex w.
// beta < alpha  -> firm thresholding (zero below beta, linear ramp up to
//                  alpha, identity above);
// beta >= alpha -> hard thresholding at sqrt(alpha beta).
// The modulus is thresholded, the phase of r is preserved.  Inputs exactly
// at a hard threshold resolve per `tie`.
Complex prox_scalar(Complex r, double beta, double alpha,
                    TiePolicy tie = TiePolicy::Zero);

// Elementwise prox_scalar.
CVec prox_vector(const CVec& r, double beta, double alpha,
                 TiePolicy tie = TiePolicy::Zero);

// Groupwise firm thresholding on the Euclidean norms of the sub-vectors:
// per group, 0 when ||r_l|| <= beta, [alpha/(alpha-beta)](1 - beta/||r_l||) r_l
// when beta < ||r_l|| <= alpha, r_l unchanged above alpha.  Only the firm
// regime is defined; beta >= alpha throws std::domain_error.
CVec prox_group(const CVec& r, const GroupLayout& layout, double beta,
                double alpha);

// Soft thresholding max(|r| - threshold, 0) * phase(r); the ell_1 M-step.
Complex prox_soft(Complex r, double threshold);
CVec prox_soft_vector(const CVec& r, double threshold);

// Groupwise soft thresholding (1 - threshold/||r_l||)_+ r_l; the group-lasso
// M-step.
CVec prox_group_soft(const CVec& r, const GroupLayout& layout,
                     double threshold);

// sum_j rho_alpha(|w_j|) and sum_l rho_alpha(||w_l||).
double mcp_penalty(const CVec& w, double alpha);
double group_mcp_penalty(const CVec& w, const GroupLayout& layout,
                         double alpha);

}  // namespace sparls
