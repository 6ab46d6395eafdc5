// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sparls/estimators.hpp"
#include "sparls/types.hpp"

namespace sparls {

// Which product multiplies gamma inside the Lipschitz-constant formula.  The
// M-step thresholds at xi2 * gamma; the error analysis is stated with
// sigma2 * gamma.  Both readings are exposed; they coincide when xi2 ==
// sigma2.
enum class BetaConvention { Sigma2, Xi2 };

// Lipschitz constant of the composite EM map under firm thresholding:
//   C = [alpha / (alpha - b gamma)] * [1 - (xi2/sigma2) rho_min],
// with b = sigma2 or xi2 per the convention flag.  Requires b*gamma < alpha
// and (xi2/sigma2) rho_min <= 1.
double lipschitz_C(double rho_min, double alpha, double gamma, double sigma2,
                   double xi2, BetaConvention convention);

struct ContractionAudit {
  bool passed = false;
  double C = 0.0;
  std::vector<double> distances;  // ||w^(k) - w_star|| per iterate
  std::vector<double> ratios;     // distances[k+1] / distances[k]
};

// Checks the geometric decay ||w^(k+1) - w*|| <= C ||w^(k) - w*|| + 1e-9 for
// every step of a firm-thresholding trace; w_star must be a numerically
// converged fixed point.  Hard-thresholding traces are rejected (the map is
// not Lipschitz there).
ContractionAudit contraction_audit(const EMTrace& trace, const CVec& w_star,
                                   double C);

struct ErrorBoundReport {
  double C = 0.0;          // filled by the caller when a penalty is fixed
  double rho_min = 0.0;    // extreme eigenvalues of X^H Lambda X
  double rho_max = 0.0;
  double alpha1 = 0.0;     // curvature: smallest eigenvalue of (1/n) X^H Lambda X
  double relax_bound = 0.0;
  bool gamma_feasible = false;
  long s = 0;              // ||w_true||_0
  // Supporting quantities: the feasible window for gamma and the noise term.
  double gamma_lower = 0.0;
  double gamma_upper = 0.0;
  double noise_infnorm = 0.0;  // ||X^H Lambda^{1/2} eps||_inf
};

// Stationary-point estimation-error bound:
//   relax_bound = 6 sqrt(s) * 4 ||X^H Lambda^{1/2} eps||_inf / (n (4 alpha1 - 3 alpha))
// together with the feasible window
//   [4 ||X^H Lambda^{1/2} eps||_inf / sigma2,  alpha rho_min / (sigma2 rho_max)).
// Requires 3 alpha < 4 alpha1.  Only usable on synthetic instances where the
// noise realization is known.
ErrorBoundReport theorem2_bound(const CMat& X, double lambda, const CVec& eps,
                                const CVec& w_true, double alpha, double alpha1,
                                double sigma2);

// Restricted-strong-convexity curvature of the weighted quadratic loss:
// smallest eigenvalue of (1/n) X^H Lambda X (dense Hermitian eigensolve).
double rsc_alpha1(const CMat& X, double lambda);

}  // namespace sparls
