// SPDX-License-Identifier: Apache-2.0
#include "sparls/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace sparls {

namespace {

CMat weighted_gram(const CMat& X, double lambda) {
  CMat W = X;
  const Eigen::Index n = X.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    W.row(i) *= std::pow(lambda, 0.5 * static_cast<double>(n - 1 - i));
  return W.adjoint() * W;
}

}  // namespace

double lipschitz_C(double rho_min, double alpha, double gamma, double sigma2,
                   double xi2, BetaConvention convention) {
  if (rho_min < 0.0) throw std::domain_error("lipschitz_C: rho_min must be >= 0");
  if (!(alpha > 0.0 && sigma2 > 0.0 && xi2 > 0.0 && gamma >= 0.0))
    throw std::domain_error("lipschitz_C: invalid parameters");
  const double b = (convention == BetaConvention::Sigma2 ? sigma2 : xi2) * gamma;
  if (b >= alpha)
    throw std::domain_error("lipschitz_C: beta*gamma must be < alpha (firm regime)");
  const double contraction = 1.0 - (xi2 / sigma2) * rho_min;
  if (contraction < 0.0)
    throw std::domain_error("lipschitz_C: (xi2/sigma2) rho_min exceeds 1");
  return (alpha / (alpha - b)) * contraction;
}

ContractionAudit contraction_audit(const EMTrace& trace, const CVec& w_star,
                                   double C) {
  if (!trace.firm())
    throw std::invalid_argument(
        "contraction_audit: trace was produced under hard thresholding");
  if (trace.iterates.empty())
    throw std::invalid_argument("contraction_audit: empty trace");
  if (C < 0.0) throw std::invalid_argument("contraction_audit: C must be >= 0");

  constexpr double kSlack = 1e-9;
  ContractionAudit audit;
  audit.C = C;
  audit.distances.reserve(trace.iterates.size());
  for (const CVec& w : trace.iterates) {
    if (w.size() != w_star.size())
      throw std::invalid_argument("contraction_audit: dimension mismatch");
    audit.distances.push_back((w - w_star).norm());
  }
  audit.passed = true;
  for (size_t k = 0; k + 1 < audit.distances.size(); ++k) {
    const double prev = audit.distances[k];
    const double next = audit.distances[k + 1];
    audit.ratios.push_back(prev > 0.0 ? next / prev : 0.0);
    if (next > C * prev + kSlack) audit.passed = false;
  }
  return audit;
}

ErrorBoundReport theorem2_bound(const CMat& X, double lambda, const CVec& eps,
                                const CVec& w_true, double alpha, double alpha1,
                                double sigma2) {
  if (X.rows() < 1) throw std::invalid_argument("theorem2_bound: X must be nonempty");
  if (eps.size() != X.rows())
    throw std::invalid_argument("theorem2_bound: noise length mismatch");
  if (w_true.size() != X.cols())
    throw std::invalid_argument("theorem2_bound: w_true dimension mismatch");
  if (!(sigma2 > 0.0)) throw std::domain_error("theorem2_bound: sigma2 must be > 0");
  if (!(3.0 * alpha < 4.0 * alpha1))
    throw std::domain_error("theorem2_bound: requires 3 alpha < 4 alpha1");

  const Eigen::Index n = X.rows();
  const CMat S = weighted_gram(X, lambda);
  Eigen::SelfAdjointEigenSolver<CMat> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("theorem2_bound: eigensolver failure");

  ErrorBoundReport report;
  report.rho_min = solver.eigenvalues().minCoeff();
  report.rho_max = solver.eigenvalues().maxCoeff();
  report.alpha1 = alpha1;

  // ||X^H Lambda^{1/2} eps||_inf with half-power row weights.
  CVec eps_w = eps;
  for (Eigen::Index i = 0; i < n; ++i)
    eps_w[i] *= std::pow(lambda, 0.5 * static_cast<double>(n - 1 - i));
  report.noise_infnorm = (X.adjoint() * eps_w).cwiseAbs().maxCoeff();

  report.s = (w_true.array().abs() > 0.0).count();
  report.relax_bound = 6.0 * std::sqrt(static_cast<double>(report.s)) * 4.0 *
                       report.noise_infnorm /
                       (static_cast<double>(n) * (4.0 * alpha1 - 3.0 * alpha));

  report.gamma_lower = 4.0 * report.noise_infnorm / sigma2;
  report.gamma_upper =
      report.rho_max > 0.0 ? alpha * report.rho_min / (sigma2 * report.rho_max) : 0.0;
  report.gamma_feasible = report.gamma_lower < report.gamma_upper;
  return report;
}

double rsc_alpha1(const CMat& X, double lambda) {
  if (X.rows() < 1) throw std::invalid_argument("rsc_alpha1: X must be nonempty");
  const CMat S = weighted_gram(X, lambda) / static_cast<double>(X.rows());
  Eigen::SelfAdjointEigenSolver<CMat> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("rsc_alpha1: eigensolver failure");
  return solver.eigenvalues().minCoeff();
}

}  // namespace sparls
