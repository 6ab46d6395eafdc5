// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sparls/estimators.hpp"

using namespace sparls;

namespace {

PenaltyConfig make_penalty(double alpha, double gamma, double xi2, double sigma2) {
  PenaltyConfig p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.xi2 = xi2;
  p.sigma2 = sigma2;
  return p;
}

}  // namespace

TEST_CASE("select_xi2 on known spectra") {
  CMat X(1, 4);
  X.setZero();
  X(0, 1) = Complex(1.0, 0.0);  // single unit-norm row
  CHECK(select_xi2(X, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));

  CMat I = CMat::Identity(6, 6);
  CHECK(select_xi2(I, 1.0, 2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("select_xi2 matches the dense eigensolver") {
  const CMat X = oracles::random_cmat(3, 50, 20);
  for (double lambda : {1.0, 0.95}) {
    const double dense = oracles::dense_lambda_max(X, lambda);
    const double xi2 = select_xi2(X, lambda, 1.0, 1.0);
    CHECK(std::abs(1.0 / xi2 - dense) / dense < 1e-5);
  }
}

TEST_CASE("em_e_step") {
  const CMat B = oracles::random_cmat(10, 3, 3);
  const CVec mu = oracles::random_cvec(11, 3);
  CHECK((em_e_step(B, mu, CVec::Zero(3)) - mu).norm() == 0.0);
  const CVec w = oracles::random_cvec(12, 3);
  CHECK((em_e_step(CMat::Identity(3, 3), CVec::Zero(3), w) - w).norm() == 0.0);
  CHECK_THROWS_AS(em_e_step(B, mu, CVec::Zero(4)), std::invalid_argument);

  // Against the explicit r formula on a materialized instance.
  BatchProblem problem;
  problem.X = oracles::random_cmat(13, 6, 3);
  problem.d = oracles::random_cvec(14, 6);
  problem.lambda = 0.9;
  problem.sigma2 = 1.3;
  const double xi2 = 0.05;
  const CMat B2 = batch_B(problem, xi2);
  const CVec mu2 = batch_mu(problem, xi2);
  const CVec r = em_e_step(B2, mu2, w);

  std::vector<CVec> xs;
  std::vector<Complex> ds;
  for (int i = 0; i < 6; ++i) {
    xs.push_back(problem.X.row(i).adjoint());  // row i = x(i)^H
    ds.push_back(std::conj(problem.d[i]));     // solver-facing d
  }
  const double c = xi2 / problem.sigma2;
  const CVec r_ref = oracles::direct_B(xs, ds, problem.lambda, c) * w +
                     oracles::direct_mu(xs, ds, problem.lambda, c);
  CHECK((r - r_ref).norm() < 1e-12 * r_ref.norm());
}

TEST_CASE("spals_mcp with zero penalty reaches the least-squares solution") {
  BatchProblem problem;
  problem.X = oracles::random_cmat(21, 5, 3);
  problem.d = oracles::random_cvec(22, 5);
  problem.lambda = 1.0;
  problem.sigma2 = 1.0;
  const double xi2 = select_xi2(problem.X, 1.0, 1.0, 0.9);
  const auto [w, trace] =
      spals_mcp(problem, make_penalty(0.5, 0.0, xi2, 1.0), CVec::Zero(3), 500);
  const CVec ls = (problem.X.adjoint() * problem.X)
                      .ldlt()
                      .solve(problem.X.adjoint() * problem.d);
  CHECK((w - ls).norm() < 1e-6);
  CHECK(trace.iterates.size() == 501);
}

TEST_CASE("spals_mcp keeps the zero fixed point") {
  BatchProblem problem;
  problem.X = oracles::random_cmat(31, 8, 4);
  problem.d = CVec::Zero(8);
  problem.lambda = 0.99;
  problem.sigma2 = 1.0;
  const double xi2 = select_xi2(problem.X, 0.99, 1.0, 0.9);
  const auto [w, trace] =
      spals_mcp(problem, make_penalty(0.5, 2.0, xi2, 1.0), CVec::Zero(4), 25);
  CHECK(w.norm() == 0.0);
  for (const auto& it : trace.iterates) CHECK(it.norm() == 0.0);
}

TEST_CASE("spals_mcp one-dimensional fixed point") {
  // X = [1], d = [2], lambda = 1, sigma2 = 1, xi2 = 1, alpha = 2, gamma = 0.5:
  // B = 0, r = mu = 2, and prox_{0.5,2}(2) = (2/1.5)(1 - 0.25) * 2 = 2.
  BatchProblem problem;
  problem.X = CMat::Ones(1, 1);
  problem.d = CVec::Ones(1) * 2.0;
  problem.lambda = 1.0;
  problem.sigma2 = 1.0;
  const auto [w, trace] =
      spals_mcp(problem, make_penalty(2.0, 0.5, 1.0, 1.0), CVec::Zero(1), 10);
  CHECK(w[0].real() == doctest::Approx(2.0).epsilon(1e-12));
  for (size_t k = 1; k < trace.iterates.size(); ++k)
    CHECK(trace.iterates[k][0].real() == doctest::Approx(2.0));
}

TEST_CASE("EM objective is non-increasing under firm thresholding") {
  BatchProblem problem;
  problem.X = oracles::random_cmat(41, 30, 10);
  CVec w_true = CVec::Zero(10);
  w_true[2] = Complex(1.1, -0.3);
  w_true[7] = Complex(-0.8, 0.2);
  problem.d = problem.X * w_true + 0.05 * oracles::random_cvec(42, 30);
  problem.lambda = 1.0;
  problem.sigma2 = 1.0;
  const double xi2 = select_xi2(problem.X, 1.0, 1.0, 0.9);
  const double alpha = 0.5;
  const double gamma = 0.3 * alpha / xi2;  // beta = 0.3 alpha, firm
  const auto [w, trace] =
      spals_mcp(problem, make_penalty(alpha, gamma, xi2, 1.0), CVec::Zero(10), 50);
  CHECK(trace.firm());
  for (size_t k = 1; k < trace.objective_values.size(); ++k)
    CHECK(trace.objective_values[k] <= trace.objective_values[k - 1] + 1e-12);
}

TEST_CASE("sparls init matches the batch definitions at n = 1") {
  CVec e1 = CVec::Zero(3);
  e1[0] = Complex(1.0, 0.0);
  FilterState state = sparls_mcp_init(e1, Complex(0, 0), make_penalty(0.5, 1.0, 1.0, 1.0), 5, 0.99);
  CHECK((state.B - (CMat::Identity(3, 3) - e1 * e1.adjoint())).norm() == 0.0);
  CHECK(state.mu.norm() == 0.0);
  CHECK(state.w_hat.norm() == 0.0);
  CHECK(state.t == 1);

  FilterState degenerate =
      sparls_mcp_init(CVec::Zero(3), Complex(1, 2), make_penalty(0.5, 1.0, 1.0, 1.0), 5, 0.99);
  CHECK((degenerate.B - CMat::Identity(3, 3)).norm() == 0.0);
  CHECK(degenerate.mu.norm() == 0.0);

  const CVec x = oracles::random_cvec(51, 4);
  const Complex d(0.7, -1.2);
  const double xi2 = 0.2, sigma2 = 1.7;
  FilterState random_state =
      sparls_mcp_init(x, d, make_penalty(0.5, 1.0, xi2, sigma2), 5, 0.9);
  const double c = xi2 / sigma2;
  CHECK((random_state.B - oracles::direct_B({x}, {d}, 0.9, c)).norm() < 1e-14);
  CHECK((random_state.mu - oracles::direct_mu({x}, {d}, 0.9, c)).norm() < 1e-14);
}

TEST_CASE("streaming recursion equals the batch definitions") {
  std::mt19937_64 seeds(1234);
  for (double lambda : {0.9, 0.99, 1.0}) {
    const int n = 60, m = 7;
    std::vector<CVec> xs;
    std::vector<Complex> ds;
    for (int i = 0; i < n; ++i) {
      xs.push_back(oracles::random_cvec(seeds(), m));
      const CVec noise = oracles::random_cvec(seeds(), 1);
      ds.push_back(noise[0]);
    }
    const double xi2 = 0.01, sigma2 = 0.5;
    const double c = xi2 / sigma2;
    FilterState state =
        sparls_mcp_init(xs[0], ds[0], make_penalty(0.5, 1.0, xi2, sigma2), 1, lambda);
    for (int t = 1; t < n; ++t) {
      sparls_mcp_step(state, xs[static_cast<size_t>(t)], ds[static_cast<size_t>(t)]);
      const std::vector<CVec> seen(xs.begin(), xs.begin() + t + 1);
      const std::vector<Complex> seen_d(ds.begin(), ds.begin() + t + 1);
      const CMat B_ref = oracles::direct_B(seen, seen_d, lambda, c);
      const CVec mu_ref = oracles::direct_mu(seen, seen_d, lambda, c);
      CHECK((state.B - B_ref).cwiseAbs().maxCoeff() <
            1e-10 * std::max(1.0, B_ref.cwiseAbs().maxCoeff()));
      CHECK((state.mu - mu_ref).cwiseAbs().maxCoeff() <
            1e-10 * std::max(1.0, mu_ref.cwiseAbs().maxCoeff()));
      CHECK((state.B - state.B.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("zero sample at lambda = 1 leaves B and mu unchanged") {
  const CVec x = oracles::random_cvec(61, 5);
  FilterState state =
      sparls_mcp_init(x, Complex(0.4, 0.1), make_penalty(0.5, 1.0, 0.05, 1.0), 3, 1.0);
  const CMat B_before = state.B;
  const CVec mu_before = state.mu;
  sparls_mcp_step(state, CVec::Zero(5), Complex(0, 0));
  CHECK((state.B - B_before).norm() == 0.0);
  CHECK((state.mu - mu_before).norm() == 0.0);
  CHECK(state.t == 2);
}

TEST_CASE("warm-started runs are bit-identical") {
  auto run = [&]() {
    std::mt19937_64 seeds(777);
    FilterState state = sparls_mcp_init(oracles::random_cvec(seeds(), 6), Complex(1, 0),
                                        make_penalty(0.5, 5.0, 0.01, 1.0), 5, 0.99);
    for (int t = 0; t < 40; ++t) {
      const CVec noise = oracles::random_cvec(seeds(), 1);
      sparls_mcp_step(state, oracles::random_cvec(seeds(), 6), noise[0]);
    }
    return state.w_hat;
  };
  const CVec a = run(), b = run();
  for (int j = 0; j < 6; ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("rls converges on a noise-free static channel") {
  const int m = 6, n = 5 * m;
  CVec w_true = CVec::Zero(m);
  w_true[3] = Complex(0.9, -0.4);  // 1-sparse
  std::mt19937_64 seeds(88);
  RlsState state = rls_init(m, 1.0, 1e-8);
  for (int t = 0; t < n; ++t) {
    const CVec x = oracles::random_cvec(seeds(), m);
    rls_step(state, x, w_true.dot(x));
  }
  CHECK((state.w_hat - w_true).norm() < 1e-6);
}

TEST_CASE("rls with zero desired response keeps a zero estimate") {
  RlsState state = rls_init(4, 0.99, 1e-2);
  std::mt19937_64 seeds(89);
  for (int t = 0; t < 30; ++t)
    rls_step(state, oracles::random_cvec(seeds(), 4), Complex(0, 0));
  CHECK(state.w_hat.norm() == 0.0);
}

TEST_CASE("rls matches the batch weighted LS solution") {
  const int n = 50, m = 5;
  const CMat X = oracles::random_cmat(91, n, m);
  const CVec d_obs = oracles::random_cvec(92, n);
  RlsState state = rls_init(m, 1.0, 1e-8);
  for (int i = 0; i < n; ++i) {
    const CVec x = X.row(i).adjoint();
    rls_step(state, x, d_obs[i]);
  }
  // argmin sum |d(i) - w^H x(i)|^2 => (X^H X) w = sum x(i) conj(d(i)).
  CVec rhs = CVec::Zero(m);
  for (int i = 0; i < n; ++i) rhs += X.row(i).adjoint() * std::conj(d_obs[i]);
  const CVec ls = (X.adjoint() * X).ldlt().solve(rhs);
  CHECK((state.w_hat - ls).norm() < 1e-6);
}

TEST_CASE("sparls_l1 equals sparls_mcp at gamma = 0 and thresholds fully below xi2 gamma") {
  std::mt19937_64 seeds(99);
  std::vector<CVec> xs;
  std::vector<Complex> ds;
  for (int t = 0; t < 30; ++t) {
    xs.push_back(oracles::random_cvec(seeds(), 5));
    ds.push_back(oracles::random_cvec(seeds(), 1)[0]);
  }
  auto run = [&](bool soft, double gamma) {
    FilterState state =
        sparls_mcp_init(xs[0], ds[0], make_penalty(0.5, gamma, 0.02, 1.0), 4, 0.95);
    for (size_t t = 1; t < xs.size(); ++t) {
      if (soft)
        sparls_l1_step(state, xs[t], ds[t]);
      else
        sparls_mcp_step(state, xs[t], ds[t]);
    }
    return state.w_hat;
  };
  const CVec mcp0 = run(false, 0.0), l10 = run(true, 0.0);
  for (int j = 0; j < 5; ++j) CHECK(mcp0[j] == l10[j]);

  // A huge threshold freezes the estimate at zero.
  const CVec frozen = run(true, 1e9);
  CHECK(frozen.norm() == 0.0);
}

TEST_CASE("sparls_l1 one-dimensional fixed point matches hand iteration") {
  // Single repeated scalar sample: B and mu are constant across EM iterations
  // within a step, so the update is w <- soft(B w + mu, xi2 gamma).
  const double xi2 = 0.5, sigma2 = 1.0, gamma = 0.4, lambda = 1.0;
  CVec x1 = CVec::Ones(1);
  const Complex d1(2.0, 0.0);
  FilterState state =
      sparls_mcp_init(x1, d1, make_penalty(2.0, gamma, xi2, sigma2), 7, lambda);
  sparls_l1_step(state, x1, d1);

  const double c = xi2 / sigma2;
  double b = 1.0 - c * 2.0;           // two accumulated unit samples
  double mu = c * 2.0 * d1.real();    // both with conj(d) = 2
  double w = 0.0;
  for (int k = 0; k < 7; ++k) {
    const double r = b * w + mu;
    const double threshold = xi2 * gamma;
    w = std::abs(r) <= threshold ? 0.0 : r - threshold * (r > 0 ? 1.0 : -1.0);
  }
  CHECK(state.w_hat[0].real() == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("baseline sanity: all three estimators agree without noise or penalty") {
  const int n = 80, m = 4;
  CVec w_true = CVec::Zero(m);
  w_true[1] = Complex(0.8, 0.3);
  w_true[2] = Complex(-0.2, 0.0);
  std::mt19937_64 seeds(111);
  std::vector<CVec> xs;
  std::vector<Complex> ds;
  CMat X(n, m);
  for (int i = 0; i < n; ++i) {
    xs.push_back(oracles::random_cvec(seeds(), m));
    ds.push_back(w_true.dot(xs.back()));
    X.row(i) = xs.back().adjoint();
  }
  const double xi2 = select_xi2(X, 1.0, 1.0, 0.9);  // bound over the full stream

  FilterState mcp = sparls_mcp_init(xs[0], ds[0], make_penalty(0.5, 0.0, xi2, 1.0), 10, 1.0);
  FilterState l1 = mcp;
  RlsState rls = rls_init(m, 1.0, 1e-8);
  rls_step(rls, xs[0], ds[0]);
  for (int t = 1; t < n; ++t) {
    sparls_mcp_step(mcp, xs[static_cast<size_t>(t)], ds[static_cast<size_t>(t)]);
    sparls_l1_step(l1, xs[static_cast<size_t>(t)], ds[static_cast<size_t>(t)]);
    rls_step(rls, xs[static_cast<size_t>(t)], ds[static_cast<size_t>(t)]);
  }
  CHECK((mcp.w_hat - w_true).norm() < 1e-4);
  CHECK((l1.w_hat - w_true).norm() < 1e-4);
  CHECK((rls.w_hat - w_true).norm() < 1e-4);
  CHECK((mcp.w_hat - l1.w_hat).norm() < 1e-4);
  CHECK((mcp.w_hat - rls.w_hat).norm() < 1e-4);
}

TEST_CASE("grouped streaming M-step enforces the firm regime") {
  GroupLayout layout({2, 2});
  const CVec x = oracles::random_cvec(121, 4);
  FilterState state =
      sparls_mcp_init(x, Complex(1, 0), make_penalty(0.1, 100.0, 0.05, 1.0), 3, 0.99);
  CHECK_THROWS_AS(
      sparls_mcp_step(state, oracles::random_cvec(122, 4), Complex(0.5, 0), layout),
      std::domain_error);
}
