// SPDX-License-Identifier: Apache-2.0
#include "sparls/penalty.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sparls {

void PenaltyConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("PenaltyConfig: alpha must be > 0");
  if (!(xi2 > 0.0)) throw std::invalid_argument("PenaltyConfig: xi2 must be > 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("PenaltyConfig: sigma2 must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("PenaltyConfig: gamma must be >= 0");
}

GroupLayout::GroupLayout(std::vector<int> group_sizes) : sizes_(std::move(group_sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("GroupLayout: empty partition");
  offsets_.reserve(sizes_.size());
  for (int p : sizes_) {
    if (p <= 0) throw std::invalid_argument("GroupLayout: group sizes must be positive");
    offsets_.push_back(dim_);
    dim_ += p;
  }
}

GroupLayout GroupLayout::uniform(int num_groups, int group_size) {
  if (num_groups <= 0) throw std::invalid_argument("GroupLayout: num_groups must be positive");
  return GroupLayout(std::vector<int>(static_cast<size_t>(num_groups), group_size));
}

namespace {

void check_positive(double beta, double alpha) {
  if (!(beta > 0.0)) throw std::domain_error("prox: beta must be > 0");
  if (!(alpha > 0.0)) throw std::domain_error("prox: alpha must be > 0");
}

void check_layout(const CVec& r, const GroupLayout& layout) {
  if (layout.dim() != r.size())
    throw std::invalid_argument("GroupLayout does not match vector dimension");
}

// Firm shrinkage gain applied to the modulus t: prox output is gain * r.
double firm_gain(double t, double beta, double alpha) {
  if (t <= beta) return 0.0;
  if (t <= alpha) return (alpha / (alpha - beta)) * (1.0 - beta / t);
  return 1.0;
}

}  // namespace

double mcp_value(double w_abs, double alpha) {
  if (w_abs < 0.0) throw std::domain_error("mcp_value: |w| must be nonnegative");
  if (!(alpha > 0.0)) throw std::domain_error("mcp_value: alpha must be > 0");
  if (w_abs <= alpha) return w_abs - w_abs * w_abs / (2.0 * alpha);
  return 0.5 * alpha;
}

double moreau_env(double w_abs, double alpha) {
  if (w_abs < 0.0) throw std::domain_error("moreau_env: |w| must be nonnegative");
  if (!(alpha > 0.0)) throw std::domain_error("moreau_env: alpha must be > 0");
  if (w_abs <= alpha) return w_abs * w_abs / (2.0 * alpha);
  return w_abs - 0.5 * alpha;
}

Complex prox_scalar(Complex r, double beta, double alpha, TiePolicy tie) {
  check_positive(beta, alpha);
  const double t = std::abs(r);
  if (beta < alpha) {
    return firm_gain(t, beta, alpha) * r;
  }
  // Hard regime (covers beta == alpha, where sqrt(alpha*beta) == alpha).
  const double threshold = std::sqrt(alpha * beta);
  if (t < threshold) return Complex(0.0, 0.0);
  if (t > threshold) return r;
  return tie == TiePolicy::Keep ? r : Complex(0.0, 0.0);
}

CVec prox_vector(const CVec& r, double beta, double alpha, TiePolicy tie) {
  check_positive(beta, alpha);
  CVec out(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) out[j] = prox_scalar(r[j], beta, alpha, tie);
  return out;
}

CVec prox_group(const CVec& r, const GroupLayout& layout, double beta, double alpha) {
  check_positive(beta, alpha);
  if (beta >= alpha)
    throw std::domain_error("prox_group: requires beta < alpha (firm regime only)");
  check_layout(r, layout);
  CVec out(r.size());
  for (int l = 0; l < layout.num_groups(); ++l) {
    auto seg = r.segment(layout.offset(l), layout.size(l));
    out.segment(layout.offset(l), layout.size(l)) = firm_gain(seg.norm(), beta, alpha) * seg;
  }
  return out;
}

Complex prox_soft(Complex r, double threshold) {
  if (threshold < 0.0) throw std::domain_error("prox_soft: threshold must be >= 0");
  const double t = std::abs(r);
  if (t <= threshold) return Complex(0.0, 0.0);
  return (1.0 - threshold / t) * r;
}

CVec prox_soft_vector(const CVec& r, double threshold) {
  CVec out(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) out[j] = prox_soft(r[j], threshold);
  return out;
}

CVec prox_group_soft(const CVec& r, const GroupLayout& layout, double threshold) {
  if (threshold < 0.0) throw std::domain_error("prox_group_soft: threshold must be >= 0");
  check_layout(r, layout);
  CVec out = CVec::Zero(r.size());
  for (int l = 0; l < layout.num_groups(); ++l) {
    auto seg = r.segment(layout.offset(l), layout.size(l));
    const double t = seg.norm();
    if (t > threshold)
      out.segment(layout.offset(l), layout.size(l)) = (1.0 - threshold / t) * seg;
  }
  return out;
}

double mcp_penalty(const CVec& w, double alpha) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) total += mcp_value(std::abs(w[j]), alpha);
  return total;
}

double group_mcp_penalty(const CVec& w, const GroupLayout& layout, double alpha) {
  check_layout(w, layout);
  double total = 0.0;
  for (int l = 0; l < layout.num_groups(); ++l)
    total += mcp_value(w.segment(layout.offset(l), layout.size(l)).norm(), alpha);
  return total;
}

}  // namespace sparls
