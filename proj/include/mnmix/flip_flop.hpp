// mnmix/flip_flop.hpp

// Copyright 2026  The mnmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//  http://www.apache.org/licenses/LICENSE-2.0

// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mnmix/errors.hpp"
#include "mnmix/matrix_normal.hpp"

namespace mnmix {

/// Alternating row/column covariance MLE. `weights` generalizes the uniform
/// estimator to responsibility-weighted form; `row_cov_init` overrides the
/// identity start (identifiability experiments only).
struct FlipFlopConfig {
  double tolerance = 1e-6;
  int max_iter = 100;
  std::optional<Eigen::VectorXd> weights;
  std::optional<Eigen::MatrixXd> row_cov_init;
  bool record_loglik = true;
};

struct FlipFlopResult {
  ComponentParams params;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;
};

/// Symmetric eigendecomposition, eigenvalues clamped into [floor, cap],
/// reconstruct. Keeps covariance iterates inside a compact SPD region.
inline Eigen::MatrixXd clamp_eigenvalues(const Eigen::MatrixXd& s, double floor, double cap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success)
    throw NotPositiveDefinite("eigendecomposition failed during clamping");
  Eigen::VectorXd d = eig.eigenvalues().cwiseMax(floor).cwiseMin(cap);
  Eigen::MatrixXd out = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

struct EigenvalueInterval {
  double floor;
  double cap;
};

namespace detail {

inline Eigen::VectorXd resolve_weights(const MatrixStack& stack,
                                       const std::optional<Eigen::VectorXd>& weights) {
  const auto n = static_cast<Eigen::Index>(stack.size());
  if (!weights) return Eigen::VectorXd::Ones(n);
  if (weights->size() != n)
    throw DimensionMismatch("weight vector length does not match the stack");
  if ((weights->array() < 0.0).any())
    throw std::invalid_argument("weights must be nonnegative");
  if (!(weights->sum() > 0.0)) throw AllWeightsZero("all weights are zero");
  return *weights;
}

inline void check_stack(const MatrixStack& stack) {
  if (stack.empty()) throw DimensionMismatch("empty matrix stack");
  const auto r = stack.front().rows();
  const auto p = stack.front().cols();
  for (const auto& y : stack)
    if (y.rows() != r || y.cols() != p)
      throw DimensionMismatch("stack matrices have inconsistent dimensions");
}

}  // namespace detail

/// Weighted average of the stack, sum_i w_i Y_i / sum_i w_i.
inline Eigen::MatrixXd weighted_mean(const MatrixStack& stack, const Eigen::VectorXd& weights) {
  detail::check_stack(stack);
  const Eigen::VectorXd w = detail::resolve_weights(stack, weights);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(stack.front().rows(), stack.front().cols());
  for (std::size_t i = 0; i < stack.size(); ++i) acc += w(static_cast<Eigen::Index>(i)) * stack[i];
  return acc / w.sum();
}

/// Weighted total log-likelihood, sum_i w_i log f(Y_i | theta).
inline double stack_loglik(const MatrixStack& stack, const ComponentParams& theta,
                           const Eigen::VectorXd& weights) {
  if (static_cast<Eigen::Index>(stack.size()) != weights.size())
    throw DimensionMismatch("weight vector length does not match the stack");
  double acc = 0.0;
  for (std::size_t i = 0; i < stack.size(); ++i)
    acc += weights(static_cast<Eigen::Index>(i)) * matnorm_logpdf(stack[i], theta);
  return acc;
}

/// Alternating covariance iteration around a fixed mean. When `clamp` is set,
/// every iterate is pushed into the interval so the next factorization cannot
/// fail; otherwise a non-PD iterate raises NotPositiveDefinite. The returned
/// params are scale-normalized (trace U = r).
inline FlipFlopResult flip_flop_covariances(const MatrixStack& stack, const Eigen::MatrixXd& mean,
                                            const FlipFlopConfig& cfg,
                                            const std::optional<EigenvalueInterval>& clamp = {}) {
  detail::check_stack(stack);
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  const Eigen::VectorXd w = detail::resolve_weights(stack, cfg.weights);
  const double sw = w.sum();
  const auto r = mean.rows();
  const auto p = mean.cols();
  if (stack.front().rows() != r || stack.front().cols() != p)
    throw DimensionMismatch("mean dimensions do not match the stack");

  MatrixStack resid;
  resid.reserve(stack.size());
  for (const auto& y : stack) resid.push_back(y - mean);

  const auto maybe_clamp = [&](Eigen::MatrixXd s) {
    if (clamp) return clamp_eigenvalues(s, clamp->floor, clamp->cap);
    return s;
  };

  // U <- sum_i w_i R_i V^-1 R_i' / (p sum w)
  const auto update_row_cov = [&](const Eigen::MatrixXd& col_cov) {
    const auto llt = detail::cholesky(col_cov, "column covariance iterate");
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(r, r);
    for (std::size_t i = 0; i < resid.size(); ++i) {
      Eigen::MatrixXd a = llt.matrixL().solve(resid[i].transpose());  // p x r
      scatter += w(static_cast<Eigen::Index>(i)) * (a.transpose() * a);
    }
    scatter = 0.5 * (scatter + scatter.transpose());
    return maybe_clamp(scatter / (static_cast<double>(p) * sw));
  };

  // V <- sum_i w_i R_i' U^-1 R_i / (r sum w)
  const auto update_col_cov = [&](const Eigen::MatrixXd& row_cov) {
    const auto llt = detail::cholesky(row_cov, "row covariance iterate");
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < resid.size(); ++i) {
      Eigen::MatrixXd b = llt.matrixL().solve(resid[i]);  // r x p
      scatter += w(static_cast<Eigen::Index>(i)) * (b.transpose() * b);
    }
    scatter = 0.5 * (scatter + scatter.transpose());
    return maybe_clamp(scatter / (static_cast<double>(r) * sw));
  };

  FlipFlopResult result;
  Eigen::MatrixXd u0 = cfg.row_cov_init ? maybe_clamp(*cfg.row_cov_init)
                                        : Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd v0 = update_col_cov(u0);
  Eigen::MatrixXd u1 = update_row_cov(v0);
  Eigen::MatrixXd v1 = update_col_cov(u1);
  int iter = 1;
  if (cfg.record_loglik)
    result.loglik_trace.push_back(stack_loglik(stack, {mean, u1, v1}, w));

  while ((u1 - u0).norm() > cfg.tolerance || (v1 - v0).norm() > cfg.tolerance) {
    if (iter >= cfg.max_iter) break;
    u0 = u1;
    v0 = v1;
    u1 = update_row_cov(v0);
    v1 = update_col_cov(u1);
    ++iter;
    if (cfg.record_loglik)
      result.loglik_trace.push_back(stack_loglik(stack, {mean, u1, v1}, w));
  }

  result.converged =
      (u1 - u0).norm() <= cfg.tolerance && (v1 - v0).norm() <= cfg.tolerance;
  result.iterations = iter;
  result.params = normalize_scale({mean, u1, v1});
  return result;
}

/// Maximum likelihood fit of (M, U, V): mean by weighted average, covariances
/// by the alternating iteration started from the identity.
inline FlipFlopResult flip_flop_mle(const MatrixStack& stack, const FlipFlopConfig& cfg = {}) {
  detail::check_stack(stack);
  const Eigen::VectorXd w = detail::resolve_weights(stack, cfg.weights);
  if (w.sum() < 2.0)
    throw std::invalid_argument("need n >= 2 samples (or effective weight >= 2)");
  const Eigen::MatrixXd mean = weighted_mean(stack, w);
  FlipFlopConfig inner = cfg;
  inner.weights = w;
  return flip_flop_covariances(stack, mean, inner);
}

}  // namespace mnmix
