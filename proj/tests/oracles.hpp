// tests/oracles.hpp

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

// Reference implementations used only to check the library. They take the
// slow, direct route on purpose: dense vec/Kronecker densities, extended
// precision mixture sums, O(n^2) pair counting.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mnmix/matrix_normal.hpp"
#include "mnmix/mixture.hpp"

namespace oracles {

/// Exact elementwise equality (shape included).
inline bool exact_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

/// Dense multivariate normal log-density via LDLT (a different factorization
/// and solve path than the library uses).
inline double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                         const Eigen::MatrixXd& cov) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  const Eigen::VectorXd diff = x - mu;
  const double quad = diff.dot(ldlt.solve(diff));
  const double logdet = ldlt.vectorD().array().log().sum();
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * mnmix::kLogTwoPi + logdet + quad);
}

/// Eq.-by-definition matrix normal log-density: vec(Y) ~ N(vec(M), V (x) U).
inline double vec_matnorm_logpdf(const Eigen::MatrixXd& y, const mnmix::ComponentParams& theta) {
  return mvn_logpdf(vec(y), vec(theta.mean), kron(theta.col_cov, theta.row_cov));
}

/// Observed mixture log-likelihood with the densities summed in extended
/// precision through the probability domain.
inline double mixture_loglik_direct(const mnmix::MatrixStack& stack,
                                    const mnmix::MixtureModel& model) {
  long double total = 0.0L;
  for (const auto& y : stack) {
    long double s = 0.0L;
    for (int j = 0; j < model.count(); ++j)
      s += static_cast<long double>(model.weights(j)) *
           std::exp(static_cast<long double>(
               vec_matnorm_logpdf(y, model.components[static_cast<std::size_t>(j)])));
    total += std::log(s);
  }
  return static_cast<double>(total);
}

/// Bayes-rule responsibilities computed directly in the probability domain.
inline Eigen::MatrixXd bayes_responsibilities(const mnmix::MatrixStack& stack,
                                              const mnmix::MixtureModel& model) {
  Eigen::MatrixXd alpha(static_cast<Eigen::Index>(stack.size()), model.count());
  for (std::size_t i = 0; i < stack.size(); ++i) {
    std::vector<long double> numer(static_cast<std::size_t>(model.count()));
    long double denom = 0.0L;
    for (int j = 0; j < model.count(); ++j) {
      numer[static_cast<std::size_t>(j)] =
          static_cast<long double>(model.weights(j)) *
          std::exp(static_cast<long double>(
              vec_matnorm_logpdf(stack[i], model.components[static_cast<std::size_t>(j)])));
      denom += numer[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < model.count(); ++j)
      alpha(static_cast<Eigen::Index>(i), j) =
          static_cast<double>(numer[static_cast<std::size_t>(j)] / denom);
  }
  return alpha;
}

/// ARI from direct O(n^2) pair counting.
inline double ari_paircount(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same_a = a[i] == a[j];
      const bool same_b = b[i] == b[j];
      if (same_a && same_b)
        ++n11;
      else if (same_a)
        ++n10;
      else if (same_b)
        ++n01;
      else
        ++n00;
    }
  const double denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
  if (denom == 0.0) return 1.0;
  return 2.0 * (n11 * n00 - n10 * n01) / denom;
}

/// Best-permutation accuracy by trying every relabeling and counting matches
/// directly over the label vectors.
inline double accuracy_bruteforce(const std::vector<int>& pred, const std::vector<int>& truth) {
  int k = 0;
  for (int lab : pred) k = std::max(k, lab + 1);
  for (int lab : truth) k = std::max(k, lab + 1);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long matched = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++matched;
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

/// Empirical covariance of the vectorized stack.
inline Eigen::MatrixXd empirical_vec_covariance(const mnmix::MatrixStack& stack) {
  const auto n = static_cast<Eigen::Index>(stack.size());
  const auto d = stack.front().size();
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = vec(stack[static_cast<std::size_t>(i)]);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen,
                                     double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
  return m;
}

/// Well-conditioned random SPD matrix.
inline Eigen::MatrixXd random_spd(Eigen::Index dim, std::mt19937_64& gen) {
  Eigen::MatrixXd a = random_matrix(dim, dim, gen);
  std::uniform_real_distribution<double> unif(0.3, 1.3);
  Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(dim) +
                      unif(gen) * Eigen::MatrixXd::Identity(dim, dim);
  return 0.5 * (s + s.transpose());
}

inline mnmix::ComponentParams random_component(Eigen::Index rows, Eigen::Index cols,
                                               std::mt19937_64& gen) {
  return {random_matrix(rows, cols, gen), random_spd(rows, gen), random_spd(cols, gen)};
}

inline std::vector<int> random_labels(std::size_t n, int k, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(n);
  for (auto& lab : out) lab = pick(gen);
  return out;
}

}  // namespace oracles
