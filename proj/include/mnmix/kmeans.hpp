// mnmix/kmeans.hpp

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

#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mnmix/errors.hpp"
#include "mnmix/matrix_normal.hpp"
#include "mnmix/random.hpp"

namespace mnmix {

namespace detail {

/// Stacks vec(Y_i) as rows of an n x (r p) matrix.
inline Eigen::MatrixXd vectorize_stack(const MatrixStack& stack) {
  const auto n = static_cast<Eigen::Index>(stack.size());
  const auto d = stack.front().size();
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    x.row(i) = Eigen::Map<const Eigen::VectorXd>(stack[static_cast<std::size_t>(i)].data(), d);
  return x;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding on the vectorized stack.
/// Deterministic for a given seed. Empty clusters are re-seeded at the point
/// farthest from its current center. `wcss_trace`, when given, records the
/// within-cluster sum of squares after each assignment step.
inline std::vector<int> kmeans_vectorized(const MatrixStack& stack, int k, Seed seed,
                                          int max_iter = 100,
                                          std::vector<double>* wcss_trace = nullptr) {
  if (stack.empty()) throw DimensionMismatch("empty matrix stack");
  const auto n = static_cast<int>(stack.size());
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  const Eigen::MatrixXd x = detail::vectorize_stack(stack);

  std::mt19937_64 gen(seed);
  const auto pick_uniform = [&]() {
    return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(gen));
  };

  // k-means++ seeding: next center drawn proportionally to the squared
  // distance from the nearest chosen center.
  Eigen::MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(pick_uniform());
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int pick;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen) * total;
      pick = n - 1;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += d2(i);
        if (u <= cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = pick_uniform();
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double wcss = 0.0;
    Eigen::VectorXd nearest(n);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
      nearest(i) = best_d;
      wcss += best_d;
    }
    if (wcss_trace) wcss_trace->push_back(wcss);

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++counts[static_cast<std::size_t>(lab)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // steal the worst-represented point, but never empty another cluster
      int far = -1;
      for (int i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || nearest(i) > nearest(far)) far = i;
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      nearest(far) = 0.0;
      changed = true;
    }

    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    if (!changed && iter > 0) break;
  }
  return labels;
}

}  // namespace mnmix
