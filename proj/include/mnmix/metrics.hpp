// mnmix/metrics.hpp

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

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "mnmix/errors.hpp"

namespace mnmix {

namespace detail {

/// Maps arbitrary label values onto 0..k-1, preserving value order.
inline std::vector<int> compact_labels(const std::vector<int>& labels, int* k_out) {
  std::map<int, int> remap;
  for (int lab : labels) remap.emplace(lab, 0);
  int next = 0;
  for (auto& [value, idx] : remap) idx = next++;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  if (k_out) *k_out = next;
  return out;
}

inline double comb2(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace detail

/// Chance-corrected pair-counting agreement between two partitions. 1 for
/// identical partitions, about 0 for independent ones. Arranged over integer
/// products so small exact cases (like -0.5) come out exact.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw LengthMismatch("label vectors differ in length");
  if (a.size() < 2) throw LengthMismatch("need at least two labels");
  int ka = 0, kb = 0;
  const std::vector<int> ca = detail::compact_labels(a, &ka);
  const std::vector<int> cb = detail::compact_labels(b, &kb);
  Eigen::MatrixXd contingency = Eigen::MatrixXd::Zero(ka, kb);
  for (std::size_t i = 0; i < ca.size(); ++i) contingency(ca[i], cb[i]) += 1.0;

  double index = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) index += detail::comb2(contingency(i, j));
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i) sum_a += detail::comb2(contingency.row(i).sum());
  for (int j = 0; j < kb; ++j) sum_b += detail::comb2(contingency.col(j).sum());
  const double total = detail::comb2(static_cast<double>(a.size()));

  const double numerator = total * index - sum_a * sum_b;
  const double denominator = total * 0.5 * (sum_a + sum_b) - sum_a * sum_b;
  if (denominator == 0.0) return 1.0;  // both partitions trivial and equal
  return numerator / denominator;
}

/// Fraction of matching labels under the best relabeling of `pred`,
/// by exhaustive search over label permutations.
inline double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw LengthMismatch("label vectors differ in length");
  if (pred.empty()) throw LengthMismatch("need at least one label");
  int kp = 0, kt = 0;
  const std::vector<int> cp = detail::compact_labels(pred, &kp);
  const std::vector<int> ct = detail::compact_labels(truth, &kt);
  const int k = std::max(kp, kt);
  if (k > 10) throw TooManyClusters("accuracy supports at most 10 clusters, got " +
                                    std::to_string(k));

  std::vector<std::vector<long>> confusion(static_cast<std::size_t>(k),
                                           std::vector<long>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < cp.size(); ++i)
    ++confusion[static_cast<std::size_t>(ct[i])][static_cast<std::size_t>(cp[i])];

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long matched = 0;
    for (int q = 0; q < k; ++q)
      matched += confusion[static_cast<std::size_t>(perm[static_cast<std::size_t>(q)])]
                          [static_cast<std::size_t>(q)];
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

}  // namespace mnmix
