// mnmix/model_selection.hpp

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
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mnmix/mixture.hpp"
#include "mnmix/parallel.hpp"
#include "mnmix/random.hpp"

namespace mnmix {

enum class SplitKind { kfold, holdout };

/// Cross-validated penalized likelihood protocol: candidate cluster counts,
/// split scheme and how many independent re-splits to average over.
struct CvplConfig {
  std::vector<int> k_values;
  SplitKind split = SplitKind::kfold;
  int folds = 5;
  double holdout_fraction = 0.3;
  int replicates = 1;
  Seed seed = 0;
  int n_threads = 1;
};

struct CvplRow {
  PenaltyKind kind;
  double lambda;
  int k;
  double mean_cvpl;
  double std_error;
};

struct CvplTable {
  std::vector<CvplRow> rows;
  int selected_k = 0;
};

/// Held-out penalized log-likelihood per test sample, oriented so that
/// higher is better: [loglik(test | fit(train)) - lambda P(fitted means)]
/// divided by the test size. The penalty is evaluated at the train fit.
inline double cvpl_score(const MatrixStack& train, const MatrixStack& test, int k,
                         const PenaltySpec& penalty, const FitConfig& cfg) {
  if (test.empty()) throw DimensionMismatch("empty test stack");
  if (train.empty() || train.front().rows() != test.front().rows() ||
      train.front().cols() != test.front().cols())
    throw DimensionMismatch("train/test stacks are dimension-inconsistent");
  const FitReport fit = fit_em(train, k, penalty, cfg);
  const double penalized = observed_loglik(test, fit.model) -
                           penalty.lambda * penalty_value(fit.model, penalty);
  return penalized / static_cast<double>(test.size());
}

namespace detail {

struct Split {
  MatrixStack train;
  MatrixStack test;
};

inline Split make_split(const MatrixStack& stack, const std::vector<int>& perm, int fold,
                        const CvplConfig& cfg) {
  Split out;
  const auto n = static_cast<int>(stack.size());
  if (cfg.split == SplitKind::kfold) {
    for (int i = 0; i < n; ++i) {
      const auto& y = stack[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      if (i % cfg.folds == fold)
        out.test.push_back(y);
      else
        out.train.push_back(y);
    }
  } else {
    int n_test = static_cast<int>(std::lround(cfg.holdout_fraction * n));
    n_test = std::clamp(n_test, 1, n - 1);
    for (int i = 0; i < n; ++i) {
      const auto& y = stack[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      if (i < n_test)
        out.test.push_back(y);
      else
        out.train.push_back(y);
    }
  }
  return out;
}

}  // namespace detail

/// Averages cvpl_score over folds and replicates for every candidate k and
/// selects the argmax (ties toward smaller k). Tasks run in parallel when
/// n_threads > 1; the result is identical either way.
inline CvplTable select_k(const MatrixStack& stack, const PenaltySpec& penalty,
                          const CvplConfig& sel, const FitConfig& cfg) {
  if (sel.k_values.empty()) throw std::invalid_argument("k_values must be nonempty");
  for (int k : sel.k_values)
    if (k < 1) throw std::invalid_argument("candidate k must be >= 1");
  if (sel.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (sel.split == SplitKind::kfold && sel.folds < 2)
    throw std::invalid_argument("fold count must be >= 2");
  if (sel.split == SplitKind::holdout &&
      !(sel.holdout_fraction > 0.0 && sel.holdout_fraction < 1.0))
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");

  const int folds = sel.split == SplitKind::kfold ? sel.folds : 1;
  const auto n = static_cast<int>(stack.size());
  const int n_k = static_cast<int>(sel.k_values.size());

  // one permutation per replicate, shared by every k and fold
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(sel.replicates));
  for (int t = 0; t < sel.replicates; ++t) {
    auto& perm = perms[static_cast<std::size_t>(t)];
    perm.resize(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 gen(derive_seed(sel.seed, 0x5e1ec7, static_cast<std::uint64_t>(t)));
    std::shuffle(perm.begin(), perm.end(), gen);
  }

  const int tasks = n_k * sel.replicates * folds;
  std::vector<double> scores(static_cast<std::size_t>(tasks));
  parallel_for_index(tasks, sel.n_threads, [&](int task) {
    const int ki = task / (sel.replicates * folds);
    const int t = (task / folds) % sel.replicates;
    const int f = task % folds;
    detail::Split split = detail::make_split(stack, perms[static_cast<std::size_t>(t)], f, sel);
    FitConfig task_cfg = cfg;
    task_cfg.seed = derive_seed(sel.seed, static_cast<std::uint64_t>(task) + 0xcf01, cfg.seed);
    scores[static_cast<std::size_t>(task)] =
        cvpl_score(split.train, split.test, sel.k_values[static_cast<std::size_t>(ki)],
                   penalty, task_cfg);
  });

  CvplTable table;
  for (int ki = 0; ki < n_k; ++ki) {
    const int m = sel.replicates * folds;
    double mean = 0.0;
    for (int s = 0; s < m; ++s) mean += scores[static_cast<std::size_t>(ki * m + s)];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (int s = 0; s < m; ++s) {
      const double d = scores[static_cast<std::size_t>(ki * m + s)] - mean;
      var += d * d;
    }
    const double std_error =
        m > 1 ? std::sqrt(var / static_cast<double>(m - 1)) / std::sqrt(static_cast<double>(m))
              : 0.0;
    table.rows.push_back({penalty.kind, penalty.lambda,
                          sel.k_values[static_cast<std::size_t>(ki)], mean, std_error});
  }

  const CvplRow* best = nullptr;
  for (const auto& row : table.rows)
    if (!best || row.mean_cvpl > best->mean_cvpl ||
        (row.mean_cvpl == best->mean_cvpl && row.k < best->k))
      best = &row;
  table.selected_k = best->k;
  return table;
}

}  // namespace mnmix
