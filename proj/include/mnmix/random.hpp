// mnmix/random.hpp

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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mnmix {

using Seed = std::uint64_t;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic child-seed derivation. Distinct (a, b) streams from the same
/// base seed never collide in practice; used for restarts, folds, replicates.
inline Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ splitmix64(a + 1)) ^ splitmix64(b + 0x517cc1b727220a95ull));
}

/// Fills a matrix with independent standard normal draws, column by column.
inline Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                              std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal(gen);
  return z;
}

}  // namespace mnmix
