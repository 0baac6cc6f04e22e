// mnmix/generators.hpp

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

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mnmix/errors.hpp"
#include "mnmix/matrix_normal.hpp"
#include "mnmix/random.hpp"

namespace mnmix {

/// AR(1)-structured correlation matrix, entries rho^{|a-b|}.
inline Eigen::MatrixXd ar_covariance(int dim, double rho) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(std::abs(rho) < 1.0)) throw InvalidRho("need |rho| < 1, got " + std::to_string(rho));
  Eigen::VectorXd powers(dim);
  powers(0) = 1.0;
  for (int d = 1; d < dim; ++d) powers(d) = powers(d - 1) * rho;
  Eigen::MatrixXd out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out(i, j) = powers(std::abs(i - j));
  return out;
}

namespace detail {

inline int block_halfwidth(int rows, int cols) { return std::min(rows, cols) / 6; }

inline void check_mean_dims(int rows, int cols) {
  if (rows < 5 || cols < 5)
    throw TooSmall("mean images need r, p >= 5, got " + std::to_string(rows) + "x" +
                   std::to_string(cols));
}

}  // namespace detail

/// Centered filled square of the given amplitude (rank 1 when nonzero).
inline Eigen::MatrixXd mean_square(int rows, int cols, double amplitude) {
  detail::check_mean_dims(rows, cols);
  const int w = detail::block_halfwidth(rows, cols);
  const int cr = (rows - 1) / 2;
  const int cp = (cols - 1) / 2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (std::max(std::abs(i - cr), std::abs(j - cp)) <= w) m(i, j) = amplitude;
  return m;
}

/// Centered plus/cross shape of the given amplitude (rank 2 while the arms
/// do not fill the matrix).
inline Eigen::MatrixXd mean_cross(int rows, int cols, double amplitude) {
  detail::check_mean_dims(rows, cols);
  const int w = detail::block_halfwidth(rows, cols);
  const int cr = (rows - 1) / 2;
  const int cp = (cols - 1) / 2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (std::abs(i - cr) <= w || std::abs(j - cp) <= w) m(i, j) = amplitude;
  return m;
}

enum class Scenario { I, II, III, IV };

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return Scenario::I;
  if (s == "II" || s == "ii" || s == "2") return Scenario::II;
  if (s == "III" || s == "iii" || s == "3") return Scenario::III;
  if (s == "IV" || s == "iv" || s == "4") return Scenario::IV;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected I, II, III or IV)");
}

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    case Scenario::IV: return "IV";
  }
  return "?";
}

/// Two equally weighted matrix-normal clusters (square and cross means,
/// shared AR covariances in both directions).
struct ScenarioSpec {
  Scenario name = Scenario::I;
  int n = 100;
  int rows = 60;
  int cols = 60;
  double rho = 0.9;
  double mean_amplitude = 1.0;
  Seed seed = 0;
};

inline ScenarioSpec scenario_defaults(Scenario s, Seed seed) {
  switch (s) {
    case Scenario::I: return {s, 100, 60, 60, 0.9, 1.0, seed};
    case Scenario::II: return {s, 50, 30, 30, 0.9, 1.0, seed};
    case Scenario::III: return {s, 50, 20, 20, 0.9, 1.0, seed};
    case Scenario::IV: return {s, 100, 60, 60, 0.9, 1.0, seed};
  }
  throw std::invalid_argument("unknown scenario");
}

struct LabeledStack {
  MatrixStack stack;
  std::vector<int> labels;
};

inline LabeledStack generate_scenario(const ScenarioSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("need n >= 2");
  const Eigen::MatrixXd u = ar_covariance(spec.rows, spec.rho);
  const Eigen::MatrixXd v = ar_covariance(spec.cols, spec.rho);
  const ComponentParams square{mean_square(spec.rows, spec.cols, spec.mean_amplitude), u, v};
  const ComponentParams cross{mean_cross(spec.rows, spec.cols, spec.mean_amplitude), u, v};

  const int n0 = spec.n - spec.n / 2;
  LabeledStack out;
  out.stack = matnorm_sample(square, n0, derive_seed(spec.seed, 0));
  MatrixStack second = matnorm_sample(cross, spec.n - n0, derive_seed(spec.seed, 1));
  out.stack.insert(out.stack.end(), second.begin(), second.end());
  out.labels.assign(static_cast<std::size_t>(n0), 0);
  out.labels.insert(out.labels.end(), static_cast<std::size_t>(spec.n - n0), 1);
  return out;
}

}  // namespace mnmix
