// tests/test_generators.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/SVD>

#include "mnmix/generators.hpp"
#include "oracles.hpp"

using namespace mnmix;

namespace {

int numeric_rank(const Eigen::MatrixXd& m, double tol = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return static_cast<int>((svd.singularValues().array() > tol).count());
}

}  // namespace

TEST_CASE("ar_covariance: entries and edge cases", "[generators]") {
  REQUIRE(oracles::exact_equal(ar_covariance(1, 0.9), Eigen::MatrixXd::Ones(1, 1)));

  const Eigen::MatrixXd a = ar_covariance(3, 0.9);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0, 0.9, 0.9 * 0.9, 0.9, 1.0, 0.9, 0.9 * 0.9, 0.9, 1.0;
  REQUIRE((a - expected).cwiseAbs().maxCoeff() < 1e-15);

  REQUIRE(oracles::exact_equal(ar_covariance(4, 0.0), Eigen::MatrixXd::Identity(4, 4)));
  REQUIRE_THROWS_AS(ar_covariance(3, 1.0), InvalidRho);
  REQUIRE_THROWS_AS(ar_covariance(3, -1.5), InvalidRho);
}

TEST_CASE("ar_covariance: positive definite up to dim 100", "[generators]") {
  for (int dim : {1, 5, 60, 100}) {
    Eigen::LLT<Eigen::MatrixXd> llt(ar_covariance(dim, 0.9));
    REQUIRE(llt.info() == Eigen::Success);
  }
}

TEST_CASE("mean images: square block and cross arms", "[generators][oracle]") {
  const Eigen::MatrixXd square = mean_square(6, 6, 1.0);
  REQUIRE(square.sum() == 9.0);  // 3x3 centered block
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const bool inside = i >= 1 && i <= 3 && j >= 1 && j <= 3;
      REQUIRE(square(i, j) == (inside ? 1.0 : 0.0));
    }
  REQUIRE(numeric_rank(square) == 1);

  const Eigen::MatrixXd cross = mean_cross(9, 11, 2.0);
  REQUIRE(numeric_rank(cross) == 2);
  REQUIRE(numeric_rank(mean_cross(20, 20, 1.0)) == 2);

  REQUIRE(oracles::exact_equal(mean_square(7, 7, 0.0), Eigen::MatrixXd::Zero(7, 7)));
  REQUIRE(oracles::exact_equal(mean_cross(7, 7, 0.0), Eigen::MatrixXd::Zero(7, 7)));
  REQUIRE_THROWS_AS(mean_square(4, 6, 1.0), TooSmall);
  REQUIRE_THROWS_AS(mean_cross(6, 4, 1.0), TooSmall);
}

TEST_CASE("generate_scenario: scenario I shape and split", "[generators]") {
  const auto data = generate_scenario(scenario_defaults(Scenario::I, 5));
  REQUIRE(data.stack.size() == 100);
  REQUIRE(data.labels.size() == 100);
  REQUIRE(data.stack.front().rows() == 60);
  REQUIRE(data.stack.front().cols() == 60);
  int zeros = 0;
  for (int lab : data.labels) zeros += lab == 0 ? 1 : 0;
  REQUIRE(zeros == 50);
}

TEST_CASE("generate_scenario: deterministic per seed", "[generators]") {
  ScenarioSpec spec = scenario_defaults(Scenario::III, 42);
  const auto a = generate_scenario(spec);
  const auto b = generate_scenario(spec);
  for (std::size_t i = 0; i < a.stack.size(); ++i)
    REQUIRE(oracles::exact_equal(a.stack[i], b.stack[i]));
  REQUIRE(a.labels == b.labels);

  spec.seed = 43;
  const auto c = generate_scenario(spec);
  REQUIRE_FALSE(oracles::exact_equal(a.stack[0], c.stack[0]));
}

TEST_CASE("generate_scenario: per-cluster empirical means converge", "[generators][montecarlo]") {
  ScenarioSpec spec;
  spec.name = Scenario::III;
  spec.n = 5000;
  spec.rows = 10;
  spec.cols = 10;
  spec.mean_amplitude = 2.0;
  spec.seed = 9;
  const auto data = generate_scenario(spec);

  Eigen::MatrixXd mean0 = Eigen::MatrixXd::Zero(10, 10);
  Eigen::MatrixXd mean1 = Eigen::MatrixXd::Zero(10, 10);
  int n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < data.stack.size(); ++i) {
    if (data.labels[i] == 0) {
      mean0 += data.stack[i];
      ++n0;
    } else {
      mean1 += data.stack[i];
      ++n1;
    }
  }
  mean0 /= n0;
  mean1 /= n1;
  const Eigen::MatrixXd square = mean_square(10, 10, 2.0);
  const Eigen::MatrixXd cross = mean_cross(10, 10, 2.0);
  REQUIRE((mean0 - square).norm() / square.norm() < 0.05);
  REQUIRE((mean1 - cross).norm() / cross.norm() < 0.05);
}
