// tests/test_metrics_kmeans.cpp

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

#include <random>

#include "mnmix/generators.hpp"
#include "mnmix/kmeans.hpp"
#include "mnmix/metrics.hpp"
#include "oracles.hpp"

using namespace mnmix;

TEST_CASE("ARI: exact small cases", "[metrics]") {
  REQUIRE(adjusted_rand_index({0, 0, 1, 1}, {0, 0, 1, 1}) == 1.0);
  REQUIRE(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  REQUIRE(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == -0.5);
  REQUIRE_THROWS_AS(adjusted_rand_index({0, 1}, {0, 1, 0}), LengthMismatch);
}

TEST_CASE("ARI: symmetry, relabeling invariance, oracle agreement", "[metrics][oracle]") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> k_dist(1, 5);
  std::uniform_int_distribution<int> n_dist(2, 40);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = static_cast<std::size_t>(n_dist(gen));
    const auto a = oracles::random_labels(n, k_dist(gen), gen);
    const auto b = oracles::random_labels(n, k_dist(gen), gen);
    const double got = adjusted_rand_index(a, b);
    REQUIRE_THAT(got, Catch::Matchers::WithinAbs(oracles::ari_paircount(a, b), 1e-13));
    REQUIRE(adjusted_rand_index(b, a) == got);

    std::vector<int> relabeled(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) relabeled[i] = 7 - a[i];
    REQUIRE(adjusted_rand_index(relabeled, b) == got);
  }
}

TEST_CASE("accuracy: exact small cases", "[metrics]") {
  REQUIRE(clustering_accuracy({0, 0, 1, 1}, {0, 0, 1, 1}) == 1.0);
  REQUIRE(clustering_accuracy({1, 1, 0, 0}, {0, 0, 1, 1}) == 1.0);
  REQUIRE(clustering_accuracy({0, 0, 1, 1}, {0, 1, 1, 1}) == 0.75);
  REQUIRE_THROWS_AS(clustering_accuracy({0, 1}, {0}), LengthMismatch);

  std::vector<int> eleven(11);
  std::iota(eleven.begin(), eleven.end(), 0);
  REQUIRE_THROWS_AS(clustering_accuracy(eleven, eleven), TooManyClusters);
}

TEST_CASE("accuracy: matches the exhaustive oracle", "[metrics][oracle]") {
  std::mt19937_64 gen(4096);
  std::uniform_int_distribution<int> k_dist(1, 4);
  std::uniform_int_distribution<int> n_dist(1, 30);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = static_cast<std::size_t>(n_dist(gen));
    const auto pred = oracles::random_labels(n, k_dist(gen), gen);
    const auto truth = oracles::random_labels(n, k_dist(gen), gen);
    REQUIRE(clustering_accuracy(pred, truth) == oracles::accuracy_bruteforce(pred, truth));
  }
}

TEST_CASE("kmeans: separated point masses are recovered exactly", "[kmeans]") {
  MatrixStack stack;
  std::vector<int> truth;
  std::mt19937_64 gen(8);
  for (int i = 0; i < 12; ++i) {
    const int cluster = i % 2;
    stack.push_back(Eigen::MatrixXd::Constant(2, 2, cluster == 0 ? 0.0 : 100.0) +
                    0.01 * oracles::random_matrix(2, 2, gen));
    truth.push_back(cluster);
  }
  const auto labels = kmeans_vectorized(stack, 2, 5);
  REQUIRE(adjusted_rand_index(labels, truth) == 1.0);
}

TEST_CASE("kmeans: k=1, determinism, empty-cluster handling", "[kmeans]") {
  std::mt19937_64 gen(12);
  MatrixStack stack;
  for (int i = 0; i < 9; ++i)
    stack.push_back(Eigen::MatrixXd::Constant(2, 2, i < 5 ? 0.0 : 10.0));

  const auto ones = kmeans_vectorized(stack, 1, 3);
  REQUIRE(ones == std::vector<int>(9, 0));

  const auto a = kmeans_vectorized(stack, 3, 42);
  const auto b = kmeans_vectorized(stack, 3, 42);
  REQUIRE(a == b);
  for (int lab : a) {
    REQUIRE(lab >= 0);
    REQUIRE(lab < 3);
  }
}

TEST_CASE("kmeans: within-cluster sum of squares never increases", "[kmeans]") {
  std::mt19937_64 gen(16);
  MatrixStack stack;
  for (int i = 0; i < 60; ++i)
    stack.push_back(oracles::random_matrix(3, 3, gen) +
                    Eigen::MatrixXd::Constant(3, 3, (i % 3) * 2.0));
  std::vector<double> wcss;
  kmeans_vectorized(stack, 3, 7, 100, &wcss);
  REQUIRE(wcss.size() >= 2);
  for (std::size_t t = 1; t < wcss.size(); ++t) REQUIRE(wcss[t] <= wcss[t - 1] + 1e-9);
}

TEST_CASE("kmeans: scenario IV lands in the expected band for some amplitude",
          "[kmeans][montecarlo]") {
  bool in_band = false;
  for (double amplitude : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    double total = 0.0;
    for (Seed rep = 0; rep < 2; ++rep) {
      ScenarioSpec spec = scenario_defaults(Scenario::IV, derive_seed(888, rep));
      spec.mean_amplitude = amplitude;
      const auto data = generate_scenario(spec);
      const auto labels = kmeans_vectorized(data.stack, 2, derive_seed(999, rep));
      total += adjusted_rand_index(labels, data.labels);
    }
    const double mean_ari = total / 2.0;
    if (mean_ari >= 0.35 && mean_ari <= 0.70) in_band = true;
  }
  REQUIRE(in_band);
}
