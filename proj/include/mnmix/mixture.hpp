// mnmix/mixture.hpp

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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mnmix/errors.hpp"
#include "mnmix/flip_flop.hpp"
#include "mnmix/kmeans.hpp"
#include "mnmix/matrix_normal.hpp"
#include "mnmix/random.hpp"

namespace mnmix {

enum class PenaltyKind { none, l1, l2, nuclear };

inline PenaltyKind penalty_from_string(const std::string& s) {
  if (s == "none") return PenaltyKind::none;
  if (s == "l1") return PenaltyKind::l1;
  if (s == "l2") return PenaltyKind::l2;
  if (s == "nuclear") return PenaltyKind::nuclear;
  throw std::invalid_argument("unknown penalty '" + s + "' (expected none, l1, l2 or nuclear)");
}

inline const char* to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::none: return "none";
    case PenaltyKind::l1: return "l1";
    case PenaltyKind::l2: return "l2";
    case PenaltyKind::nuclear: return "nuclear";
  }
  return "?";
}

/// Mean regularizer and its strength. The l2 kind penalizes the squared
/// Frobenius norm (that is the objective whose gradient matches the update).
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::none;
  double lambda = 0.0;
};

struct MixtureModel {
  std::vector<ComponentParams> components;
  Eigen::VectorXd weights;  // mixing proportions, sum to 1

  int count() const { return static_cast<int>(components.size()); }
};

/// Posterior membership probabilities, n x k, rows sum to 1.
struct Responsibilities {
  Eigen::MatrixXd alpha;
};

enum class InitMethod { kmeans, random };

struct FitConfig {
  int max_iter = 200;
  double mean_tol = 0.0;  // <= 0 resolves to 1e-4 * sqrt(r p)
  double eig_floor = 1e-4;
  double eig_cap = 1e4;
  FlipFlopConfig inner_flipflop;
  InitMethod init = InitMethod::kmeans;
  Seed seed = 0;
  int n_starts = 3;
};

struct FitReport {
  MixtureModel model;
  Responsibilities resp;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  std::vector<int> hard_labels;
};

namespace detail {

inline void validate_fit_config(const FitConfig& cfg) {
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(cfg.eig_floor > 0.0) || !(cfg.eig_floor < cfg.eig_cap))
    throw std::invalid_argument("need 0 < eig_floor < eig_cap");
  if (cfg.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
}

inline void validate_penalty(const PenaltySpec& penalty) {
  if (penalty.lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
}

inline void check_model(const MatrixStack& stack, const MixtureModel& model) {
  check_stack(stack);
  if (model.components.empty() || model.weights.size() != model.count())
    throw DimensionMismatch("model has inconsistent component/weight counts");
  for (const auto& c : model.components)
    if (c.mean.rows() != stack.front().rows() || c.mean.cols() != stack.front().cols())
      throw DimensionMismatch("component dimensions do not match the stack");
}

/// Per-component density evaluator with the factorizations cached.
struct ComponentDensity {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd chol_row;  // lower factor of U
  Eigen::MatrixXd chol_col;  // lower factor of V
  double log_const = 0.0;

  explicit ComponentDensity(const ComponentParams& theta) : mean(theta.mean) {
    const auto llt_u = cholesky(theta.row_cov, "row covariance");
    const auto llt_v = cholesky(theta.col_cov, "column covariance");
    chol_row = llt_u.matrixL();
    chol_col = llt_v.matrixL();
    const auto r = static_cast<double>(theta.rows());
    const auto p = static_cast<double>(theta.cols());
    log_const = -0.5 * (r * p * kLogTwoPi + r * logdet_from_llt(llt_v) +
                        p * logdet_from_llt(llt_u));
  }

  double operator()(const Eigen::MatrixXd& y) const {
    Eigen::MatrixXd a =
        chol_row.triangularView<Eigen::Lower>().solve(y - mean);
    Eigen::MatrixXd b = chol_col.triangularView<Eigen::Lower>().solve(a.transpose());
    return log_const - 0.5 * b.squaredNorm();
  }
};

/// n x k matrix of log pi_j + log f(Y_i | Theta_j).
inline Eigen::MatrixXd log_weighted_densities(const MatrixStack& stack,
                                              const MixtureModel& model) {
  check_model(stack, model);
  const auto n = static_cast<Eigen::Index>(stack.size());
  const int k = model.count();
  std::vector<ComponentDensity> densities;
  densities.reserve(model.components.size());
  for (const auto& c : model.components) densities.emplace_back(c);

  Eigen::MatrixXd out(n, k);
  for (int j = 0; j < k; ++j) {
    if (!(model.weights(j) > 0.0))
      throw std::invalid_argument("mixing weights must be strictly positive");
    const double log_pi = std::log(model.weights(j));
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = log_pi + densities[static_cast<std::size_t>(j)](
                               stack[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace detail

/// Observed-data log-likelihood, sum_i log sum_j pi_j f(Y_i | Theta_j),
/// evaluated in the log domain with per-sample max subtraction.
inline double observed_loglik(const MatrixStack& stack, const MixtureModel& model) {
  const Eigen::MatrixXd l = detail::log_weighted_densities(stack, model);
  double total = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double m = l.row(i).maxCoeff();
    total += m + std::log((l.row(i).array() - m).exp().sum());
  }
  return total;
}

/// Unscaled penalty value P over all component means.
inline double penalty_value(const MixtureModel& model, const PenaltySpec& penalty) {
  detail::validate_penalty(penalty);
  double p = 0.0;
  for (const auto& c : model.components) {
    switch (penalty.kind) {
      case PenaltyKind::none: break;
      case PenaltyKind::l1: p += c.mean.cwiseAbs().sum(); break;
      case PenaltyKind::l2: p += c.mean.squaredNorm(); break;
      case PenaltyKind::nuclear: {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(c.mean);
        p += svd.singularValues().sum();
        break;
      }
    }
  }
  return p;
}

/// Penalized objective, observed log-likelihood minus lambda * P.
inline double penalized_objective(const MatrixStack& stack, const MixtureModel& model,
                                  const PenaltySpec& penalty) {
  if (penalty.kind == PenaltyKind::none || penalty.lambda == 0.0)
    return observed_loglik(stack, model);
  return observed_loglik(stack, model) - penalty.lambda * penalty_value(model, penalty);
}

/// Posterior responsibilities by Bayes rule, log-domain softmax per row.
inline Responsibilities e_step(const MatrixStack& stack, const MixtureModel& model) {
  Eigen::MatrixXd l = detail::log_weighted_densities(stack, model);
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double m = l.row(i).maxCoeff();
    Eigen::ArrayXd row = (l.row(i).array() - m).exp();
    l.row(i) = row / row.sum();
  }
  return {std::move(l)};
}

namespace detail {

/// Penalized mean update given the previous iteration's component.
///
/// l1: entrywise soft-thresholding with threshold matrix
///     (lambda / mass) * U^-1 1 V^-1 evaluated at the previous covariances.
/// l2: exact maximizer of the penalized Q given the covariances, the
///     solution of M + (2 lambda / mass) U M V = M_tilde. (The one-step
///     substitution of the previous mean diverges whenever
///     (2 lambda / mass) eigmax(U) eigmax(V) > 1.)
/// nuclear: one-step-late singular-value shift through the SVD of the
///     previous mean.
inline Eigen::MatrixXd penalized_mean_update(const Eigen::MatrixXd& mean_unpenalized,
                                             const ComponentParams& prev,
                                             const PenaltySpec& penalty, double resp_sum) {
  if (penalty.kind == PenaltyKind::none || penalty.lambda == 0.0) return mean_unpenalized;
  const double scale = penalty.lambda / resp_sum;
  switch (penalty.kind) {
    case PenaltyKind::l1: {
      const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(prev.rows(), prev.cols());
      const Eigen::MatrixXd left = cholesky(prev.row_cov, "row covariance").solve(ones);
      const Eigen::MatrixXd threshold =
          scale * cholesky(prev.col_cov, "column covariance").solve(left.transpose()).transpose();
      return (mean_unpenalized.array().sign() *
              (mean_unpenalized.array().abs() - threshold.array()).max(0.0))
          .matrix();
    }
    case PenaltyKind::l2: {
      const double c = 2.0 * scale;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_u(prev.row_cov);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_v(prev.col_cov);
      if (eig_u.info() != Eigen::Success || eig_v.info() != Eigen::Success)
        throw NotPositiveDefinite("covariance eigendecomposition failed in the l2 update");
      Eigen::MatrixXd transformed =
          eig_u.eigenvectors().transpose() * mean_unpenalized * eig_v.eigenvectors();
      for (Eigen::Index i = 0; i < transformed.rows(); ++i)
        for (Eigen::Index j = 0; j < transformed.cols(); ++j)
          transformed(i, j) /= 1.0 + c * eig_u.eigenvalues()(i) * eig_v.eigenvalues()(j);
      return eig_u.eigenvectors() * transformed * eig_v.eigenvectors().transpose();
    }
    case PenaltyKind::nuclear: {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(prev.mean,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
      return mean_unpenalized -
             scale * (prev.row_cov * svd.matrixU() * svd.matrixV().transpose() *
                      prev.col_cov);
    }
    default: return mean_unpenalized;
  }
}

/// Covariance update for one component: weighted flip-flop around the new
/// mean (warm-started at the previous covariances), clamp, normalize. A
/// non-PD iterate is converted into the clamped iteration, which cannot fail.
inline ComponentParams update_component(const MatrixStack& stack, const Eigen::MatrixXd& mean,
                                        const Eigen::VectorXd& resp_col,
                                        const ComponentParams& prev, const FitConfig& cfg) {
  FlipFlopConfig ff = cfg.inner_flipflop;
  ff.weights = resp_col;
  ff.row_cov_init = prev.row_cov;
  ff.record_loglik = false;
  FlipFlopResult result;
  try {
    result = flip_flop_covariances(stack, mean, ff);
  } catch (const NotPositiveDefinite&) {
    result = flip_flop_covariances(stack, mean, ff,
                                   EigenvalueInterval{cfg.eig_floor, cfg.eig_cap});
  }
  ComponentParams out{
      mean, clamp_eigenvalues(result.params.row_cov, cfg.eig_floor, cfg.eig_cap),
      clamp_eigenvalues(result.params.col_cov, cfg.eig_floor, cfg.eig_cap)};
  return normalize_scale(out);
}

}  // namespace detail

/// One M-step: mixing weights and responsibility-weighted means (penalized
/// one-step-late when requested), then covariance updates with eigenvalue
/// clamping and scale normalization.
inline MixtureModel m_step(const MatrixStack& stack, const Responsibilities& resp,
                           const MixtureModel& prev, const PenaltySpec& penalty,
                           const FitConfig& cfg) {
  detail::check_model(stack, prev);
  detail::validate_penalty(penalty);
  const auto n = static_cast<Eigen::Index>(stack.size());
  const int k = prev.count();
  if (resp.alpha.rows() != n || resp.alpha.cols() != k)
    throw DimensionMismatch("responsibility matrix does not match stack/model");

  MixtureModel next;
  next.weights = Eigen::VectorXd(k);
  next.components.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double resp_sum = resp.alpha.col(j).sum();
    if (resp_sum < 1e-8)
      throw EmptyClusterError(
          "component " + std::to_string(j) + " lost all responsibility mass", j);
    next.weights(j) = resp_sum / static_cast<double>(n);

    Eigen::MatrixXd mean_unpenalized = weighted_mean(stack, resp.alpha.col(j));
    Eigen::MatrixXd mean = detail::penalized_mean_update(
        mean_unpenalized, prev.components[static_cast<std::size_t>(j)], penalty, resp_sum);
    next.components.push_back(detail::update_component(
        stack, mean, resp.alpha.col(j), prev.components[static_cast<std::size_t>(j)], cfg));
  }
  return next;
}

/// Hard-assignment initialization: k-means on the vectorized stack (or a
/// uniform random assignment), then per-cluster flip-flop MLE. Retries with a
/// fresh derived seed when a cluster ends up smaller than two samples.
inline std::pair<MixtureModel, Responsibilities> initialize(const MatrixStack& stack, int k,
                                                            const FitConfig& cfg) {
  detail::check_stack(stack);
  detail::validate_fit_config(cfg);
  const auto n = static_cast<int>(stack.size());
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n < 2 * k)
    throw std::invalid_argument("need n >= 2k samples, got n = " + std::to_string(n) +
                                ", k = " + std::to_string(k));

  std::vector<int> labels;
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    const Seed seed = derive_seed(cfg.seed, 0x1717, static_cast<std::uint64_t>(attempt));
    if (cfg.init == InitMethod::kmeans) {
      labels = kmeans_vectorized(stack, k, seed);
    } else {
      std::mt19937_64 gen(seed);
      std::uniform_int_distribution<int> pick(0, k - 1);
      labels.resize(static_cast<std::size_t>(n));
      for (auto& lab : labels) lab = pick(gen);
    }
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++counts[static_cast<std::size_t>(lab)];
    ok = *std::min_element(counts.begin(), counts.end()) >= 2;
  }
  if (!ok)
    throw DegenerateClusterInit("initialization produced a cluster with fewer than 2 members");

  MixtureModel model;
  model.weights = Eigen::VectorXd(k);
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(n, k);
  for (int j = 0; j < k; ++j) {
    MatrixStack members;
    for (int i = 0; i < n; ++i)
      if (labels[static_cast<std::size_t>(i)] == j) members.push_back(stack[static_cast<std::size_t>(i)]);
    model.weights(j) = static_cast<double>(members.size()) / static_cast<double>(n);

    FlipFlopConfig ff = cfg.inner_flipflop;
    ff.record_loglik = false;
    ComponentParams theta = flip_flop_mle(members, ff).params;
    theta.row_cov = clamp_eigenvalues(theta.row_cov, cfg.eig_floor, cfg.eig_cap);
    theta.col_cov = clamp_eigenvalues(theta.col_cov, cfg.eig_floor, cfg.eig_cap);
    model.components.push_back(normalize_scale(theta));
    for (int i = 0; i < n; ++i)
      if (labels[static_cast<std::size_t>(i)] == j) alpha(i, j) = 1.0;
  }
  return {std::move(model), Responsibilities{std::move(alpha)}};
}

namespace detail {

inline double resolve_mean_tol(const FitConfig& cfg, const MatrixStack& stack) {
  if (cfg.mean_tol > 0.0) return cfg.mean_tol;
  return 1e-4 * std::sqrt(static_cast<double>(stack.front().size()));
}

/// Re-seeds an emptied component at the sample the model explains worst,
/// copying the covariances of the strongest surviving component. A unit (or
/// stale) covariance has no chance against sharply fitted competitors in
/// high dimension: its density normalizer sits hundreds of nats below
/// theirs, so the re-seeded component would lose even its own seed sample.
/// Matching the incumbents' covariance scale lets the zero-residual seed
/// sample stick.
inline void reseed_component(const MatrixStack& stack, MixtureModel& model,
                             const Responsibilities& resp, int j, const FitConfig& cfg) {
  Eigen::Index worst = 0;
  resp.alpha.rowwise().maxCoeff().minCoeff(&worst);
  int donor = -1;
  for (int l = 0; l < model.count(); ++l)
    if (l != j && (donor < 0 || model.weights(l) > model.weights(donor))) donor = l;
  auto& component = model.components[static_cast<std::size_t>(j)];
  component.mean = stack[static_cast<std::size_t>(worst)];
  const auto& source =
      model.components[static_cast<std::size_t>(donor < 0 ? j : donor)];
  component.row_cov = clamp_eigenvalues(source.row_cov, cfg.eig_floor, cfg.eig_cap);
  component.col_cov = clamp_eigenvalues(source.col_cov, cfg.eig_floor, cfg.eig_cap);
  model.weights(j) = 1.0 / static_cast<double>(stack.size());
  model.weights /= model.weights.sum();
}

struct SingleRun {
  MixtureModel model;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

inline SingleRun fit_em_single(const MatrixStack& stack, int k, const PenaltySpec& penalty,
                               FitConfig cfg) {
  auto [model, resp] = initialize(stack, k, cfg);
  const double mean_tol = resolve_mean_tol(cfg, stack);

  SingleRun run;
  run.objective_trace.push_back(penalized_objective(stack, model, penalty));
  int reseeds = 0;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    resp = e_step(stack, model);
    MixtureModel next;
    for (;;) {
      try {
        next = m_step(stack, resp, model, penalty, cfg);
        break;
      } catch (const EmptyClusterError& e) {
        if (++reseeds > 3)
          throw EmptyClusterError("component " + std::to_string(e.component) +
                                      " emptied repeatedly (iteration " + std::to_string(t) +
                                      ")",
                                  e.component);
        reseed_component(stack, model, resp, e.component, cfg);
        resp = e_step(stack, model);
      }
    }
    double mean_change = 0.0;
    for (int j = 0; j < k; ++j)
      mean_change += (next.components[static_cast<std::size_t>(j)].mean -
                      model.components[static_cast<std::size_t>(j)].mean)
                         .norm();
    model = std::move(next);
    run.objective_trace.push_back(penalized_objective(stack, model, penalty));
    run.iterations = t;
    if (mean_change <= mean_tol) {
      run.converged = true;
      break;
    }
  }
  run.model = std::move(model);
  return run;
}

/// Components ordered by decreasing weight; exact ties broken by the
/// lexicographic order of the vectorized means. Keeps serialized output
/// stable across runs.
inline std::vector<int> canonical_order(const MixtureModel& model) {
  std::vector<int> order(static_cast<std::size_t>(model.count()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (model.weights(a) != model.weights(b)) return model.weights(a) > model.weights(b);
    const auto& ma = model.components[static_cast<std::size_t>(a)].mean;
    const auto& mb = model.components[static_cast<std::size_t>(b)].mean;
    return std::lexicographical_compare(ma.data(), ma.data() + ma.size(), mb.data(),
                                        mb.data() + mb.size());
  });
  return order;
}

}  // namespace detail

/// Penalized EM fit. Runs n_starts restarts from seeds derived from
/// cfg.seed and keeps the run with the highest final penalized objective.
inline FitReport fit_em(const MatrixStack& stack, int k, const PenaltySpec& penalty,
                        const FitConfig& cfg) {
  detail::validate_fit_config(cfg);
  detail::validate_penalty(penalty);

  detail::SingleRun best;
  bool have_best = false;
  std::exception_ptr last_error;
  for (int s = 0; s < cfg.n_starts; ++s) {
    FitConfig start_cfg = cfg;
    start_cfg.seed = derive_seed(cfg.seed, 0xf17, static_cast<std::uint64_t>(s));
    detail::SingleRun run;
    try {
      run = detail::fit_em_single(stack, k, penalty, start_cfg);
    } catch (const Error&) {
      // a collapsed restart only matters if no restart completes
      last_error = std::current_exception();
      continue;
    }
    if (!have_best || run.objective_trace.back() > best.objective_trace.back()) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) std::rethrow_exception(last_error);

  const std::vector<int> order = detail::canonical_order(best.model);
  FitReport report;
  report.model.weights = Eigen::VectorXd(k);
  report.model.components.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    report.model.weights(j) = best.model.weights(order[static_cast<std::size_t>(j)]);
    report.model.components.push_back(
        std::move(best.model.components[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]));
  }
  report.objective_trace = std::move(best.objective_trace);
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.resp = e_step(stack, report.model);
  report.hard_labels.resize(stack.size());
  for (Eigen::Index i = 0; i < report.resp.alpha.rows(); ++i) {
    Eigen::Index arg = 0;
    report.resp.alpha.row(i).maxCoeff(&arg);
    report.hard_labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return report;
}

}  // namespace mnmix
