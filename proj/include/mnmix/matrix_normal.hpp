// mnmix/matrix_normal.hpp

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

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mnmix/errors.hpp"
#include "mnmix/random.hpp"

namespace mnmix {

/// An ordered collection of n real r x p matrices (the dataset).
using MatrixStack = std::vector<Eigen::MatrixXd>;

/// One matrix-normal component: mean M (r x p), row covariance U (r x r),
/// column covariance V (p x p). The vectorized variable has covariance
/// kron(V, U) under column-major stacking.
struct ComponentParams {
  Eigen::MatrixXd mean;     // r x p
  Eigen::MatrixXd row_cov;  // r x r, SPD
  Eigen::MatrixXd col_cov;  // p x p, SPD

  Eigen::Index rows() const { return mean.rows(); }
  Eigen::Index cols() const { return mean.cols(); }
};

namespace detail {

inline void check_symmetric(const Eigen::MatrixXd& s, const char* name) {
  if (s.rows() != s.cols())
    throw DimensionMismatch(std::string(name) + " is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NotPositiveDefinite(std::string(name) + " is not symmetric");
}

/// Cholesky factor of an SPD matrix; throws NotPositiveDefinite on failure.
inline Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& s, const char* name) {
  check_symmetric(s, name);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(std::string(name) + " is not positive definite");
  return llt;
}

inline double logdet_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline void check_dims(const Eigen::MatrixXd& y, const ComponentParams& theta) {
  if (y.rows() != theta.mean.rows() || y.cols() != theta.mean.cols())
    throw DimensionMismatch("observation is " + std::to_string(y.rows()) + "x" +
                            std::to_string(y.cols()) + ", component is " +
                            std::to_string(theta.mean.rows()) + "x" +
                            std::to_string(theta.mean.cols()));
  if (theta.row_cov.rows() != theta.mean.rows() || theta.col_cov.rows() != theta.mean.cols())
    throw DimensionMismatch("covariance dimensions do not match the mean");
}

}  // namespace detail

inline constexpr double kLogTwoPi = 1.8378770664093454836;

/// Log-density of Y under the matrix normal (M, U, V), in nats.
/// Computed through the triangular factors of U and V; the rp x rp
/// Kronecker covariance is never formed.
inline double matnorm_logpdf(const Eigen::MatrixXd& y, const ComponentParams& theta) {
  detail::check_dims(y, theta);
  const auto r = static_cast<double>(theta.rows());
  const auto p = static_cast<double>(theta.cols());
  const auto llt_u = detail::cholesky(theta.row_cov, "row covariance");
  const auto llt_v = detail::cholesky(theta.col_cov, "column covariance");

  // tr(V^-1 (Y-M)' U^-1 (Y-M)) = || Lu^-1 (Y-M) Lv^-T ||_F^2
  Eigen::MatrixXd resid = y - theta.mean;
  Eigen::MatrixXd a = llt_u.matrixL().solve(resid);
  Eigen::MatrixXd b = llt_v.matrixL().solve(a.transpose());
  const double quad = b.squaredNorm();

  return -0.5 * (r * p * kLogTwoPi + r * detail::logdet_from_llt(llt_v) +
                 p * detail::logdet_from_llt(llt_u) + quad);
}

/// Draws n independent samples Y_i = M + Lu Z_i Lv' with Lu Lu' = U,
/// Lv Lv' = V and Z_i standard normal. Deterministic for a given seed.
inline MatrixStack matnorm_sample(const ComponentParams& theta, int n, Seed seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const auto llt_u = detail::cholesky(theta.row_cov, "row covariance");
  const auto llt_v = detail::cholesky(theta.col_cov, "column covariance");
  const Eigen::MatrixXd lu = llt_u.matrixL();
  const Eigen::MatrixXd lv = llt_v.matrixL();

  std::mt19937_64 gen(seed);
  MatrixStack out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd z = standard_normal_matrix(theta.rows(), theta.cols(), gen);
    out.push_back(theta.mean + lu * z * lv.transpose());
  }
  return out;
}

/// Materializes kron(V, U), the covariance of vec(Y). Test/oracle use only;
/// guarded against accidentally huge products.
inline Eigen::MatrixXd kron_covariance(const ComponentParams& theta) {
  const Eigen::Index r = theta.rows();
  const Eigen::Index p = theta.cols();
  if (r * p > 4096)
    throw SizeGuardExceeded("kron_covariance limited to rp <= 4096, got rp = " +
                            std::to_string(r * p));
  detail::check_symmetric(theta.row_cov, "row covariance");
  detail::check_symmetric(theta.col_cov, "column covariance");
  Eigen::MatrixXd k(r * p, r * p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      k.block(i * r, j * r, r, r) = theta.col_cov(i, j) * theta.row_cov;
  return k;
}

/// Canonicalizes the (cU, V/c) scale ambiguity so that trace(U) = r.
/// Leaves kron(V, U), and hence the density, unchanged.
inline ComponentParams normalize_scale(const ComponentParams& theta) {
  detail::check_symmetric(theta.row_cov, "row covariance");
  const double tr = theta.row_cov.trace();
  if (!(tr > 0.0))
    throw NotPositiveDefinite("row covariance has nonpositive trace");
  const double r = static_cast<double>(theta.rows());
  // an already-normalized component passes through unchanged (idempotence)
  if (std::abs(tr - r) <= 1e-12 * r) return theta;
  return {theta.mean, (r / tr) * theta.row_cov, theta.col_cov * (tr / r)};
}

}  // namespace mnmix
