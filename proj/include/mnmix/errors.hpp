// mnmix/errors.hpp

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

#include <stdexcept>
#include <string>

namespace mnmix {

/// Base class for all mnmix errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// A covariance factorization failed; the matrix is not positive definite.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// Refusing to materialize a Kronecker product beyond the size guard.
struct SizeGuardExceeded : Error {
  using Error::Error;
};

struct AllWeightsZero : Error {
  using Error::Error;
};

/// A mixture component lost all responsibility mass during fitting.
struct EmptyClusterError : Error {
  EmptyClusterError(const std::string& msg, int component)
      : Error(msg), component(component) {}
  int component;
};

/// Initialization produced a cluster too small to estimate parameters from.
struct DegenerateClusterInit : Error {
  using Error::Error;
};

struct InvalidRho : Error {
  using Error::Error;
};

struct TooSmall : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct TooManyClusters : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace mnmix
