#pragma once

#include <stdexcept>
#include <string>

namespace plankit {

// Base class for all recoverable library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reference path too short or collapsed to fewer than two distinct points.
struct DegeneratePath : Error {
  using Error::Error;
};

// Query pose/state outside the corridor or arclength range of the path.
struct ProjectionOutOfRange : Error {
  using Error::Error;
};

// |d * kappa| >= 1: the Frenet map stops being a bijection.
struct CurvatureSingularity : Error {
  using Error::Error;
};

// Boundary-condition system of a polynomial solve is not invertible.
struct SingularSystem : Error {
  using Error::Error;
};

// Every candidate trajectory was rejected by the feasibility guards.
struct NoValidProposal : Error {
  using Error::Error;
};

// Learned predictor selected without model parameters.
struct MissingParams : Error {
  using Error::Error;
};

// Parameter vector size does not match the model configuration.
struct ShapeMismatch : Error {
  using Error::Error;
};

// Training loss became NaN/inf.
struct NonFiniteLoss : Error {
  using Error::Error;
};

// Scenario file is not parseable at all.
struct ParseError : Error {
  using Error::Error;
};

// Scenario record parsed but violates the data-model invariants.
struct ValidationError : Error {
  using Error::Error;
};

// Raw track too short to cut a single window.
struct TooShort : Error {
  using Error::Error;
};

// IRL scenario with fewer than two proposals.
struct DegenerateScenario : Error {
  using Error::Error;
};

// Filesystem-level failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace plankit
