#pragma once

#include <stdexcept>
#include <string>

namespace vr3c {

// Base class for every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Local projection cannot finish before the deadline at the given CPU frequency.
class InfeasibleCompute : public Error {
 public:
  using Error::Error;
};

// 3D/2D size ratio is <= 1, so the crossover frequency is undefined.
class AlphaDegenerate : public Error {
 public:
  using Error::Error;
};

// Joint policy violates a structural property (3D-cache/compute exclusivity,
// 2D cache without local compute).
class InvalidPolicy : public Error {
 public:
  using Error::Error;
};

// Count-form policy does not fit into the viewpoint index space.
class CountsExceedN : public Error {
 public:
  using Error::Error;
};

// Brute-force search space exceeds the enumeration guard.
class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

// Radicand of the optimal-frequency formula is negative.
class NegativeDiscriminant : public Error {
 public:
  using Error::Error;
};

// Matrix/vector dimensions disagree.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// LP solve failed inside an iterative algorithm; message carries the context.
class LpFailure : public Error {
 public:
  using Error::Error;
};

// Simplex pivoting hit the iteration cap or lost numerical validity.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

// Iterate sequence that must be monotone was not; indicates LP tolerance trouble.
class NonDecreasingObjective : public Error {
 public:
  using Error::Error;
};

// Popularity vector is not a probability distribution.
class BadDistribution : public Error {
 public:
  using Error::Error;
};

// A served route is infeasible for its viewpoint.
class InfeasibleRoute : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is malformed or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Instance file could not be parsed or fails instance-level invariants.
class InstanceParseError : public Error {
 public:
  using Error::Error;
};

// A solver failed while executing an experiment mode.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace vr3c
