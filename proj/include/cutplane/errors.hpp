#pragma once

#include <stdexcept>
#include <string>

namespace cutplane {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A LinearProgram or StochasticProgram violates a structural invariant
/// (mismatched dimensions, non-finite entries, bad probabilities, ...).
class InvalidProgramError : public Error {
 public:
  using Error::Error;
};

/// A vector passed to a cut pool does not match the pool's state dimension,
/// or a cut's birth iteration is not strictly increasing.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// evaluate() was called on a pool that holds no cuts.
class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

/// The scenario tree exceeds the configured node cap.
class TreeTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A benchmark spec violates its invariants.
class SpecInvalidError : public Error {
 public:
  using Error::Error;
};

/// Dual multipliers extracted from a stage subproblem fail the
/// tightness-at-construction check; indicates a sign-convention bug.
class DualExtractionError : public Error {
 public:
  using Error::Error;
};

/// A stage subproblem came back Infeasible or Unbounded during a pass.
/// Signals a model error (relatively complete recourse does not hold).
class SubproblemInfeasibleError : public Error {
 public:
  SubproblemInfeasibleError(int stage, int realization, int scenario,
                            const std::string& what)
      : Error(what), stage(stage), realization(realization),
        scenario(scenario) {}

  int stage;        // 1-based
  int realization;  // 0-based index within the stage
  int scenario;     // 0-based index within the batch, -1 if not applicable
};

}  // namespace cutplane
