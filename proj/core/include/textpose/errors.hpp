#pragma once

#include <stdexcept>
#include <string>

namespace textpose {

// Base for everything this library throws on bad input or bad state.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or dimension disagreement between tensors / keypoints / maps.
struct ShapeError : Error {
  using Error::Error;
};

// Record does not conform to the attribute schema, or a vector block is malformed.
struct SchemaError : Error {
  using Error::Error;
};

// Facial geometry collapsed to a point; normalization scale would be zero.
struct DegenerateFaceError : Error {
  using Error::Error;
};

// A metric was asked for on inputs where it is undefined (e.g. PCKh without
// a visible nose or neck in the ground truth).
struct MetricUndefinedError : Error {
  using Error::Error;
};

// Checkpoint file is truncated, has trailing bytes, or fails structural checks.
struct CheckpointError : Error {
  using Error::Error;
};

// Checkpoint is valid but belongs to a different pipeline stage.
struct StageMismatchError : CheckpointError {
  using CheckpointError::CheckpointError;
};

// Dataset or annotation file problems.
struct DataError : Error {
  using Error::Error;
};

// Config file / flag parsing problems.
struct ConfigError : Error {
  using Error::Error;
};

// Training diverged past the documented abort threshold.
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace textpose
