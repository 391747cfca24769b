#pragma once

#include <stdexcept>
#include <string>

namespace mulab {

// Base class for all library errors. CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor shape disagreement (channel mismatch, bad batch dims, ...).
struct DimensionError : Error {
  using Error::Error;
};

// Invalid argument values: labels out of range, empty sets, bad rates.
struct InputError : Error {
  using Error::Error;
};

// Malformed external data (CIFAR files, checkpoints). Message names the file.
struct FormatError : Error {
  using Error::Error;
};

// API misuse: backward on a non-graph tensor, optimizer step without grads.
struct UsageError : Error {
  using Error::Error;
};

// Training diverged; carries epoch/batch indices.
struct TrainingError : Error {
  TrainingError(const std::string& msg, int epoch, int batch)
      : Error(msg), epoch(epoch), batch(batch) {}
  int epoch;
  int batch;
};

// Degenerate data handed to the MIA attacker fit.
struct FitError : Error {
  using Error::Error;
};

// Config validation failure; message carries the field path.
struct SchemaError : Error {
  using Error::Error;
};

// Filesystem failures (unwritable report path, missing directories).
struct IoError : Error {
  using Error::Error;
};

}  // namespace mulab
