#pragma once

#include <stdexcept>
#include <string>

namespace dzip {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch in a tensor kernel.
struct DimensionError : Error {
  using Error::Error;
};

// Invalid predictor/codec/training configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Input data unusable for the requested operation (e.g. too short to train).
struct DataError : Error {
  using Error::Error;
};

// Malformed container bytes: bad magic, truncation, inconsistent sizes.
struct FormatError : Error {
  using Error::Error;
};

// Unsupported container version.
struct VersionError : FormatError {
  using FormatError::FormatError;
};

// Checksum mismatch: the container or its decoded output fails verification.
struct IntegrityError : FormatError {
  using FormatError::FormatError;
};

}  // namespace dzip
