#pragma once

#include <stdexcept>
#include <string>

namespace oefd {

// Exit-code contract used by the CLI: 2 config, 3 I/O, 4 numerical.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration, bad key, out-of-range setting.
struct ConfigError : Error {
  using Error::Error;
};

// Operand shapes incompatible with the requested operation.
struct ShapeError : ConfigError {
  using ConfigError::ConfigError;
};

// Scalar argument outside its mathematical domain.
struct DomainError : ConfigError {
  using ConfigError::ConfigError;
};

// Class label outside [0, C).
struct LabelError : ConfigError {
  using ConfigError::ConfigError;
};

// Evaluation protocol preconditions violated (e.g. single-class score list).
struct ProtocolError : ConfigError {
  using ConfigError::ConfigError;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed file contents; message carries the line or byte position.
struct ParseError : IoError {
  using IoError::IoError;
};

// Checkpoint format_version not supported by this build.
struct VersionError : IoError {
  using IoError::IoError;
};

// Non-finite value encountered where one must not appear.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace oefd
