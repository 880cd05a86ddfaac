#pragma once

#include <stdexcept>
#include <string>

namespace srl {

/// Failure categories surfaced by the library. The CLI maps these onto
/// its exit-code contract (2 = usage/config, 3 = data).
enum class Errc {
  EmptyScanSet,
  LengthMismatch,
  InvalidAp,
  DimensionMismatch,
  NotAPermutation,
  EmptyDatabase,
  InvalidStageSizes,
  EmptyTrajectory,
  ConfigMismatch,
  ZeroVariance,
  MissingGridSize,
  ParseError,
  EmptyAfterFilter,
  IoError,
  SchemaVersionMismatch,
  InvalidConfig,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyScanSet: return "EmptyScanSet";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidAp: return "InvalidAp";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotAPermutation: return "NotAPermutation";
    case Errc::EmptyDatabase: return "EmptyDatabase";
    case Errc::InvalidStageSizes: return "InvalidStageSizes";
    case Errc::EmptyTrajectory: return "EmptyTrajectory";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::MissingGridSize: return "MissingGridSize";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyAfterFilter: return "EmptyAfterFilter";
    case Errc::IoError: return "IoError";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Error";
}

}  // namespace srl
