#pragma once

#include <stdexcept>
#include <string>

namespace directwf {

enum class ErrorKind {
  InvalidArgument,
  ZeroNorm,
  SpecMismatch,
  BinOutOfRange,
  NullPostSelection,
  DegenerateProfile,
  GridTooLarge,
  GridTooCoarse,
  TooFewBins,
  EmptyBin,
  UnknownParameter,
  Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::BinOutOfRange: return "BinOutOfRange";
    case ErrorKind::NullPostSelection: return "NullPostSelection";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::TooFewBins: return "TooFewBins";
    case ErrorKind::EmptyBin: return "EmptyBin";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace directwf
