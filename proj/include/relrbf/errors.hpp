#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relrbf {

enum class Errc {
  NonSquare,
  NonFinite,
  NonzeroDiagonal,
  ZeroVarianceDimension,
  ParseError,
  AsymmetryError,
  NegativeEntry,
  DimensionMismatch,
  UnnormalizedPrototype,
  ZeroWeightSum,
  EmptySet,
  NonpositiveSigma,
  NonpositiveEta,
  DegenerateShift,
  AtCapacity,
  InvalidClusterCount,
  TooFewSamples,
  EigenFailure,
  UnknownKind,
  MalformedFile,
  InvalidConfig,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Warnings go to stderr unless silenced (tests silence them).
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace relrbf
