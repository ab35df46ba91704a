#include "relrbf/errors.hpp"

#include <atomic>
#include <iostream>

namespace relrbf {

namespace {
std::atomic<bool> g_warnings{true};
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NonzeroDiagonal: return "NonzeroDiagonal";
    case Errc::ZeroVarianceDimension: return "ZeroVarianceDimension";
    case Errc::ParseError: return "ParseError";
    case Errc::AsymmetryError: return "AsymmetryError";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnnormalizedPrototype: return "UnnormalizedPrototype";
    case Errc::ZeroWeightSum: return "ZeroWeightSum";
    case Errc::EmptySet: return "EmptySet";
    case Errc::NonpositiveSigma: return "NonpositiveSigma";
    case Errc::NonpositiveEta: return "NonpositiveEta";
    case Errc::DegenerateShift: return "DegenerateShift";
    case Errc::AtCapacity: return "AtCapacity";
    case Errc::InvalidClusterCount: return "InvalidClusterCount";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::EigenFailure: return "EigenFailure";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void warn(std::string_view message) {
  if (g_warnings.load(std::memory_order_relaxed)) {
    std::cerr << "warning: " << message << '\n';
  }
}

void set_warnings_enabled(bool enabled) { g_warnings.store(enabled, std::memory_order_relaxed); }

}  // namespace relrbf
