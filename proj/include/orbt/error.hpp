#pragma once

#include <stdexcept>
#include <string>

namespace orbt {

enum class Errc {
  NonClosedGroup,
  NonOrthogonalAction,
  DegenerateLattice,
  UnsupportedDimension,
  PointGroupTooLarge,
  NonUnitaryRep,
  RelationViolated,
  RankMismatch,
  PathLeavesAtlas,
  EndpointMismatch,
  NotAProperBundle,
  CutoffTooSmall,
  TruncationInsufficient,
  KernelMismatch,
  SigmaAtPole,
  NonPositiveMetric,
  TooFewModes,
  EvenDimension,
  UnsupportedGroup,
  BadInput,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonClosedGroup: return "NonClosedGroup";
    case Errc::NonOrthogonalAction: return "NonOrthogonalAction";
    case Errc::DegenerateLattice: return "DegenerateLattice";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::PointGroupTooLarge: return "PointGroupTooLarge";
    case Errc::NonUnitaryRep: return "NonUnitaryRep";
    case Errc::RelationViolated: return "RelationViolated";
    case Errc::RankMismatch: return "RankMismatch";
    case Errc::PathLeavesAtlas: return "PathLeavesAtlas";
    case Errc::EndpointMismatch: return "EndpointMismatch";
    case Errc::NotAProperBundle: return "NotAProperBundle";
    case Errc::CutoffTooSmall: return "CutoffTooSmall";
    case Errc::TruncationInsufficient: return "TruncationInsufficient";
    case Errc::KernelMismatch: return "KernelMismatch";
    case Errc::SigmaAtPole: return "SigmaAtPole";
    case Errc::NonPositiveMetric: return "NonPositiveMetric";
    case Errc::TooFewModes: return "TooFewModes";
    case Errc::EvenDimension: return "EvenDimension";
    case Errc::UnsupportedGroup: return "UnsupportedGroup";
    case Errc::BadInput: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace orbt
