// SPDX-License-Identifier: Apache-2.0
#include "toralrig/error.hpp"

namespace toralrig {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonCommuting: return "NonCommuting";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::NoAnosovWitness: return "NoAnosovWitness";
    case ErrorKind::NonSemisimple: return "NonSemisimple";
    case ErrorKind::SpectrumAmbiguous: return "SpectrumAmbiguous";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::RepresentativeNotFound: return "RepresentativeNotFound";
    case ErrorKind::ImplicationViolated: return "ImplicationViolated";
    case ErrorKind::InvalidCircleMap: return "InvalidCircleMap";
    case ErrorKind::CompatibilityViolated: return "CompatibilityViolated";
    case ErrorKind::NotBunchedWithin: return "NotBunchedWithin";
    case ErrorKind::SampleFailed: return "SampleFailed";
    case ErrorKind::NotDominated: return "NotDominated";
    case ErrorKind::ConeEscape: return "ConeEscape";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::GrowthViolated: return "GrowthViolated";
    case ErrorKind::NotOnUnstableLeaf: return "NotOnUnstableLeaf";
    case ErrorKind::PathDependence: return "PathDependence";
    case ErrorKind::DegenerateLattice: return "DegenerateLattice";
    case ErrorKind::NotFixedPointTrivial: return "NotFixedPointTrivial";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    case ErrorKind::StageRefused: return "StageRefused";
  }
  return "Unknown";
}

}  // namespace toralrig
