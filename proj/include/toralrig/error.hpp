// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace toralrig {

enum class ErrorKind {
  InvalidInput,
  NonCommuting,
  NotUnimodular,
  NoAnosovWitness,
  NonSemisimple,
  SpectrumAmbiguous,
  BoundViolated,
  NotInvariant,
  RepresentativeNotFound,
  ImplicationViolated,
  InvalidCircleMap,
  CompatibilityViolated,
  NotBunchedWithin,
  SampleFailed,
  NotDominated,
  ConeEscape,
  NoConvergence,
  GrowthViolated,
  NotOnUnstableLeaf,
  PathDependence,
  DegenerateLattice,
  NotFixedPointTrivial,
  Overflow,
  Config,
  Io,
  StageRefused,
};

const char* error_kind_name(ErrorKind kind);

// Error kind plus an integer payload (indices, bounds, lattice elements).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<long long> payload = {})
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind), payload_(std::move(payload)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<long long>& payload() const noexcept { return payload_; }

 private:
  ErrorKind kind_;
  std::vector<long long> payload_;
};

}  // namespace toralrig
