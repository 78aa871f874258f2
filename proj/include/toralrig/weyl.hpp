// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/lattice_action.hpp"

namespace toralrig {

inline constexpr double kProportionalityTol = 1e-9;

struct CoarseClass {
  std::vector<int> members;
  Eigen::VectorXd direction;  // unit vector positively proportional to every member
  int dimension = 0;          // sum of d_i over members
};

struct Hyperplane {
  Eigen::VectorXd normal;  // unit, first nonzero coordinate positive
  std::vector<int> functionals;
};

struct Chamber {
  std::vector<int> signs;                      // one entry in {+1,-1} per hyperplane
  Eigen::VectorXd witness;                     // real point realizing the signs
  std::optional<LatticePoint> representative;  // regular lattice point, if found
};

struct PredicateFlags {
  bool maximal = false;
  bool cartan = false;
  bool tns = false;
  bool full = false;
  bool resonance_free = false;
};

struct WeylChamberDecomposition {
  int rank = 0;
  int search_bound = 0;
  std::vector<CoarseClass> classes;
  std::vector<Hyperplane> hyperplanes;
  std::vector<int> functional_hyperplane;   // hyperplane index of each functional
  std::vector<int> functional_orientation;  // chi_i = orientation * |chi_i| * normal
  std::vector<Chamber> chambers;
  PredicateFlags predicates;

  // Sign of every functional on a chamber.
  std::vector<int> functional_signs(const Chamber& chamber) const;
  // Index of the chamber containing a, or -1 when a is singular.
  int locate(const Eigen::VectorXd& a) const;
};

std::vector<CoarseClass> coarse_classes(const LyapunovSpectrum& spectrum);

// Maximum number of regions of a central arrangement of h hyperplanes in R^k.
long long max_chamber_count(int hyperplanes, int k);

WeylChamberDecomposition chambers(const LyapunovSpectrum& spectrum, int search_bound,
                                  bool require_representatives = true);

PredicateFlags check_properties(const LyapunovSpectrum& spectrum, const WeylChamberDecomposition& decomposition);

LatticePoint regular_representative(const WeylChamberDecomposition& decomposition, int chamber, int bound);

struct ImplicationMember {
  std::string name;
  PredicateFlags flags;
  long long chamber_count = 0;
  bool violated = false;
};

struct ImplicationReport {
  std::vector<ImplicationMember> members;
  std::vector<std::string> violations;
};

struct CorpusEntry {
  std::string name;
  LyapunovSpectrum spectrum;
};

ImplicationReport implication_suite(const std::vector<CorpusEntry>& corpus, int search_bound = 10);

// Chamber diagram on the unit circle; rank-2 only.
std::string chamber_svg(const WeylChamberDecomposition& decomposition);

}  // namespace toralrig
