// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "toralrig/integer.hpp"

namespace toralrig::testing {

struct CorpusAction {
  std::string name;
  std::vector<IntMatrix> generators;
};

IntMatrix cubic_a();
IntMatrix cubic_b();  // A^2 - 2I
IntMatrix cat_map();
IntMatrix companion(const std::vector<long long>& monic_low_to_high);  // x^n + c_{n-1} x^{n-1} + ... + c_0
IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b);

// Units of Z[C] with small coefficients, chosen by a seeded search until `count`
// generators with independent Lyapunov vectors are found.
std::vector<IntMatrix> unit_search(const IntMatrix& c, int count, unsigned seed, int bound = 2);

// At least 20 actions: the cubic pair and its powers, cat-map products, unit searches.
std::vector<CorpusAction> action_corpus();

}  // namespace toralrig::testing
