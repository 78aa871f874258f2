// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used by the tests.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/integer.hpp"

namespace toralrig::testing {

// Cofactor expansion; small matrices only.
BigInt cofactor_determinant(const std::vector<std::vector<BigInt>>& m);

// gcd of all r x r minors of m (the r-th determinantal divisor).
BigInt determinantal_divisor(const IntMatrix& m, int r);

// Index of the lattice spanned by the columns of [A_1 - I | ... | A_k - I].
BigInt stacked_index(const std::vector<IntMatrix>& gens);

// Roots 2 cos(pi/9), 2 cos(7 pi/9), 2 cos(13 pi/9) of x^3 - 3x - 1; B acts by lambda^2 - 2.
double cubic_root(int i);
Eigen::Vector2d cubic_functional(int i);

// Number of x in T^d with m x = x, counted by brute force on the lattice (1/N) Z^d.
long long brute_fixed_points(const IntMatrix& m, long long N);

}  // namespace toralrig::testing
