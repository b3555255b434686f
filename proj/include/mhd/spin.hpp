#pragma once

// Irreducible su(2) spin representation on C^n, skew-Hermitian convention.
//
// The generators satisfy [s1,s2] = s3 (cyclic) and
// s1^2 + s2^2 + s3^2 = -s(s+1) I with spin s = (n-1)/2.
// s3 is diagonal with entries -i*m, m = s, s-1, ..., -s (basis index 0 is
// the highest weight); s1 and s2 are supported on the first off-diagonals.

#include "mhd/common.hpp"

namespace mhd {

struct SpinOperators {
  int n = 0;
  CMat s1, s2, s3;
};

// Builds the spin-(n-1)/2 generators; n >= 1 (n == 1 gives 1x1 zeros).
SpinOperators build_spin_operators(int n);

}  // namespace mhd
