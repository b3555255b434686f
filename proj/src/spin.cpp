#include "mhd/spin.hpp"

namespace mhd {

SpinOperators build_spin_operators(int n) {
  if (n < 1) throw std::invalid_argument("build_spin_operators: n must be >= 1");

  const double s = 0.5 * (n - 1);
  SpinOperators ops;
  ops.n = n;
  ops.s1 = CMat::Zero(n, n);
  ops.s2 = CMat::Zero(n, n);
  ops.s3 = CMat::Zero(n, n);

  for (int i = 0; i < n; ++i) {
    const double m = s - i;
    ops.s3(i, i) = cplx(0.0, -m);
  }
  // Ladder entries: (S+)_{i,i+1} = sqrt(s(s+1) - m'(m'+1)) with m' = s-(i+1).
  // Hermitian Sx = (S+ + S-)/2, Sy = (S+ - S-)/(2i); here s1 = -i Sx, s2 = -i Sy.
  for (int i = 0; i + 1 < n; ++i) {
    const double mp = s - (i + 1);
    const double c = std::sqrt(s * (s + 1.0) - mp * (mp + 1.0));
    ops.s1(i, i + 1) = cplx(0.0, -0.5 * c);
    ops.s1(i + 1, i) = cplx(0.0, -0.5 * c);
    ops.s2(i, i + 1) = cplx(-0.5 * c, 0.0);
    ops.s2(i + 1, i) = cplx(0.5 * c, 0.0);
  }
  return ops;
}

}  // namespace mhd
