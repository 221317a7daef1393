#pragma once

#include <array>

namespace mfd::lbm {

/// D2Q9 stencil: rest, E, N, W, S, NE, NW, SW, SE.
struct D2Q9 {
  static constexpr int Q = 9;
  static constexpr std::array<int, Q> cx{0, 1, 0, -1, 0, 1, -1, -1, 1};
  static constexpr std::array<int, Q> cy{0, 0, 1, 0, -1, 1, 1, -1, -1};
  static constexpr std::array<int, Q> opposite{0, 3, 4, 1, 2, 7, 8, 5, 6};
  static constexpr std::array<double, Q> weight{4.0 / 9,  1.0 / 9,  1.0 / 9,  1.0 / 9, 1.0 / 9,
                                                1.0 / 36, 1.0 / 36, 1.0 / 36, 1.0 / 36};
  static constexpr double cs2 = 1.0 / 3.0;
};

/// Incompressible equilibrium, stored as the deviation from the rest weights:
/// w_i [ drho + 3 c.j + 9/2 (c.j)^2 - 3/2 j.j ] with reference density 1.
template <typename Scalar>
inline Scalar equilibrium_deviation(int i, Scalar drho, Scalar jx, Scalar jy) {
  const Scalar cu = Scalar(D2Q9::cx[i]) * jx + Scalar(D2Q9::cy[i]) * jy;
  const Scalar jj = jx * jx + jy * jy;
  return Scalar(D2Q9::weight[i]) *
         (drho + Scalar(3) * cu + Scalar(4.5) * cu * cu - Scalar(1.5) * jj);
}

}  // namespace mfd::lbm
