#pragma once

#include <cmath>

namespace avglab::kernels {

// Neumaier's variant of Kahan summation.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Cephes minimax coefficients for sin and cos on [-pi/4, pi/4].
inline constexpr double kSinCoef[6] = {1.58962301576546568060E-10, -2.50507477628578072866E-8,
                                       2.75573136213857245213E-6,  -1.98412698295895385996E-4,
                                       8.33333333332211858878E-3,  -1.66666666666666307295E-1};
inline constexpr double kCosCoef[6] = {-1.13585365213876817300E-11, 2.08757008419747316778E-9,
                                       -2.75573141792967388112E-7,  2.48015872888517045348E-5,
                                       -1.38888888888730564116E-3,  4.16666666666665929218E-2};

}  // namespace avglab::kernels

namespace avglab::kernels {

inline double poly5(const double* c, double z) {
  return ((((c[0] * z + c[1]) * z + c[2]) * z + c[3]) * z + c[4]) * z + c[5];
}

// cos and sin of 2 pi r for r in [-1/2, 1/2] via quadrant reduction and the
// minimax polynomials above; the vector kernels use the same steps lane-wise.
inline void sincos_turns(double r, double& cos_out, double& sin_out) {
  const double q = std::nearbyint(4.0 * r);
  const double x = (r - 0.25 * q) * 6.28318530717958647692;
  const double z = x * x;
  const double s = x + x * z * poly5(kSinCoef, z);
  const double c = 1.0 - 0.5 * z + z * z * poly5(kCosCoef, z);
  const int quadrant = static_cast<int>(q) & 3;
  const double cs = (quadrant & 1) ? s : c;
  const double sn = (quadrant & 1) ? c : s;
  cos_out = ((quadrant + 1) & 2) ? -cs : cs;
  sin_out = (quadrant & 2) ? -sn : sn;
}

}  // namespace avglab::kernels
