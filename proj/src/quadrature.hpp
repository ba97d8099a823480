#pragma once

// Adaptive Gauss-Kronrod integration with splitting at marked points and a
// change of variables at integrable power singularities.

#include <complex>
#include <functional>
#include <vector>

namespace avglab::quad {

using cplx = std::complex<double>;

// A point where the integrand has a kink or jump (exponent 0) or behaves
// like |x - at|^-exponent.
struct Mark {
  double at;
  double exponent = 0.0;
};

double integrate(const std::function<double(double)>& f, double lo, double hi, double tolerance);

// Integral of f over [lo, hi], split at the marks inside [lo, hi]. Near a
// singular mark x = p + t the substitution t = v^(1/(1-a)) removes the
// singularity.
cplx integrate_marked(const std::function<cplx(double)>& f, double lo, double hi, std::vector<Mark> marks,
                      double tolerance);
double integrate_marked_real(const std::function<double(double)>& f, double lo, double hi, std::vector<Mark> marks,
                             double tolerance);

}  // namespace avglab::quad
