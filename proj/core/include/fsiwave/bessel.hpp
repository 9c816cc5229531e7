#pragma once

#include <vector>

namespace fsiwave {

/// Spherical Bessel function j1(r) = sin(r)/r^2 - cos(r)/r, with the
/// removable singularity at r = 0 handled by series expansion.
double spherical_j1(double r);

/// First n positive roots of j1, each bracketed in (i*pi, (i+1/2)*pi) and
/// bisected, then Newton-polished to |j1(r_i)| <= 1e-12.
std::vector<double> spherical_bessel_roots(int n);

}  // namespace fsiwave
