#include "fsiwave/bessel.hpp"

#include <cmath>

#include "fsiwave/error.hpp"

namespace fsiwave {

namespace {
constexpr double kPi = 3.14159265358979323846;

// d/dr j1 = (r^2 - 2) sin r / r^3 + 2 cos r / r^2
double spherical_j1_prime(double r) {
    return (r * r - 2.0) * std::sin(r) / (r * r * r) +
           2.0 * std::cos(r) / (r * r);
}
}  // namespace

double spherical_j1(double r) {
    if (std::abs(r) < 1e-4) {
        // j1(r) = r/3 - r^3/30 + r^5/840
        const double r2 = r * r;
        return r * (1.0 / 3.0 - r2 / 30.0 + r2 * r2 / 840.0);
    }
    return std::sin(r) / (r * r) - std::cos(r) / r;
}

std::vector<double> spherical_bessel_roots(int n) {
    if (n < 1) throw InvalidArgument("spherical_bessel_roots: n must be >= 1");
    std::vector<double> roots;
    roots.reserve(n);
    for (int i = 1; i <= n; ++i) {
        double lo = i * kPi, hi = (i + 0.5) * kPi;
        // j1 changes sign across (i*pi, (i+1/2)*pi)
        double flo = spherical_j1(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = spherical_j1(mid);
            if ((flo > 0) == (fm > 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double r = 0.5 * (lo + hi);
        for (int it = 0; it < 20 && std::abs(spherical_j1(r)) > 1e-14; ++it)
            r -= spherical_j1(r) / spherical_j1_prime(r);
        roots.push_back(r);
    }
    return roots;
}

}  // namespace fsiwave
