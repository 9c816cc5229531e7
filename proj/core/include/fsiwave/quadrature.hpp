#pragma once

#include <vector>

namespace fsiwave {

/// One quadrature point on the reference triangle (barycentric) or the
/// reference segment [0,1]. Weights sum to 1; scale by the cell measure.
struct QuadPoint {
    double l0, l1, l2;  // barycentric coordinates (l2 unused in 1d)
    double w;
};

/// Symmetric triangle rule exact at least to the given polynomial degree.
/// Available degrees: 2 (3 pts), 4 (6 pts), 5 (7 pts).
const std::vector<QuadPoint>& triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1], exact to degree 2n-1. n in {1..5}.
const std::vector<QuadPoint>& segment_rule(int npoints);

}  // namespace fsiwave
