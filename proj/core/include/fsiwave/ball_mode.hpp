#pragma once

#include <Eigen/Dense>
#include <string>

#include "fsiwave/params.hpp"

namespace fsiwave {

using Vec3 = Eigen::Vector3d;

/// Closed-form pressure-wave eigenmode of the 3d ball: a Dirichlet
/// eigenfunction of the Lame operator whose boundary traction is a scalar
/// multiple of the normal, psi_i(y) = (j1(r_i|y|/r)/|y|) y with r_i the
/// i-th positive root of the spherical Bessel function j1.
struct AnalyticBallMode {
    int index = 1;
    double radius = 1.0;
    double root = 0.0;  // r_i, j1(r_i) = 0
    double mu = 0.0;    // (2*l1+l2) r_i^2 / r^2
    double q = 0.0;     // (2*l1+l2) sin(r_i)
    ElasticParams params;

    Vec3 displacement(const Vec3& y) const;
    /// Div Sigma(psi) at y, by exact automatic second differentiation of
    /// the closure; equals -mu * psi(y) in the interior.
    Vec3 div_stress(const Vec3& y) const;
    /// |-Div Sigma(psi)(y) - mu psi(y)|.
    double eigen_residual(const Vec3& y) const;
    /// Boundary traction Sigma(psi) n at a point on the sphere |y| = r.
    Vec3 traction(const Vec3& y) const;
};

AnalyticBallMode ball_pressure_wave(int i, double r,
                                    const ElasticParams& params);

/// Stationary Neumann solution of the ball: phi_N(y) = y / (2*l1 + 3*l2).
Vec3 ball_phi_n(const Vec3& y, const ElasticParams& params);

/// Relative misfit of the boundary traction against the normal direction,
/// sampled on a deterministic quasi-uniform set of sphere points.
double ball_badness(const AnalyticBallMode& mode, int n_samples);

/// CSV columns: x, y, z, psi_x, psi_y, psi_z at deterministic interior
/// sample points.
void save_analytic_mode_csv(const AnalyticBallMode& mode, int n_samples,
                            const std::string& path);

}  // namespace fsiwave
