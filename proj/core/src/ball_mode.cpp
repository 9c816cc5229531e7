#include "fsiwave/ball_mode.hpp"

#include <array>
#include <cmath>

#include "fsiwave/bessel.hpp"
#include "fsiwave/hyperdual.hpp"
#include "fsiwave/io.hpp"

namespace fsiwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

using std::cos;
using std::sin;
using std::sqrt;

/// psi(y) = (j1(k|y|)/|y|) y, templated so hyper-dual numbers flow
/// through. Near the origin the radial coefficient switches to its Taylor
/// series in t^2 = k^2 |y|^2 to dodge the 0/0.
template <class T>
std::array<T, 3> mode_displacement(const std::array<T, 3>& y, double k,
                                   double r) {
    const T s2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    T coeff;  // j1(k s)/s = k * (j1(t)/t), t = k s
    if (value(s2) < 1e-6 * r * r) {
        const T t2 = (k * k) * s2;
        // j1(t)/t = 1/3 - t^2/30 + t^4/840 - t^6/45360
        coeff = T(k) * (T(1.0 / 3.0) - t2 * (1.0 / 30.0) +
                        t2 * t2 * (1.0 / 840.0) -
                        t2 * t2 * t2 * (1.0 / 45360.0));
    } else {
        const T s = sqrt(s2);
        const T t = k * s;
        coeff = (sin(t) / (t * t) - cos(t) / t) / s;
    }
    return {coeff * y[0], coeff * y[1], coeff * y[2]};
}

/// All first and second partials of psi at y: J(c,a) = d_a psi_c,
/// H[c](a,b) = d_a d_b psi_c. Six hyper-dual sweeps, one per index pair.
void mode_derivatives(const AnalyticBallMode& m, const Vec3& y,
                      Eigen::Matrix3d& J, std::array<Eigen::Matrix3d, 3>& H) {
    const double k = m.root / m.radius;
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            std::array<HyperDual, 3> yh;
            for (int i = 0; i < 3; ++i) yh[i] = HyperDual(y[i]);
            yh[a].d1 = 1;
            yh[b].d2 = 1;
            const auto psi = mode_displacement(yh, k, m.radius);
            for (int c = 0; c < 3; ++c) {
                J(c, a) = psi[c].d1;
                J(c, b) = psi[c].d2;
                H[c](a, b) = psi[c].d12;
                H[c](b, a) = psi[c].d12;
            }
        }
}

}  // namespace

Vec3 AnalyticBallMode::displacement(const Vec3& y) const {
    const auto v = mode_displacement(std::array<double, 3>{y[0], y[1], y[2]},
                                     root / radius, radius);
    return Vec3(v[0], v[1], v[2]);
}

Vec3 AnalyticBallMode::div_stress(const Vec3& y) const {
    Eigen::Matrix3d J;
    std::array<Eigen::Matrix3d, 3> H;
    mode_derivatives(*this, y, J, H);
    // Div Sigma(u) = l1 * Lap u + (l1 + l2) grad div u
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        double lap = H[c].trace();
        double graddiv = 0;
        for (int a = 0; a < 3; ++a) graddiv += H[a](c, a);
        out[c] = params.lambda1 * lap +
                 (params.lambda1 + params.lambda2) * graddiv;
    }
    return out;
}

double AnalyticBallMode::eigen_residual(const Vec3& y) const {
    return (div_stress(y) + mu * displacement(y)).norm();
}

Vec3 AnalyticBallMode::traction(const Vec3& y) const {
    Eigen::Matrix3d J;
    std::array<Eigen::Matrix3d, 3> H;
    mode_derivatives(*this, y, J, H);
    const Eigen::Matrix3d eps = 0.5 * (J + J.transpose());
    const Eigen::Matrix3d sigma =
        2 * params.lambda1 * eps +
        params.lambda2 * eps.trace() * Eigen::Matrix3d::Identity();
    return sigma * (y / y.norm());
}

AnalyticBallMode ball_pressure_wave(int i, double r,
                                    const ElasticParams& params) {
    if (i < 1) throw InvalidArgument("ball_pressure_wave: index >= 1");
    if (r <= 0) throw InvalidArgument("ball_pressure_wave: radius > 0");
    params.check();
    AnalyticBallMode m;
    m.index = i;
    m.radius = r;
    m.params = params;
    m.root = spherical_bessel_roots(i).back();
    const double p = 2 * params.lambda1 + params.lambda2;
    m.mu = p * m.root * m.root / (r * r);
    m.q = p * std::sin(m.root);
    return m;
}

Vec3 ball_phi_n(const Vec3& y, const ElasticParams& params) {
    params.check();
    return y / (2 * params.lambda1 + 3 * params.lambda2);
}

namespace {

/// Deterministic quasi-uniform sphere points (Fibonacci lattice).
Vec3 fibonacci_sphere_point(int i, int n) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * std::fmod(i / golden, 1.0);
    return Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
}

}  // namespace

double ball_badness(const AnalyticBallMode& mode, int n_samples) {
    if (n_samples < 4) throw InvalidArgument("ball_badness: n_samples >= 4");
    double tn = 0, nn = 0, tt = 0;
    std::vector<Vec3> tractions(n_samples), normals(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const Vec3 n = fibonacci_sphere_point(i, n_samples);
        const Vec3 t = mode.traction(mode.radius * n);
        tractions[i] = t;
        normals[i] = n;
        tn += t.dot(n);
        nn += n.squaredNorm();
        tt += t.squaredNorm();
    }
    if (std::sqrt(tt) < 1e-14)
        throw DegenerateInput("ball_badness: traction has no content");
    const double q_fit = tn / nn;
    double res = 0;
    for (int i = 0; i < n_samples; ++i)
        res += (tractions[i] - q_fit * normals[i]).squaredNorm();
    return std::sqrt(std::max(0.0, res)) / std::sqrt(tt);
}

void save_analytic_mode_csv(const AnalyticBallMode& mode, int n_samples,
                            const std::string& path) {
    if (n_samples < 1)
        throw InvalidArgument("save_analytic_mode_csv: n_samples >= 1");
    CsvWriter csv(path, {"x", "y", "z", "psi_x", "psi_y", "psi_z"});
    // interior shells of sphere-lattice points plus the center
    const int shells = std::max(1, static_cast<int>(std::cbrt(n_samples)));
    int written = 0;
    for (int s = 1; s <= shells && written < n_samples; ++s) {
        const double r = mode.radius * s / (shells + 0.5);
        const int per_shell =
            std::max(1, (n_samples - written) / (shells - s + 1));
        for (int i = 0; i < per_shell && written < n_samples; ++i) {
            const Vec3 y = r * fibonacci_sphere_point(i, per_shell);
            const Vec3 psi = mode.displacement(y);
            csv.row({y[0], y[1], y[2], psi[0], psi[1], psi[2]});
            ++written;
        }
    }
}

}  // namespace fsiwave
