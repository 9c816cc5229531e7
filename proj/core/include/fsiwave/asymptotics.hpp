#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsiwave/elasticity.hpp"
#include "fsiwave/solver.hpp"

namespace fsiwave {

/// Coefficients c_k(t_j) of a time series of solid fields against an
/// L2-orthonormal eigenbasis.
struct ModalSeries {
    std::vector<int> modes;      // 0-based indices into the basis
    std::vector<double> times;   // strictly increasing
    Eigen::MatrixXd coeffs;      // modes x times
};

ModalSeries modal_coeffs(const std::vector<Field>& fields,
                         const std::vector<double>& times,
                         const std::vector<EigenPair>& basis);

/// Per-mode sinusoid fit a_k sin(w_k (t - t_ref)) + b_k cos(w_k (t - t_ref))
/// over a window, with a constant detrend column that is discarded from
/// the wave (pressure waves carry no offset). residual is the combined
/// root-mean-square misfit.
struct PressureWaveFit {
    std::vector<int> modes;  // 0-based basis indices actually fitted
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> omega;  // sqrt(mu_k)
    double t_ref = 0;
    double residual = 0;

    /// Wave coefficients at time t in the eigenbasis (one per fitted
    /// mode); time_derivative = 0, 1, or 2.
    std::vector<double> coeffs_at(double t, int time_derivative = 0) const;
};

PressureWaveFit fit_pressure_wave(const ModalSeries& series,
                                  const std::vector<int>& bad_modes,
                                  const std::vector<double>& mu, double t_a,
                                  double t_b);

/// Rayleigh-type offset coefficient:
/// int Sigma(xi0):eps(phi_N) / int Sigma(phi_N):eps(phi_N), and the
/// scaled field phi_N0 = coefficient * phi_N.
std::pair<double, Field> phi_n0(const Field& xi0, const Field& phi_N,
                                const ElasticParams& params);

/// Shifted differences xi~(t) = xi(t0 + t) - xi(t) with the distance
/// surrogate to the pressure-wave set: H1 norm of xi~ minus its modal
/// projection onto the bad modes followed by a periodic fit.
struct ShiftSeries {
    std::vector<double> times;
    std::vector<Field> xi_tilde;
    std::vector<double> distance;
};

ShiftSeries shift_difference(const Trajectory& traj, double t0,
                             const std::vector<EigenPair>& basis,
                             const std::vector<int>& bad_modes,
                             const ElasticParams& params);

/// The long-time decomposition xi(t) ~ eta*(t) + phi_N0 + r(t): periodic
/// pressure wave, stationary Neumann offset, rigid drift, and the
/// H1 residual per stored step. Also reports the gaps of the first and
/// (dual-norm, backward-differenced) second time derivatives.
struct Decomposition {
    PressureWaveFit eta_star;
    double phi_n0_coeff = 0;
    Field phi_n0_field;
    std::vector<double> times;
    std::vector<RigidMotion> rigid_series;
    std::vector<double> residual_h1;
    std::vector<double> xi_dot_gap_l2;
    std::vector<double> xi_ddot_gap_dual;
};

/// Fit window: the trailing 25% of the run, widened to at least three
/// periods of the slowest bad mode when necessary.
Decomposition decompose(const Trajectory& traj,
                        const std::vector<EigenPair>& basis,
                        const std::vector<int>& bad_modes, const Field& phi_N,
                        const ElasticParams& params);

/// Exact 1d standing-wave solution on (-1, 1) with 2*l1 + l2 = 1:
/// eta(t,x) = cos(pi t) sin(pi x), q(t) = -cos(pi t).
std::pair<double, double> oracle_wave_1d(double t, double x);

/// JSON report {bad_modes, eta_star, phi_N0_coeff, residual_csv_path}
/// plus the residual series CSV
/// (t, residual_H1, xi_dot_gap_L2, xi_ddot_gap_dual).
void save_decomposition_report(const Decomposition& dec,
                               const std::string& json_path,
                               const std::string& residual_csv_path);

}  // namespace fsiwave
