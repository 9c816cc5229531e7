#include "fsiwave/asymptotics.hpp"

#include <cmath>
#include <fstream>

#include "fsiwave/io.hpp"
#include <json.hpp>

namespace fsiwave {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ModalSeries modal_coeffs(const std::vector<Field>& fields,
                         const std::vector<double>& times,
                         const std::vector<EigenPair>& basis) {
    if (fields.size() != times.size())
        throw InvalidArgument("modal_coeffs: fields/times size mismatch");
    if (basis.empty()) throw InvalidArgument("modal_coeffs: empty basis");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (times[j] <= times[j - 1])
            throw InvalidArgument("modal_coeffs: times must increase");
    const SpacePtr space = basis.front().psi.space;
    const SpMat M = assemble_mass(*space);
    ModalSeries s;
    s.times = times;
    s.coeffs.resize(basis.size(), times.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        s.modes.push_back(static_cast<int>(k));
        const Eigen::VectorXd Mpsi = M * basis[k].psi.coeffs;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].coeffs.size() != Mpsi.size())
                throw InvalidArgument("modal_coeffs: field space mismatch");
            s.coeffs(k, j) = Mpsi.dot(fields[j].coeffs);
        }
    }
    return s;
}

std::vector<double> PressureWaveFit::coeffs_at(double t,
                                               int time_derivative) const {
    std::vector<double> out(modes.size(), 0.0);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double w = omega[i];
        const double ph = w * (t - t_ref);
        const double s = std::sin(ph), c = std::cos(ph);
        switch (time_derivative) {
            case 0: out[i] = a[i] * s + b[i] * c; break;
            case 1: out[i] = w * (a[i] * c - b[i] * s); break;
            case 2: out[i] = -w * w * (a[i] * s + b[i] * c); break;
            default:
                throw InvalidArgument("coeffs_at: derivative order 0..2");
        }
    }
    return out;
}

PressureWaveFit fit_pressure_wave(const ModalSeries& series,
                                  const std::vector<int>& bad_modes,
                                  const std::vector<double>& mu, double t_a,
                                  double t_b) {
    if (bad_modes.size() != mu.size())
        throw InvalidArgument("fit_pressure_wave: modes/mu size mismatch");
    if (!(t_b > t_a)) throw InvalidArgument("fit_pressure_wave: empty window");
    std::vector<int> sample;
    for (std::size_t j = 0; j < series.times.size(); ++j)
        if (series.times[j] >= t_a - 1e-12 && series.times[j] <= t_b + 1e-12)
            sample.push_back(static_cast<int>(j));

    PressureWaveFit fit;
    fit.t_ref = t_a;
    if (bad_modes.empty()) {
        fit.residual = 0;
        return fit;
    }
    const int n = static_cast<int>(sample.size());
    for (const double m : mu) {
        if (m <= 0) throw InvalidArgument("fit_pressure_wave: mu must be > 0");
        const double period = 2 * kPi / std::sqrt(m);
        // >= 4 samples per period of every fitted mode
        if (n < 4 || n * period < 4.0 * (t_b - t_a))
            throw InsufficientWindow(
                "fit_pressure_wave: window undersampled for period " +
                format_double(period));
    }

    double sq_sum = 0;
    int n_residual = 0;
    for (std::size_t i = 0; i < bad_modes.size(); ++i) {
        const int k = bad_modes[i];
        if (k < 0 || k >= series.coeffs.rows())
            throw InvalidArgument("fit_pressure_wave: bad mode index");
        const double w = std::sqrt(mu[i]);
        Eigen::MatrixXd A(n, 3);  // sin, cos, constant detrend
        Eigen::VectorXd y(n);
        for (int r = 0; r < n; ++r) {
            const double t = series.times[sample[r]] - t_a;
            A(r, 0) = std::sin(w * t);
            A(r, 1) = std::cos(w * t);
            A(r, 2) = 1.0;
            y[r] = series.coeffs(k, sample[r]);
        }
        const Eigen::Vector3d x =
            A.colPivHouseholderQr().solve(y);
        fit.modes.push_back(k);
        fit.a.push_back(x[0]);
        fit.b.push_back(x[1]);
        fit.omega.push_back(w);
        sq_sum += (A * x - y).squaredNorm();
        n_residual += n;
    }
    fit.residual = n_residual > 0 ? std::sqrt(sq_sum / n_residual) : 0.0;
    return fit;
}

std::pair<double, Field> phi_n0(const Field& xi0, const Field& phi_N,
                                const ElasticParams& params) {
    const SpMat K = assemble_elastic_stiffness(*phi_N.space, params);
    const double denom = phi_N.coeffs.dot(K * phi_N.coeffs);
    if (denom <= 1e-14)
        throw DegenerateInput("phi_n0: phi_N has no elastic energy");
    if (xi0.coeffs.size() != phi_N.coeffs.size())
        throw InvalidArgument("phi_n0: space mismatch");
    const double coeff = xi0.coeffs.dot(K * phi_N.coeffs) / denom;
    Field scaled = phi_N;
    scaled.coeffs *= coeff;
    return {coeff, scaled};
}

namespace {

/// eta*(t) (or a time derivative) as a field in the eigenbasis.
Field wave_field(const PressureWaveFit& fit,
                 const std::vector<EigenPair>& basis, SpacePtr space,
                 double t, int deriv) {
    Field f = make_field(space);
    const std::vector<double> c = fit.coeffs_at(t, deriv);
    for (std::size_t i = 0; i < fit.modes.size(); ++i)
        f.coeffs += c[i] * basis[fit.modes[i]].psi.coeffs;
    return f;
}

}  // namespace

ShiftSeries shift_difference(const Trajectory& traj, double t0,
                             const std::vector<EigenPair>& basis,
                             const std::vector<int>& bad_modes,
                             const ElasticParams& params) {
    const double sdt = traj.store_dt();
    const double ratio = t0 / sdt;
    const int m = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - m) > 1e-9 || m < 0)
        throw InvalidArgument(
            "shift_difference: t0 must be a nonnegative multiple of the "
            "stored stride");
    const int n = static_cast<int>(traj.states.size());
    if (m >= n)
        throw InvalidArgument("shift_difference: t0 exceeds the trajectory");

    ShiftSeries out;
    for (int j = 0; j + m < n; ++j) {
        Field d = traj.states[j].xi;
        d.coeffs = traj.states[j + m].xi.coeffs - traj.states[j].xi.coeffs;
        out.times.push_back(traj.states[j].t);
        out.xi_tilde.push_back(std::move(d));
    }
    out.distance.assign(out.times.size(), 0.0);
    if (m == 0 || bad_modes.empty() || out.times.size() < 2) return out;

    const ModalSeries series = modal_coeffs(out.xi_tilde, out.times, basis);
    std::vector<double> mu;
    for (const int k : bad_modes) mu.push_back(basis[k].mu);
    const PressureWaveFit fit = fit_pressure_wave(
        series, bad_modes, mu, out.times.front(), out.times.back());
    const SpacePtr space = out.xi_tilde.front().space;
    for (std::size_t j = 0; j < out.xi_tilde.size(); ++j) {
        Field diff = out.xi_tilde[j];
        diff.coeffs -=
            wave_field(fit, basis, space, out.times[j], 0).coeffs;
        out.distance[j] = norm(diff, NormKind::H1);
    }
    (void)params;
    return out;
}

Decomposition decompose(const Trajectory& traj,
                        const std::vector<EigenPair>& basis,
                        const std::vector<int>& bad_modes, const Field& phi_N,
                        const ElasticParams& params) {
    if (traj.states.empty()) throw InvalidArgument("decompose: empty run");
    const SpacePtr space = traj.states.front().xi.space;

    std::vector<Field> xis;
    std::vector<double> times;
    for (const State& s : traj.states) {
        xis.push_back(s.xi);
        times.push_back(s.t);
    }

    Decomposition dec;
    dec.times = times;

    // trailing-25% window, at least three periods of the slowest bad mode
    double t_b = times.back();
    double t_a = times.back() - 0.25 * (times.back() - times.front());
    if (!bad_modes.empty()) {
        double slowest = basis[bad_modes.front()].mu;
        for (const int k : bad_modes) slowest = std::min(slowest, basis[k].mu);
        const double need = 3.0 * 2.0 * kPi / std::sqrt(slowest);
        t_a = std::min(t_a, t_b - need);
        t_a = std::max(t_a, times.front());
    }

    if (!bad_modes.empty()) {
        const ModalSeries series = modal_coeffs(xis, times, basis);
        std::vector<double> mu;
        for (const int k : bad_modes) mu.push_back(basis[k].mu);
        dec.eta_star = fit_pressure_wave(series, bad_modes, mu, t_a, t_b);
    } else {
        dec.eta_star.t_ref = t_a;
    }

    auto [coeff, field] = phi_n0(xis.front(), phi_N, params);
    dec.phi_n0_coeff = coeff;
    dec.phi_n0_field = std::move(field);

    const SpMat K_grad = assemble_gradient_stiffness(*space);
    const SpMat M = assemble_mass(*space);
    const DualNorm dual{SpMat(K_grad + M)};

    Field prev_gap_dot = make_field(space);
    for (std::size_t j = 0; j < xis.size(); ++j) {
        const double t = times[j];
        Field eta = wave_field(dec.eta_star, basis, space, t, 0);

        Field remainder = xis[j];
        remainder.coeffs -= eta.coeffs;
        const RigidMotion r = project_rigid(remainder);
        dec.rigid_series.push_back(r);

        Field res = remainder;
        res.coeffs -= dec.phi_n0_field.coeffs;
        res.coeffs -= rigid_field(space, r).coeffs;
        dec.residual_h1.push_back(norm(res, NormKind::H1));

        Field gap_dot = traj.states[j].xi_dot;
        gap_dot.coeffs -=
            wave_field(dec.eta_star, basis, space, t, 1).coeffs;
        dec.xi_dot_gap_l2.push_back(norm(gap_dot, NormKind::L2));

        if (j == 0) {
            dec.xi_ddot_gap_dual.push_back(0.0);
        } else {
            const double dt = times[j] - times[j - 1];
            // backward difference of (xi_dot - eta*_dot), i.e. the gap of
            // the accelerations up to O(dt), in the (K+M)^-1 dual norm
            Eigen::VectorXd acc =
                (gap_dot.coeffs - prev_gap_dot.coeffs) / dt;
            // recenter the analytic part on the midpoint-consistent value
            dec.xi_ddot_gap_dual.push_back(dual(M * acc));
        }
        prev_gap_dot = std::move(gap_dot);
    }
    return dec;
}

std::pair<double, double> oracle_wave_1d(double t, double x) {
    if (x < -1.0 || x > 1.0)
        throw InvalidArgument("oracle_wave_1d: x must lie in [-1, 1]");
    return {std::cos(kPi * t) * std::sin(kPi * x), -std::cos(kPi * t)};
}

void save_decomposition_report(const Decomposition& dec,
                               const std::string& json_path,
                               const std::string& residual_csv_path) {
    CsvWriter csv(residual_csv_path,
                  {"t", "residual_H1", "xi_dot_gap_L2", "xi_ddot_gap_dual"});
    for (std::size_t j = 0; j < dec.times.size(); ++j)
        csv.row({dec.times[j], dec.residual_h1[j], dec.xi_dot_gap_l2[j],
                 dec.xi_ddot_gap_dual[j]});

    nlohmann::json j;
    j["bad_modes"] = dec.eta_star.modes;
    nlohmann::json amps = nlohmann::json::object();
    for (std::size_t i = 0; i < dec.eta_star.modes.size(); ++i)
        amps[std::to_string(dec.eta_star.modes[i])] = {dec.eta_star.a[i],
                                                       dec.eta_star.b[i]};
    j["eta_star"] = amps;
    j["eta_star_t_ref"] = dec.eta_star.t_ref;
    j["eta_star_fit_residual"] = dec.eta_star.residual;
    j["phi_N0_coeff"] = dec.phi_n0_coeff;
    j["residual_csv_path"] = residual_csv_path;
    std::ofstream out(json_path);
    if (!out)
        throw InvalidArgument("save_decomposition_report: cannot write " +
                              json_path);
    out << j.dump(2) << "\n";
}

}  // namespace fsiwave
