#include "fsiwave/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

#include "fsiwave/io.hpp"

namespace fsiwave {

void ScenarioConfig::check() const {
    fluid.check();
    elastic.check();
    if (dt <= 0) throw InvalidArgument("ScenarioConfig: dt must be > 0");
    if (t_end < dt) throw InvalidArgument("ScenarioConfig: t_end >= dt");
    if (picard_tol <= 0 || picard_max < 1)
        throw InvalidArgument("ScenarioConfig: bad Picard settings");
    if (linear_tol <= 0)
        throw InvalidArgument("ScenarioConfig: linear_tol must be > 0");
    if (stride < 1) throw InvalidArgument("ScenarioConfig: stride >= 1");
}

struct Scenario::Cache {
    double dt = 0;
    bool valid = false;
    Eigen::SparseLU<SpMat> lu;
};

Scenario::Scenario(const ScenarioConfig& config)
    : Scenario(config, std::make_shared<Mesh>(build_mesh(config.domain))) {}

Scenario::Scenario(const ScenarioConfig& config,
                   std::shared_ptr<const Mesh> mesh)
    : config_(config),
      mesh_(std::move(mesh)),
      cm_(assemble_coupled(mesh_, config.fluid, config.elastic)),
      cache_(std::make_shared<Cache>()) {
    config_.check();
    K_solid_ = assemble_elastic_stiffness(*cm_.solid, config_.elastic);
    M_solid_ = assemble_mass(*cm_.solid);
    M_fluid_ = assemble_mass(*cm_.fluid);
    A_fluid_ =
        assemble_strain_stiffness(*cm_.fluid, 2 * config_.fluid.nu);
    M_vel_ = cm_.M_u + cm_.M_xi;
}

State Scenario::zero_state() const {
    State s;
    s.t = 0;
    s.u = make_field(cm_.fluid);
    s.p = make_field(cm_.pressure);
    s.xi = make_field(cm_.solid);
    s.xi_dot = make_field(cm_.solid);
    return s;
}

State Scenario::state_from(double t, const Eigen::VectorXd& w,
                           const Eigen::VectorXd& p,
                           const Eigen::VectorXd& xi) const {
    if (w.size() != cm_.velocity->n_dofs() ||
        p.size() != cm_.pressure->n_dofs() || xi.size() != cm_.solid->n_dofs())
        throw InvalidArgument("state_from: size mismatch");
    State s = zero_state();
    s.t = t;
    s.p.coeffs = p;
    s.xi.coeffs = xi;
    const int vc = cm_.velocity->components;
    for (int n = 0; n < cm_.fluid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            s.u.coeffs[cm_.fluid->dof(n, c)] =
                w[cm_.velocity->dof(cm_.fluid_to_velocity[n], c)];
    for (int n = 0; n < cm_.solid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            s.xi_dot.coeffs[cm_.solid->dof(n, c)] =
                w[cm_.velocity->dof(cm_.solid_to_velocity[n], c)];
    return s;
}

Eigen::VectorXd Scenario::pack_velocity(const Field& u,
                                        const Field& xi_dot) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(cm_.velocity->n_dofs());
    const int vc = cm_.velocity->components;
    for (int n = 0; n < cm_.fluid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            w[cm_.velocity->dof(cm_.fluid_to_velocity[n], c)] =
                u.coeffs[cm_.fluid->dof(n, c)];
    for (int n = 0; n < cm_.solid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            w[cm_.velocity->dof(cm_.solid_to_velocity[n], c)] =
                xi_dot.coeffs[cm_.solid->dof(n, c)];
    return w;
}

double Scenario::energy(const State& s) const {
    return s.u.coeffs.dot(M_fluid_ * s.u.coeffs) +
           s.xi_dot.coeffs.dot(M_solid_ * s.xi_dot.coeffs) +
           s.xi.coeffs.dot(K_solid_ * s.xi.coeffs);
}

double Scenario::dissipation(const State& s) const {
    // 4 nu ||eps(u)||^2 = 2 <A_nu u, u>
    return 2.0 * s.u.coeffs.dot(A_fluid_ * s.u.coeffs);
}

namespace {

SpMat restrict_cols(const SpMat& A, const DofSubset& cols) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int c = cols.full_to_sub[it.col()];
            if (c >= 0)
                trip.emplace_back(static_cast<int>(it.row()), c, it.value());
        }
    SpMat out(A.rows(), cols.n_sub());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

void append_block(std::vector<Eigen::Triplet<double>>& trip, const SpMat& A,
                  int row0, int col0, double scale) {
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            trip.emplace_back(row0 + static_cast<int>(it.row()),
                              col0 + static_cast<int>(it.col()),
                              scale * it.value());
}

}  // namespace

State Scenario::step(const State& s, double dt) const {
    if (dt == 0) throw InvalidArgument("step: dt must be nonzero");
    const int nf = cm_.free.n_sub();
    const int np = cm_.pressure->n_dofs();

    if (!cache_->valid || cache_->dt != dt) {
        // [ (2/dt) M + A_nu + (dt/2) K_Sigma   -B^T ]
        // [  B                                  0  ]
        SpMat A_blk = (2.0 / dt) * M_vel_ + cm_.A_nu + (dt / 2.0) * cm_.K_sigma;
        const SpMat A_ff = restrict_matrix(A_blk, cm_.free, cm_.free);
        const SpMat B_f = restrict_cols(cm_.B, cm_.free);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(A_ff.nonZeros() + 2 * B_f.nonZeros());
        append_block(trip, A_ff, 0, 0, 1.0);
        append_block(trip, B_f, nf, 0, 1.0);
        const SpMat BT = SpMat(B_f.transpose());
        append_block(trip, BT, 0, nf, -1.0);
        SpMat S(nf + np, nf + np);
        S.setFromTriplets(trip.begin(), trip.end());
        S.makeCompressed();
        cache_->lu.compute(S);
        if (cache_->lu.info() != Eigen::Success)
            throw SolveFailure("step: factorization of the midpoint system "
                               "failed");
        cache_->dt = dt;
        cache_->valid = true;
    }

    const Eigen::VectorXd w_n = pack_velocity(s.u, s.xi_dot);
    Eigen::VectorXd xi_vel = Eigen::VectorXd::Zero(cm_.velocity->n_dofs());
    const int vc = cm_.velocity->components;
    for (int n = 0; n < cm_.solid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            xi_vel[cm_.velocity->dof(cm_.solid_to_velocity[n], c)] =
                s.xi.coeffs[cm_.solid->dof(n, c)];

    const Eigen::VectorXd rhs0 =
        (2.0 / dt) * (M_vel_ * w_n) - cm_.K_sigma * xi_vel;

    const bool nonlinear = config_.convection && mesh_->dim == 2;
    Eigen::VectorXd w_mid = w_n;
    Eigen::VectorXd p_mid = Eigen::VectorXd::Zero(np);
    double rel_prev = std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        Eigen::VectorXd load = rhs0;
        if (nonlinear) {
            const Field wf{cm_.velocity, w_mid};
            load -= convection_load(wf, wf);
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + np);
        rhs.head(nf) = restrict_vector(load, cm_.free);
        const Eigen::VectorXd sol = cache_->lu.solve(rhs);
        const Eigen::VectorXd w_new =
            prolong_vector(sol.head(nf), cm_.free, cm_.velocity->n_dofs());
        p_mid = sol.tail(np);
        const double rel =
            (w_new - w_mid).norm() / (w_new.norm() + 1e-300);
        if (!w_new.allFinite())
            throw BlowUp("step: midpoint iterate is not finite at t = " +
                         format_double(s.t));
        w_mid = w_new;
        if (!nonlinear) break;
        if (iter > 0 && rel < config_.picard_tol) break;
        // stagnation at the rounding floor of the linear solve counts as
        // converged: the update is tiny and no longer contracting
        if (iter > 1 && rel < 1e4 * config_.picard_tol && rel > 0.5 * rel_prev)
            break;
        rel_prev = rel;
        if (iter >= config_.picard_max)
            throw PicardDivergence(
                "step: Picard iteration exceeded its cap with relative "
                "update " +
                format_double(rel));
    }

    const Eigen::VectorXd w_next = 2.0 * w_mid - w_n;
    Eigen::VectorXd xi_next = s.xi.coeffs;
    for (int n = 0; n < cm_.solid->n_nodes(); ++n)
        for (int c = 0; c < vc; ++c)
            xi_next[cm_.solid->dof(n, c)] +=
                dt * w_mid[cm_.velocity->dof(cm_.solid_to_velocity[n], c)];

    return state_from(s.t + dt, w_next, p_mid, xi_next);
}

namespace {

double convection_work(const State& s, bool enabled) {
    if (!enabled || s.u.space->mesh->dim != 2) return 0.0;
    return 2.0 * convection_load(s.u, s.u).dot(s.u.coeffs);
}

}  // namespace

Trajectory Scenario::run(const State& initial) const {
    config_.check();
    const double dt = config_.dt;
    const int steps =
        static_cast<int>(std::llround(config_.t_end / dt));
    if (steps < 1) throw InvalidArgument("run: t_end < dt");

    Trajectory traj;
    traj.config = config_;
    traj.states.push_back(initial);
    traj.state_steps.push_back(0);

    const double E0 = energy(initial);
    const double nu4 = 4.0 * config_.fluid.nu;
    const double margin_E = nu4 - config_.monitor_C_hat * std::sqrt(E0);

    auto make_record = [&](const State& st, double K, double residual) {
        DiagnosticsRecord r;
        r.t = st.t;
        r.E = energy(st);
        r.K = K;
        r.dissipation = dissipation(st);
        r.u_H1 = norm(st.u, NormKind::H1);
        if (st.p.space->n_dofs() > 0) {
            r.q = mean_pressure(st.p);
            Field centered = st.p;
            centered.coeffs.array() -= r.q;
            r.p_hat_L2 = norm(centered, NormKind::L2);
        }
        r.interface_flux = interface_normal_flux(st.xi_dot);
        r.energy_residual = residual;
        r.margin_E = margin_E;
        return r;
    };

    traj.diagnostics.records.push_back(make_record(initial, 0.0, 0.0));

    State cur = initial;
    double cum_dissipation = 0, cum_convection = 0;
    double d_prev = dissipation(initial);
    double c_prev = convection_work(initial, config_.convection);
    for (int i = 1; i <= steps; ++i) {
        State next = step(cur, dt);
        const double E = energy(next);
        if (E > 10.0 * E0 + 1e-8)
            throw BlowUp("run: energy " + format_double(E) + " exceeds 10 x "
                         "E(0) + 1e-8 at t = " + format_double(next.t));
        const double d = dissipation(next);
        const double c = convection_work(next, config_.convection);
        cum_dissipation += 0.5 * dt * (d_prev + d);
        cum_convection += 0.5 * dt * (c_prev + c);
        d_prev = d;
        c_prev = c;
        const double residual = E + cum_dissipation - E0 + cum_convection;

        const double Kv =
            (next.u.coeffs - cur.u.coeffs).dot(
                M_fluid_ * (next.u.coeffs - cur.u.coeffs)) /
                (dt * dt) +
            (next.xi_dot.coeffs - cur.xi_dot.coeffs)
                    .dot(M_solid_ * (next.xi_dot.coeffs - cur.xi_dot.coeffs)) /
                (dt * dt) +
            next.xi_dot.coeffs.dot(K_solid_ * next.xi_dot.coeffs);
        traj.diagnostics.records.push_back(make_record(next, Kv, residual));

        if (i % config_.stride == 0 || i == steps) {
            if (traj.state_steps.back() != i) {
                traj.states.push_back(next);
                traj.state_steps.push_back(i);
            }
        }
        cur = std::move(next);
    }

    // the K(0)-based margin needs the first available K estimate
    const double K0 = traj.diagnostics.records.size() > 1
                          ? traj.diagnostics.records[1].K
                          : 0.0;
    const double margin_K =
        nu4 - config_.monitor_C_tilde * std::sqrt(E0 + K0);
    for (auto& r : traj.diagnostics.records) r.margin_K = margin_K;
    return traj;
}

double energy_k(const Scenario& sc, const Trajectory& traj, int index) {
    if (index < 1 ||
        index >= static_cast<int>(traj.states.size()))
        throw InvalidArgument("energy_k: index must be >= 1 and stored");
    const State& a = traj.states[index - 1];
    const State& b = traj.states[index];
    const double dt =
        (traj.state_steps[index] - traj.state_steps[index - 1]) *
        traj.config.dt;
    Field du = b.u;
    du.coeffs = (b.u.coeffs - a.u.coeffs) / dt;
    Field dxi = b.xi_dot;
    dxi.coeffs = (b.xi_dot.coeffs - a.xi_dot.coeffs) / dt;
    const double elastic =
        b.xi_dot.coeffs.dot(sc.solid_stiffness() * b.xi_dot.coeffs);
    return norm(du, NormKind::L2) * norm(du, NormKind::L2) +
           norm(dxi, NormKind::L2) * norm(dxi, NormKind::L2) + elastic;
}

std::vector<double> energy_residual(const Scenario& sc,
                                    const Trajectory& traj) {
    if (traj.states.size() < 2)
        throw InvalidArgument("energy_residual: need >= 2 states");
    std::vector<double> out(traj.states.size(), 0.0);
    const double E0 = sc.energy(traj.states.front());
    double cum_d = 0, cum_c = 0;
    double d_prev = sc.dissipation(traj.states.front());
    double c_prev =
        convection_work(traj.states.front(), traj.config.convection);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double dt =
            (traj.state_steps[i] - traj.state_steps[i - 1]) * traj.config.dt;
        const double d = sc.dissipation(traj.states[i]);
        const double c =
            convection_work(traj.states[i], traj.config.convection);
        cum_d += 0.5 * dt * (d_prev + d);
        cum_c += 0.5 * dt * (c_prev + c);
        d_prev = d;
        c_prev = c;
        out[i] = sc.energy(traj.states[i]) + cum_d - E0 + cum_c;
    }
    return out;
}

SmallDataReport small_data_report(const Scenario& sc, const State& initial,
                                  const Field& u1, const Field& xi2) {
    SmallDataReport r;
    r.E0 = sc.energy(initial);
    const double nu1 = norm(u1, NormKind::L2);
    const double nxi2 = norm(xi2, NormKind::L2);
    r.K0 = nu1 * nu1 + nxi2 * nxi2 +
           initial.xi_dot.coeffs.dot(sc.solid_stiffness() *
                                     initial.xi_dot.coeffs);
    r.u0_H1 = norm(initial.u, NormKind::H1);
    const double nu4 = 4.0 * sc.config().fluid.nu;
    r.margin_E = nu4 - sc.config().monitor_C_hat * std::sqrt(r.E0);
    r.margin_K =
        nu4 - sc.config().monitor_C_tilde * std::sqrt(r.E0 + r.K0);
    r.small_regime = r.margin_E > 0 && r.margin_K > 0;
    return r;
}

void save_diagnostics_csv(const Diagnostics& diag, const std::string& path) {
    CsvWriter csv(path,
                  {"t", "E", "K", "dissipation", "u_H1", "q", "p_hat_L2",
                   "interface_flux", "energy_residual", "margin_E",
                   "margin_K"});
    for (const auto& r : diag.records)
        csv.row({r.t, r.E, r.K, r.dissipation, r.u_H1, r.q, r.p_hat_L2,
                 r.interface_flux, r.energy_residual, r.margin_E,
                 r.margin_K});
}

void save_trajectory_states(const Trajectory& traj,
                            const std::string& prefix) {
    char buf[32];
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%06d", traj.state_steps[i]);
        const std::string tag(buf);
        const State& s = traj.states[i];
        save_field_csv(s.u, prefix + "_u_" + tag + ".csv");
        if (s.p.space->n_dofs() > 0)
            save_field_csv(s.p, prefix + "_p_" + tag + ".csv");
        save_field_csv(s.xi, prefix + "_xi_" + tag + ".csv");
        save_field_csv(s.xi_dot, prefix + "_xi_dot_" + tag + ".csv");
    }
}

}  // namespace fsiwave
