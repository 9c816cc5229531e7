#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fsiwave/fluid.hpp"
#include "fsiwave/mesh.hpp"
#include "fsiwave/params.hpp"

namespace fsiwave {

/// Snapshot of the coupled unknowns. u and xi_dot share their interface
/// dofs by construction (both are slices of one whole-mesh velocity
/// vector), so the interface condition u = d/dt xi holds exactly.
struct State {
    double t = 0;
    Field u;       // fluid velocity
    Field p;       // fluid pressure (midpoint value of the producing step)
    Field xi;      // structure displacement
    Field xi_dot;  // structure velocity
};

struct ScenarioConfig {
    DomainSpec domain;
    FluidParams fluid;
    ElasticParams elastic;
    double dt = 1e-2;
    double t_end = 1.0;
    double picard_tol = 1e-10;
    int picard_max = 50;
    double monitor_C_hat = 1.0;    // stand-in for the convection constant
    double monitor_C_tilde = 1.0;  // stand-in for the small-data constant
    double linear_tol = 1e-12;
    int stride = 1;           // state recording interval, in steps
    bool convection = true;   // false: linearized scheme (time reversible)

    void check() const;
};

struct DiagnosticsRecord {
    double t = 0;
    double E = 0;                // ||u||^2 + ||xi_dot||^2 + int Sigma:eps
    double K = 0;                // backward-difference higher-order energy
    double dissipation = 0;      // 4 nu ||eps(u)||^2
    double u_H1 = 0;
    double q = 0;                // mean pressure
    double p_hat_L2 = 0;         // ||p - q||
    double interface_flux = 0;   // int xi_dot . n over the interface
    double energy_residual = 0;  // defect of the trapezoidal energy identity
    double margin_E = 0;         // 4 nu - C_hat sqrt(E(0))
    double margin_K = 0;         // 4 nu - C_tilde sqrt(E(0)+K(0))
};

struct Diagnostics {
    std::vector<DiagnosticsRecord> records;
};

struct Trajectory {
    std::vector<State> states;  // every `stride` steps, plus the last
    std::vector<int> state_steps;
    Diagnostics diagnostics;
    ScenarioConfig config;

    double store_dt() const { return config.dt * config.stride; }
};

/// One prepared problem: mesh, spaces, operator blocks, and a cached
/// factorization of the midpoint system matrix (re-factored only when the
/// step size changes).
class Scenario {
  public:
    explicit Scenario(const ScenarioConfig& config);
    Scenario(const ScenarioConfig& config, std::shared_ptr<const Mesh> mesh);

    const ScenarioConfig& config() const { return config_; }
    std::shared_ptr<const Mesh> mesh() const { return mesh_; }
    const CoupledMatrices& matrices() const { return cm_; }

    State zero_state() const;
    /// Assembles a state from a whole-mesh velocity vector, pressure
    /// coefficients, and displacement coefficients.
    State state_from(double t, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& p,
                     const Eigen::VectorXd& xi) const;
    /// Merges separate fluid/solid velocity fields into the whole-mesh
    /// vector (solid values win on the shared interface dofs).
    Eigen::VectorXd pack_velocity(const Field& u, const Field& xi_dot) const;

    double energy(const State& s) const;
    double dissipation(const State& s) const;

    State step(const State& s) const { return step(s, config_.dt); }
    State step(const State& s, double dt) const;
    Trajectory run(const State& initial) const;

    const SpMat& solid_stiffness() const { return K_solid_; }
    const SpMat& solid_mass() const { return M_solid_; }

  private:
    ScenarioConfig config_;
    std::shared_ptr<const Mesh> mesh_;
    CoupledMatrices cm_;
    SpMat K_solid_;  // elastic stiffness on the solid displacement space
    SpMat M_solid_;
    SpMat M_fluid_;  // mass on the fluid velocity space
    SpMat A_fluid_;  // 2 nu eps:eps on the fluid velocity space
    SpMat M_vel_;    // M_u + M_xi
    struct Cache;
    std::shared_ptr<Cache> cache_;  // factorization keyed by dt
};

/// K at a stored state by backward differences of the trajectory;
/// index >= 1.
double energy_k(const Scenario& sc, const Trajectory& traj, int index);

/// Per-stored-state residual of E(t) + int 4 nu ||eps(u)||^2 - E(0)
/// + 2 int (u.grad)u.u with trapezoidal time quadrature.
std::vector<double> energy_residual(const Scenario& sc,
                                    const Trajectory& traj);

struct SmallDataReport {
    double E0 = 0;
    double K0 = 0;
    double u0_H1 = 0;
    double margin_E = 0;
    double margin_K = 0;
    bool small_regime = false;  // both margins positive
};
/// K(0) uses the supplied time derivatives u1 = du/dt(0), xi2 = d2xi/dt2(0)
/// rather than differences.
SmallDataReport small_data_report(const Scenario& sc, const State& initial,
                                  const Field& u1, const Field& xi2);

void save_diagnostics_csv(const Diagnostics& diag, const std::string& path);
/// One field CSV per stored state and unknown, named
/// <prefix>_{u,p,xi,xi_dot}_<step>.csv.
void save_trajectory_states(const Trajectory& traj,
                            const std::string& prefix);

}  // namespace fsiwave
