#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fsiwave/fluid.hpp"
#include "fsiwave/params.hpp"

namespace fsiwave {

/// The six fields a well-posed start of the coupled system needs:
/// velocity/pressure plus their first time derivatives' elastic
/// counterparts. All constructed to satisfy the compatibility conditions
/// at the discrete level.
struct InitialData {
    Field u0;   // fluid velocity
    Field u1;   // du/dt(0), divergence free, vanishing on the boundary
    Field p0;   // fluid pressure
    Field xi0;  // structure displacement
    Field xi1;  // d xi/dt(0), trace-matched to u0
    Field xi2;  // d2 xi/dt2(0) = Div Sigma(xi0)
};

/// Seed closures for the constructive steps; null closures mean zero.
/// `amplitude` scales u1_spec and xi2_spec uniformly.
struct CompatibleSeed {
    std::function<Eigen::VectorXd(const Vec2&)> u1_spec;
    std::function<Eigen::VectorXd(const Vec2&)> xi2_spec;
    std::function<Eigen::VectorXd(const Vec2&)> boundary_g;  // xi0 trace
    double amplitude = 1.0;
};

/// Stepwise construction: 1) project the u1 seed onto the discretely
/// divergence-free subspace with zero trace; 2) interpolate xi2;
/// 3) solve Div Sigma(xi0) = xi2 with Dirichlet trace g; 4) solve the
/// stationary Stokes problem with load -u1 - (u0.grad)u0 and the discrete
/// solid Neumann functional of xi0 as interface data (Picard on the
/// convection term); 5) extend u0's interface trace into the solid with
/// minimal elastic energy to get xi1.
InitialData construct_compatible(std::shared_ptr<const Mesh> mesh,
                                 const FluidParams& fluid,
                                 const ElasticParams& elastic,
                                 const CompatibleSeed& seed);

/// The eight compatibility residuals, each in its natural discrete norm:
/// dual norms for the two momentum lines, inverse-boundary-mass dual norm
/// for the interface stress, L2 for divergences and traces.
struct CompatibilityReport {
    double momentum = 0;            // u1 + (u0.grad)u0 - Div sigma(u0,p0)
    double div_u0 = 0;
    double div_u1 = 0;
    double interface_stress = 0;    // sigma(u0,p0)n - Sigma(xi0)n
    double interface_velocity = 0;  // u0 - xi1 on the interface
    double outer_u0 = 0;
    double outer_u1 = 0;
    double elastic_accel = 0;       // xi2 - Div Sigma(xi0)

    double max() const;
};

CompatibilityReport check_compatibility(const InitialData& data,
                                        std::shared_ptr<const Mesh> mesh,
                                        const FluidParams& fluid,
                                        const ElasticParams& elastic);

/// Field CSVs plus a manifest JSON naming the scenario and the residual
/// report. `dir` must exist.
void save_initial_data(const InitialData& data,
                       const CompatibilityReport& report,
                       const std::string& dir,
                       const std::string& scenario_name);
/// Throws MissingArtifacts when any file of the set is absent.
InitialData load_initial_data(std::shared_ptr<const Mesh> mesh,
                              const std::string& dir);

}  // namespace fsiwave
