#pragma once

#include <string>

#include "fsiwave/linalg.hpp"
#include "fsiwave/params.hpp"
#include "fsiwave/space.hpp"

namespace fsiwave {

/// sigma(u,p) = 2*nu*eps(u) - p*Id at one quadrature point of a mesh
/// cell. u and p may live on different spaces over the same mesh.
Eigen::Matrix2d stress_fluid_at(const Field& u, const Field& p,
                                const FluidParams& params, int mesh_cell,
                                const QuadPoint& q);

/// Monolithic operator blocks over the composite unknown. The velocity
/// space spans the whole mesh (fluid velocity on fluid cells, structure
/// velocity on solid cells) so the interface trace identification u = d/dt xi
/// is conformity, not a constraint. Outer-boundary dofs are listed in
/// `free` for elimination.
struct CoupledMatrices {
    SpacePtr velocity;  // vector P2, whole mesh
    SpacePtr pressure;  // scalar P1, fluid cells
    SpacePtr solid;     // vector P2, solid cells (displacement)

    std::vector<int> solid_to_velocity;  // node map, always valid
    std::vector<int> fluid_to_velocity;  // node map from the fluid trace space
    SpacePtr fluid;                      // vector P2, fluid cells

    SpMat M_u;      // velocity mass, fluid cells
    SpMat A_nu;     // 2*nu int eps(u):eps(v), fluid cells
    SpMat M_xi;     // velocity mass, solid cells
    SpMat K_sigma;  // int Sigma(xi):eps(v), solid cells (velocity indexing)
    SpMat B;        // pressure x velocity, (q, v) -> int_F q div v

    DofSubset free;  // velocity dofs minus outer boundary (and minus the
                     // interface when no fluid cell backs it, as in 1d)
};

CoupledMatrices assemble_coupled(std::shared_ptr<const Mesh> mesh,
                                 const FluidParams& fluid,
                                 const ElasticParams& elastic);

/// (q, v) -> int_F q div v over the fluid cells shared by both spaces.
SpMat assemble_divergence(const FeSpace& pressure, const FeSpace& velocity);

/// Discrete load v -> int_F (u . grad) w . v over the fluid cells of
/// u's space; returned in u-space dof indexing.
Eigen::VectorXd convection_load(const Field& u, const Field& w);

/// Mean of p over the fluid region.
double mean_pressure(const Field& p);

/// Coordinate-format text export: one "row col value" line per entry.
void save_matrix_coordinate(const SpMat& A, const std::string& path);

}  // namespace fsiwave
