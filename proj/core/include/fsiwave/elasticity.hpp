#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fsiwave/linalg.hpp"
#include "fsiwave/params.hpp"
#include "fsiwave/space.hpp"

namespace fsiwave {

/// Rigid motion y -> skew (y - centroid) + shift; the image of the
/// projection onto the kernel of the symmetrized gradient.
struct RigidMotion {
    Eigen::Matrix2d skew = Eigen::Matrix2d::Zero();
    Vec2 shift = Vec2::Zero();
    Vec2 centroid = Vec2::Zero();

    Vec2 eval(const Vec2& y) const { return skew * (y - centroid) + shift; }
};

/// Symmetric gradient eps(xi) = (grad xi + grad xi^T)/2 at one quadrature
/// point of a region cell. In 1d the (0,0) entry carries xi'.
Eigen::Matrix2d strain_at(const Field& xi, int region_cell,
                          const QuadPoint& q);

/// Sigma(xi) = 2*l1*eps(xi) + l2*div(xi)*Id at one quadrature point. In 1d
/// the (0,0) entry carries (2*l1+l2) xi'.
Eigen::Matrix2d stress_elastic_at(const Field& xi, const ElasticParams& params,
                                  int region_cell, const QuadPoint& q);

/// L2-orthogonal projection of f onto rigid motions: skew part of the
/// mean gradient around the domain centroid plus the mean value.
RigidMotion project_rigid(const Field& f);

/// Nodal interpolation of a rigid motion onto a space (exact: rigid
/// motions are affine).
Field rigid_field(SpacePtr space, const RigidMotion& r);

/// ||f - P_R f||_H1 / ||eps(f)||_L2; the Korn constants of the domain
/// bound this ratio from both sides over all non-rigid f.
/// Throws DegenerateInput when f is rigid to 1e-12.
double korn_gap(const Field& f);

/// Stationary Neumann-Lame solve: Div Sigma(phi) = 0 in the solid,
/// Sigma(phi) n = n on its boundary, pinned by P_R phi = 0 through
/// d(d+1)/2 multiplier constraints. defect is the relative boundary
/// residual ||Sigma(phi)n - n|| / ||n|| in L2 of the interface.
struct NeumannPhi {
    Field phi;
    double defect = 0;
};
NeumannPhi solve_neumann_phi(std::shared_ptr<const Mesh> mesh,
                             const ElasticParams& params);

/// Best scalar fit of the boundary traction onto the normal:
/// q_fit = argmin_q ||Sigma(psi)n - q n||_{L2(interface)}; badness is the
/// residual relative to ||Sigma(psi)n||. Scale invariant in psi.
struct TraceFit {
    double q_fit = 0;
    double badness = 0;
    double trace_norm = 0;
};
TraceFit fit_normal_trace(const Field& psi, const ElasticParams& params);

/// One Dirichlet eigenpair of the Lame operator with its overdetermined
/// diagnostics. neumann_trace samples Sigma(psi)n at interface facet
/// midpoints, ordered as the facets appear in the mesh.
struct EigenPair {
    double mu = 0;
    Field psi;
    std::vector<Vec2> neumann_trace;
    double q_fit = 0;
    double badness = 1;
};

/// The n smallest eigenpairs of -Div Sigma(psi) = mu psi in the solid
/// with zero boundary trace; L2-normalized, ascending.
std::vector<EigenPair> dirichlet_eigs(std::shared_ptr<const Mesh> mesh,
                                      const ElasticParams& params,
                                      int n_modes);

/// Verdict of the overdetermined-mode scan: a domain is Bad when some
/// eigenmode's traction is (nearly) a scalar multiple of the normal.
struct BadMode {
    int k = 0;  // 1-based mode index
    double mu = 0;
    double q_fit = 0;
    double badness = 1;
};
struct Classification {
    bool bad = false;
    std::vector<BadMode> offenders;
    std::vector<EigenPair> pairs;
};
Classification classify_domain(std::shared_ptr<const Mesh> mesh,
                               const ElasticParams& params, int n_modes,
                               double threshold);

/// CSV columns: k, mu, q_fit, badness.
void save_eigen_report(const std::vector<EigenPair>& pairs,
                       const std::string& path);

}  // namespace fsiwave
