#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <vector>

#include "fsiwave/params.hpp"
#include "fsiwave/space.hpp"

namespace fsiwave {

using SpMat = Eigen::SparseMatrix<double>;

/// Mass matrix int u . v. `only` restricts assembly to cells of one tag
/// (useful when the space spans the whole mesh).
SpMat assemble_mass(const FeSpace& space, std::optional<CellTag> only = {});

/// factor * int eps(u) : eps(v) over vector spaces (factor = 2*nu gives
/// the viscous form). For scalar spaces this degenerates to factor *
/// int grad u . grad v.
SpMat assemble_strain_stiffness(const FeSpace& space, double factor,
                                std::optional<CellTag> only = {});

/// int grad u : grad v (full gradient, used for H1 dual norms).
SpMat assemble_gradient_stiffness(const FeSpace& space,
                                  std::optional<CellTag> only = {});

/// int Sigma(u) : eps(v), Sigma = 2*l1*eps + l2*div*Id. In 1d this is
/// (2*l1+l2) int u' v'.
SpMat assemble_elastic_stiffness(const FeSpace& space,
                                 const ElasticParams& params,
                                 std::optional<CellTag> only = {});

/// Boundary mass over the facets of one tag: int u . v ds.
SpMat assemble_facet_mass(const FeSpace& space, FacetTag tag);

/// Boundary mass over interface facets: int_{interface} u . v ds.
SpMat assemble_interface_mass(const FeSpace& space);

/// Load vector v -> int_{interface} v . n ds (n solid-outward).
Eigen::VectorXd assemble_interface_normal_load(const FeSpace& space);

/// Dof index sets by node flags.
std::vector<int> interface_dof_list(const FeSpace& space);
std::vector<int> outer_dof_list(const FeSpace& space);

/// Index reduction between a full dof set and a kept subset.
struct DofSubset {
    std::vector<int> full_to_sub;  // -1 where dropped
    std::vector<int> sub_to_full;

    int n_sub() const { return static_cast<int>(sub_to_full.size()); }
};
DofSubset make_subset(int n_full, const std::vector<bool>& keep);

SpMat restrict_matrix(const SpMat& A, const DofSubset& rows,
                      const DofSubset& cols);
Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v,
                                const DofSubset& sub);
Eigen::VectorXd prolong_vector(const Eigen::VectorXd& v, const DofSubset& sub,
                               int n_full);

/// sqrt(f^T A^{-1} f) for an SPD A; used as a discrete dual norm.
class DualNorm {
  public:
    explicit DualNorm(const SpMat& A);
    double operator()(const Eigen::VectorXd& functional) const;

  private:
    std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> solver_;
};

/// Smallest n eigenpairs of K x = mu M x with K, M symmetric and K
/// positive definite. Dense solve up to 3000 dofs, shift-invert subspace
/// iteration with deflation above. Modes are returned M-orthonormal,
/// eigenvalues ascending.
struct EigResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
EigResult smallest_generalized_eigs(const SpMat& K, const SpMat& M,
                                    int n_modes);

}  // namespace fsiwave
