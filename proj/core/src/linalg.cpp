#include "fsiwave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fsiwave {

namespace {

bool cell_selected(const FeSpace& space, int region_cell,
                   const std::optional<CellTag>& only) {
    if (!only) return true;
    return space.mesh->cell_tag[space.cells[region_cell]] == *only;
}

const std::vector<QuadPoint>& volume_rule(const FeSpace& space, int degree) {
    return space.mesh->dim == 1 ? segment_rule(3) : triangle_rule(degree);
}

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat build(const FeSpace& space, Triplets& trip) {
    SpMat A(space.n_dofs(), space.n_dofs());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

}  // namespace

SpMat assemble_mass(const FeSpace& space, std::optional<CellTag> only) {
    Triplets trip;
    const auto& rule = volume_rule(space, 2 * space.degree);
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        if (!cell_selected(space, rc, only)) continue;
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const BasisEval b = basis_at(space, rc, q);
            const double w = q.w * measure;
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k) {
                    const double m = w * b.N[j] * b.N[k];
                    for (int c = 0; c < space.components; ++c)
                        trip.emplace_back(space.dof(nodes[j], c),
                                          space.dof(nodes[k], c), m);
                }
        }
    }
    return build(space, trip);
}

SpMat assemble_strain_stiffness(const FeSpace& space, double factor,
                                std::optional<CellTag> only) {
    Triplets trip;
    const auto& rule = volume_rule(space, 2 * (space.degree - 1));
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        if (!cell_selected(space, rc, only)) continue;
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const BasisEval b = basis_at(space, rc, q);
            const double w = q.w * measure;
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k) {
                    if (space.components == 1) {
                        trip.emplace_back(nodes[j], nodes[k],
                                          factor * w *
                                              b.grad[j].dot(b.grad[k]));
                        continue;
                    }
                    const double gdot = b.grad[j].dot(b.grad[k]);
                    for (int a = 0; a < 2; ++a)
                        for (int bb = 0; bb < 2; ++bb) {
                            // eps(phi e_a) : eps(psi e_b)
                            double e = 0.5 * (b.grad[j][bb] * b.grad[k][a]);
                            if (a == bb) e += 0.5 * gdot;
                            trip.emplace_back(space.dof(nodes[j], a),
                                              space.dof(nodes[k], bb),
                                              factor * w * e);
                        }
                }
        }
    }
    return build(space, trip);
}

SpMat assemble_gradient_stiffness(const FeSpace& space,
                                  std::optional<CellTag> only) {
    Triplets trip;
    const auto& rule = volume_rule(space, 2 * (space.degree - 1));
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        if (!cell_selected(space, rc, only)) continue;
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const BasisEval b = basis_at(space, rc, q);
            const double w = q.w * measure;
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k) {
                    const double g = w * b.grad[j].dot(b.grad[k]);
                    for (int c = 0; c < space.components; ++c)
                        trip.emplace_back(space.dof(nodes[j], c),
                                          space.dof(nodes[k], c), g);
                }
        }
    }
    return build(space, trip);
}

SpMat assemble_elastic_stiffness(const FeSpace& space,
                                 const ElasticParams& params,
                                 std::optional<CellTag> only) {
    const double l1 = params.lambda1, l2 = params.lambda2;
    if (space.components == 1)
        return assemble_strain_stiffness(space, 2 * l1 + l2, only);
    Triplets trip;
    const auto& rule = volume_rule(space, 2 * (space.degree - 1));
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        if (!cell_selected(space, rc, only)) continue;
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const BasisEval b = basis_at(space, rc, q);
            const double w = q.w * measure;
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k) {
                    const double gdot = b.grad[j].dot(b.grad[k]);
                    for (int a = 0; a < 2; ++a)
                        for (int bb = 0; bb < 2; ++bb) {
                            double e = 0.5 * (b.grad[j][bb] * b.grad[k][a]);
                            if (a == bb) e += 0.5 * gdot;
                            const double v =
                                2 * l1 * e +
                                l2 * b.grad[j][a] * b.grad[k][bb];
                            trip.emplace_back(space.dof(nodes[j], a),
                                              space.dof(nodes[k], bb), w * v);
                        }
                }
        }
    }
    return build(space, trip);
}

namespace {

/// Visits each facet of the tag with the cell owning it in this space.
template <class F>
void for_tagged_facets(const FeSpace& space, FacetTag tag, F&& fn) {
    const Mesh& mesh = *space.mesh;
    for (int fi = 0; fi < static_cast<int>(mesh.facets.size()); ++fi) {
        const Facet& f = mesh.facets[fi];
        if (f.tag != tag) continue;
        int cell = space.region == Region::Fluid ? f.fluid_cell : f.solid_cell;
        if (cell < 0) cell = f.solid_cell >= 0 ? f.solid_cell : f.fluid_cell;
        const int rc = region_cell_index(space, cell);
        if (rc < 0) continue;
        fn(fi, f, cell, rc);
    }
}

}  // namespace

SpMat assemble_facet_mass(const FeSpace& space, FacetTag tag) {
    Triplets trip;
    const auto& rule = segment_rule(3);
    for_tagged_facets(space, tag, [&](int fi, const Facet& f, int cell,
                                      int rc) {
        const auto& nodes = space.cell_nodes[rc];
        if (space.mesh->dim == 1) {
            const QuadPoint qp =
                facet_point_in_cell(*space.mesh, f, cell, 0.0);
            const BasisEval b = basis_at(space, rc, qp);
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k)
                    trip.emplace_back(nodes[j], nodes[k], b.N[j] * b.N[k]);
            return;
        }
        const double len = space.mesh->facet_measure(fi);
        for (const auto& q : rule) {
            const QuadPoint qp =
                facet_point_in_cell(*space.mesh, f, cell, q.l1);
            const BasisEval b = basis_at(space, rc, qp);
            const double w = q.w * len;
            for (int j = 0; j < b.nloc; ++j)
                for (int k = 0; k < b.nloc; ++k) {
                    const double m = w * b.N[j] * b.N[k];
                    if (std::abs(m) < 1e-300) continue;
                    for (int c = 0; c < space.components; ++c)
                        trip.emplace_back(space.dof(nodes[j], c),
                                          space.dof(nodes[k], c), m);
                }
        }
    });
    return build(space, trip);
}

SpMat assemble_interface_mass(const FeSpace& space) {
    return assemble_facet_mass(space, FacetTag::Interface);
}

Eigen::VectorXd assemble_interface_normal_load(const FeSpace& space) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(space.n_dofs());
    const auto& rule = segment_rule(3);
    for_tagged_facets(space, FacetTag::Interface,
                      [&](int fi, const Facet& f, int cell, int rc) {
        const auto& nodes = space.cell_nodes[rc];
        if (space.mesh->dim == 1) {
            const QuadPoint qp =
                facet_point_in_cell(*space.mesh, f, cell, 0.0);
            const BasisEval b = basis_at(space, rc, qp);
            for (int j = 0; j < b.nloc; ++j)
                load[space.dof(nodes[j], 0)] += b.N[j] * f.normal.x();
            return;
        }
        const double len = space.mesh->facet_measure(fi);
        for (const auto& q : rule) {
            const QuadPoint qp =
                facet_point_in_cell(*space.mesh, f, cell, q.l1);
            const BasisEval b = basis_at(space, rc, qp);
            const double w = q.w * len;
            for (int j = 0; j < b.nloc; ++j)
                for (int c = 0; c < space.components; ++c)
                    load[space.dof(nodes[j], c)] += w * b.N[j] * f.normal[c];
        }
    });
    return load;
}

std::vector<int> interface_dof_list(const FeSpace& space) {
    std::vector<int> dofs;
    for (int n = 0; n < space.n_nodes(); ++n)
        if (space.node_on_interface[n])
            for (int c = 0; c < space.components; ++c)
                dofs.push_back(space.dof(n, c));
    return dofs;
}

std::vector<int> outer_dof_list(const FeSpace& space) {
    std::vector<int> dofs;
    for (int n = 0; n < space.n_nodes(); ++n)
        if (space.node_on_outer[n])
            for (int c = 0; c < space.components; ++c)
                dofs.push_back(space.dof(n, c));
    return dofs;
}

DofSubset make_subset(int n_full, const std::vector<bool>& keep) {
    DofSubset s;
    s.full_to_sub.assign(n_full, -1);
    for (int i = 0; i < n_full; ++i)
        if (keep[i]) {
            s.full_to_sub[i] = static_cast<int>(s.sub_to_full.size());
            s.sub_to_full.push_back(i);
        }
    return s;
}

SpMat restrict_matrix(const SpMat& A, const DofSubset& rows,
                      const DofSubset& cols) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = rows.full_to_sub[it.row()];
            const int c = cols.full_to_sub[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    SpMat out(rows.n_sub(), cols.n_sub());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v,
                                const DofSubset& sub) {
    Eigen::VectorXd out(sub.n_sub());
    for (int i = 0; i < sub.n_sub(); ++i) out[i] = v[sub.sub_to_full[i]];
    return out;
}

Eigen::VectorXd prolong_vector(const Eigen::VectorXd& v, const DofSubset& sub,
                               int n_full) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_full);
    for (int i = 0; i < sub.n_sub(); ++i) out[sub.sub_to_full[i]] = v[i];
    return out;
}

DualNorm::DualNorm(const SpMat& A)
    : solver_(std::make_shared<Eigen::SimplicialLDLT<SpMat>>()) {
    solver_->compute(A);
    if (solver_->info() != Eigen::Success)
        throw SolveFailure("DualNorm: factorization failed");
}

double DualNorm::operator()(const Eigen::VectorXd& functional) const {
    const Eigen::VectorXd x = solver_->solve(functional);
    const double v = functional.dot(x);
    return std::sqrt(std::max(0.0, v));
}

namespace {

EigResult dense_generalized_eigs(const SpMat& K, const SpMat& M, int n_modes) {
    Eigen::MatrixXd Kd = Eigen::MatrixXd(K);
    Eigen::MatrixXd Md = Eigen::MatrixXd(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
    if (es.info() != Eigen::Success)
        throw SolveFailure("dense generalized eigensolver failed");
    EigResult out;
    out.values = es.eigenvalues().head(n_modes);
    out.vectors = es.eigenvectors().leftCols(n_modes);
    return out;
}

EigResult subspace_iteration_eigs(const SpMat& K, const SpMat& M,
                                  int n_modes) {
    const int n = static_cast<int>(K.rows());
    const int m = std::min(n, 2 * n_modes + 10);
    Eigen::SimplicialLDLT<SpMat> kfact(K);
    if (kfact.info() != Eigen::Success)
        throw SolveFailure("eigensolver: stiffness factorization failed");

    std::mt19937 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    const int max_iter = 2000;
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::MatrixXd Y = kfact.solve(M * X);
        // M-orthonormalize
        Eigen::MatrixXd G = Y.transpose() * (M * Y);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success)
            throw SolveFailure("eigensolver: subspace rank collapse");
        Eigen::MatrixXd U = llt.matrixU();
        Eigen::MatrixXd Q =
            U.transpose()
                .triangularView<Eigen::Lower>()
                .solve(Y.transpose())
                .transpose();
        // Rayleigh-Ritz
        Eigen::MatrixXd A = Q.transpose() * (K * Q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        X = Q * es.eigenvectors();
        const Eigen::VectorXd theta_new = es.eigenvalues();

        bool values_settled = true;
        for (int k = 0; k < n_modes; ++k)
            if (std::abs(theta_new[k] - theta[k]) >
                1e-12 * std::max(1.0, std::abs(theta_new[k])))
                values_settled = false;
        theta = theta_new;
        if (!values_settled || iter < 3) continue;

        // residual check in the K^{-1} dual norm
        double worst = 0.0;
        for (int k = 0; k < n_modes; ++k) {
            Eigen::VectorXd r = K * X.col(k) - theta[k] * (M * X.col(k));
            const double dual = std::sqrt(
                std::max(0.0, r.dot(kfact.solve(r))));
            worst = std::max(worst, dual / (1.0 + theta[k]));
        }
        if (worst <= 1e-9) break;
        if (iter == max_iter - 1)
            throw SolveFailure("eigensolver: subspace iteration stalled");
    }
    EigResult out;
    out.values = theta.head(n_modes);
    out.vectors = X.leftCols(n_modes);
    return out;
}

}  // namespace

EigResult smallest_generalized_eigs(const SpMat& K, const SpMat& M,
                                    int n_modes) {
    if (n_modes < 1)
        throw InvalidArgument("smallest_generalized_eigs: n_modes >= 1");
    if (n_modes > K.rows())
        throw InvalidArgument(
            "smallest_generalized_eigs: n_modes exceeds dof count");
    if (K.rows() <= 3000) return dense_generalized_eigs(K, M, n_modes);
    return subspace_iteration_eigs(K, M, n_modes);
}

}  // namespace fsiwave
