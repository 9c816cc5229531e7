#include "fsiwave/elasticity.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "fsiwave/io.hpp"

namespace fsiwave {

namespace {

const std::vector<QuadPoint>& volume_rule(const FeSpace& space, int degree) {
    return space.mesh->dim == 1 ? segment_rule(3) : triangle_rule(degree);
}

}  // namespace

Eigen::Matrix2d strain_at(const Field& xi, int region_cell,
                          const QuadPoint& q) {
    const Eigen::MatrixXd g = eval_gradient(xi, region_cell, q);
    Eigen::Matrix2d full = Eigen::Matrix2d::Zero();
    full.topRows(g.rows()) = g;
    return 0.5 * (full + full.transpose());
}

Eigen::Matrix2d stress_elastic_at(const Field& xi, const ElasticParams& params,
                                  int region_cell, const QuadPoint& q) {
    const Eigen::Matrix2d e = strain_at(xi, region_cell, q);
    if (xi.space->components == 1) {
        Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
        s(0, 0) = (2 * params.lambda1 + params.lambda2) * e(0, 0);
        return s;
    }
    return 2 * params.lambda1 * e +
           params.lambda2 * e.trace() * Eigen::Matrix2d::Identity();
}

RigidMotion project_rigid(const Field& f) {
    const FeSpace& space = *f.space;
    const auto& rule = volume_rule(space, 2 * space.degree);
    double area = 0;
    Vec2 centroid = Vec2::Zero();
    Vec2 mean_f = Vec2::Zero();
    Eigen::Matrix2d mean_g = Eigen::Matrix2d::Zero();
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const double w = q.w * measure;
            const BasisEval b = basis_at(space, rc, q);
            Vec2 x = Vec2::Zero();
            for (int k = 0; k < b.nloc; ++k)
                x += b.N[k] * space.node_pos[nodes[k]];
            area += w;
            centroid += w * x;
            const Eigen::VectorXd v = eval_value(f, rc, q);
            const Eigen::MatrixXd g = eval_gradient(f, rc, q);
            for (int c = 0; c < space.components; ++c) {
                mean_f[c] += w * v[c];
                mean_g.row(c).head(2) += w * g.row(c);
            }
        }
    }
    if (area <= 0) throw DegenerateInput("project_rigid: empty region");
    centroid /= area;
    mean_f /= area;
    mean_g /= area;
    RigidMotion r;
    r.skew = 0.5 * (mean_g - mean_g.transpose());
    r.centroid = centroid;
    // mean of skew*(y - centroid) vanishes, so the shift is the mean value
    r.shift = mean_f;
    return r;
}

Field rigid_field(SpacePtr space, const RigidMotion& r) {
    Field f = make_field(space);
    for (int n = 0; n < space->n_nodes(); ++n) {
        const Vec2 v = r.eval(space->node_pos[n]);
        for (int c = 0; c < space->components; ++c)
            f.coeffs[space->dof(n, c)] = v[c];
    }
    return f;
}

namespace {

double strain_l2(const Field& f) {
    const FeSpace& space = *f.space;
    const auto& rule = volume_rule(space, 2 * (space.degree - 1));
    double acc = 0;
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        const double measure = space.mesh->cell_measure(space.cells[rc]);
        for (const auto& q : rule) {
            const Eigen::Matrix2d e = strain_at(f, rc, q);
            acc += q.w * measure * e.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

}  // namespace

double korn_gap(const Field& f) {
    const double eps_norm = strain_l2(f);
    const double scale = norm(f, NormKind::H1) + 1.0;
    if (eps_norm <= 1e-12 * scale)
        throw DegenerateInput("korn_gap: field is rigid to tolerance");
    const RigidMotion r = project_rigid(f);
    Field diff = rigid_field(f.space, r);
    diff.coeffs = f.coeffs - diff.coeffs;
    return norm(diff, NormKind::H1) / eps_norm;
}

namespace {

/// Quadrature samples of the interface traction against the normal:
/// accumulates the integrals needed for the q-fit and its residual.
struct TraceSamples {
    std::vector<double> weight;
    std::vector<Vec2> traction;
    std::vector<Vec2> normal;
};

TraceSamples sample_interface_traction(const Field& psi,
                                       const ElasticParams& params) {
    const FeSpace& space = *psi.space;
    const Mesh& mesh = *space.mesh;
    TraceSamples s;
    const auto& rule = segment_rule(3);
    for (int fi = 0; fi < static_cast<int>(mesh.facets.size()); ++fi) {
        const Facet& f = mesh.facets[fi];
        if (f.tag != FacetTag::Interface) continue;
        const int cell = f.solid_cell >= 0 ? f.solid_cell : f.fluid_cell;
        const int rc = region_cell_index(space, cell);
        if (rc < 0) continue;
        if (mesh.dim == 1) {
            const QuadPoint qp = facet_point_in_cell(mesh, f, cell, 0.0);
            const Eigen::Matrix2d sig =
                stress_elastic_at(psi, params, rc, qp);
            s.weight.push_back(1.0);
            s.traction.push_back(Vec2(sig(0, 0) * f.normal.x(), 0.0));
            s.normal.push_back(f.normal);
            continue;
        }
        const double len = mesh.facet_measure(fi);
        for (const auto& q : rule) {
            const QuadPoint qp = facet_point_in_cell(mesh, f, cell, q.l1);
            const Eigen::Matrix2d sig =
                stress_elastic_at(psi, params, rc, qp);
            s.weight.push_back(q.w * len);
            s.traction.push_back(sig * f.normal);
            s.normal.push_back(f.normal);
        }
    }
    return s;
}

}  // namespace

TraceFit fit_normal_trace(const Field& psi, const ElasticParams& params) {
    const TraceSamples s = sample_interface_traction(psi, params);
    if (s.weight.empty())
        throw DegenerateInput("fit_normal_trace: no interface facets");
    double tn = 0, nn = 0, tt = 0;
    for (std::size_t i = 0; i < s.weight.size(); ++i) {
        tn += s.weight[i] * s.traction[i].dot(s.normal[i]);
        nn += s.weight[i] * s.normal[i].squaredNorm();
        tt += s.weight[i] * s.traction[i].squaredNorm();
    }
    if (std::sqrt(tt) < 1e-14)
        throw DegenerateInput("fit_normal_trace: traction has no content");
    TraceFit fit;
    fit.q_fit = tn / nn;
    fit.trace_norm = std::sqrt(tt);
    double res = 0;
    for (std::size_t i = 0; i < s.weight.size(); ++i)
        res += s.weight[i] *
               (s.traction[i] - fit.q_fit * s.normal[i]).squaredNorm();
    fit.badness = std::sqrt(std::max(0.0, res)) / fit.trace_norm;
    return fit;
}

NeumannPhi solve_neumann_phi(std::shared_ptr<const Mesh> mesh,
                             const ElasticParams& params) {
    params.check();
    if (mesh->cells.empty())
        throw InvalidSpec("solve_neumann_phi: mesh has no cells");
    SpacePtr space = make_space(mesh, Family::VectorP2, Region::Solid);
    const int n = space->n_dofs();
    const int nc = space->components == 1 ? 1 : 3;

    const SpMat K = assemble_elastic_stiffness(*space, params);
    const Eigen::VectorXd load = assemble_interface_normal_load(*space);

    // constraint rows: mean value per component, plus the skew part of
    // the mean gradient (absent in 1d)
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nc, n);
    const auto& rule = volume_rule(*space, 2 * space->degree);
    for (int rc = 0; rc < static_cast<int>(space->cells.size()); ++rc) {
        const double measure = space->mesh->cell_measure(space->cells[rc]);
        const auto& nodes = space->cell_nodes[rc];
        for (const auto& q : rule) {
            const double w = q.w * measure;
            const BasisEval b = basis_at(*space, rc, q);
            for (int k = 0; k < b.nloc; ++k) {
                for (int c = 0; c < space->components; ++c)
                    C(c, space->dof(nodes[k], c)) += w * b.N[k];
                if (nc == 3) {
                    // d1 v2 - d2 v1
                    C(2, space->dof(nodes[k], 1)) += w * b.grad[k][0];
                    C(2, space->dof(nodes[k], 0)) -= w * b.grad[k][1];
                }
            }
        }
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(K.nonZeros() + 2 * nc * n);
    for (int k = 0; k < K.outerSize(); ++k)
        for (SpMat::InnerIterator it(K, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()),
                              static_cast<int>(it.col()), it.value());
    for (int r = 0; r < nc; ++r)
        for (int j = 0; j < n; ++j)
            if (C(r, j) != 0.0) {
                trip.emplace_back(n + r, j, C(r, j));
                trip.emplace_back(j, n + r, C(r, j));
            }
    SpMat A(n + nc, n + nc);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success)
        throw SolveFailure("solve_neumann_phi: saddle system singular");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + nc);
    rhs.head(n) = load;
    const Eigen::VectorXd sol = lu.solve(rhs);

    NeumannPhi out;
    out.phi = make_field(space);
    out.phi.coeffs = sol.head(n);

    // relative boundary residual ||Sigma(phi)n - n|| / ||n||
    const TraceSamples s = sample_interface_traction(out.phi, params);
    double res = 0, nn = 0;
    for (std::size_t i = 0; i < s.weight.size(); ++i) {
        res += s.weight[i] * (s.traction[i] - s.normal[i]).squaredNorm();
        nn += s.weight[i] * s.normal[i].squaredNorm();
    }
    out.defect = std::sqrt(std::max(0.0, res) / nn);
    return out;
}

std::vector<EigenPair> dirichlet_eigs(std::shared_ptr<const Mesh> mesh,
                                      const ElasticParams& params,
                                      int n_modes) {
    params.check();
    if (n_modes < 1) throw InvalidArgument("dirichlet_eigs: n_modes >= 1");
    SpacePtr space = make_space(mesh, Family::VectorP2, Region::Solid);

    std::vector<bool> keep(space->n_dofs(), false);
    for (int node = 0; node < space->n_nodes(); ++node) {
        if (space->node_on_interface[node] || space->node_on_outer[node])
            continue;
        for (int c = 0; c < space->components; ++c)
            keep[space->dof(node, c)] = true;
    }
    const DofSubset interior = make_subset(space->n_dofs(), keep);
    if (n_modes > interior.n_sub())
        throw InvalidArgument("dirichlet_eigs: n_modes exceeds interior dofs");

    const SpMat K = assemble_elastic_stiffness(*space, params);
    const SpMat M = assemble_mass(*space);
    const SpMat Ks = restrict_matrix(K, interior, interior);
    const SpMat Ms = restrict_matrix(M, interior, interior);
    const EigResult eig = smallest_generalized_eigs(Ks, Ms, n_modes);

    std::vector<EigenPair> pairs;
    pairs.reserve(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        EigenPair p;
        p.mu = eig.values[k];
        p.psi = make_field(space);
        p.psi.coeffs =
            prolong_vector(eig.vectors.col(k), interior, space->n_dofs());
        // deterministic sign: largest-magnitude coefficient positive
        int imax = 0;
        p.psi.coeffs.cwiseAbs().maxCoeff(&imax);
        if (p.psi.coeffs[imax] < 0) p.psi.coeffs = -p.psi.coeffs;

        const TraceFit fit = fit_normal_trace(p.psi, params);
        p.q_fit = fit.q_fit;
        p.badness = fit.badness;
        const Mesh& m = *space->mesh;
        for (int fi = 0; fi < static_cast<int>(m.facets.size()); ++fi) {
            const Facet& f = m.facets[fi];
            if (f.tag != FacetTag::Interface) continue;
            const int cell = f.solid_cell >= 0 ? f.solid_cell : f.fluid_cell;
            const int rc = region_cell_index(*space, cell);
            if (rc < 0) continue;
            const QuadPoint qp =
                facet_point_in_cell(m, f, cell, m.dim == 1 ? 0.0 : 0.5);
            const Eigen::Matrix2d sig =
                stress_elastic_at(p.psi, params, rc, qp);
            p.neumann_trace.push_back(
                m.dim == 1 ? Vec2(sig(0, 0) * f.normal.x(), 0.0)
                           : Vec2(sig * f.normal));
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

Classification classify_domain(std::shared_ptr<const Mesh> mesh,
                               const ElasticParams& params, int n_modes,
                               double threshold) {
    if (n_modes < 1) throw InvalidArgument("classify_domain: n_modes >= 1");
    if (!(threshold > 0 && threshold < 1))
        throw InvalidArgument("classify_domain: threshold must be in (0,1)");
    Classification out;
    out.pairs = dirichlet_eigs(mesh, params, n_modes);
    for (int k = 0; k < static_cast<int>(out.pairs.size()); ++k) {
        const EigenPair& p = out.pairs[k];
        if (p.badness < threshold)
            out.offenders.push_back({k + 1, p.mu, p.q_fit, p.badness});
    }
    out.bad = !out.offenders.empty();
    return out;
}

void save_eigen_report(const std::vector<EigenPair>& pairs,
                       const std::string& path) {
    CsvWriter csv(path, {"k", "mu", "q_fit", "badness"});
    for (int k = 0; k < static_cast<int>(pairs.size()); ++k)
        csv.row({static_cast<double>(k + 1), pairs[k].mu, pairs[k].q_fit,
                 pairs[k].badness});
}

}  // namespace fsiwave
