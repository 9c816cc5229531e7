#include "fsiwave/fluid.hpp"

#include <cmath>
#include <fstream>

#include "fsiwave/elasticity.hpp"
#include "fsiwave/io.hpp"

namespace fsiwave {

Eigen::Matrix2d stress_fluid_at(const Field& u, const Field& p,
                                const FluidParams& params, int mesh_cell,
                                const QuadPoint& q) {
    const int rc_u = region_cell_index(*u.space, mesh_cell);
    const int rc_p = region_cell_index(*p.space, mesh_cell);
    if (rc_u < 0 || rc_p < 0)
        throw InvalidArgument("stress_fluid_at: cell outside field region");
    const Eigen::Matrix2d eps = strain_at(u, rc_u, q);
    const double pv = eval_value(p, rc_p, q)[0];
    return 2 * params.nu * eps - pv * Eigen::Matrix2d::Identity();
}

CoupledMatrices assemble_coupled(std::shared_ptr<const Mesh> mesh,
                                 const FluidParams& fluid,
                                 const ElasticParams& elastic) {
    fluid.check();
    elastic.check();
    bool has_fluid = false, has_solid = false;
    for (const CellTag t : mesh->cell_tag) {
        has_fluid |= t == CellTag::Fluid;
        has_solid |= t == CellTag::Solid;
    }
    if (!has_solid)
        throw AssemblyFailure("assemble_coupled: no solid subdomain");
    if (mesh->dim == 2) {
        if (!has_fluid)
            throw AssemblyFailure("assemble_coupled: no fluid subdomain");
        for (const Facet& f : mesh->facets)
            if (f.tag == FacetTag::Interface &&
                (f.fluid_cell < 0 || f.solid_cell < 0))
                throw AssemblyFailure(
                    "assemble_coupled: interface facet lacks a cell on one "
                    "side (non-conforming)");
    }

    CoupledMatrices cm;
    cm.velocity = make_space(mesh, Family::VectorP2, Region::Whole);
    cm.pressure = make_space(mesh, Family::ScalarP1, Region::Fluid);
    cm.solid = make_space(mesh, Family::VectorP2, Region::Solid);
    cm.fluid = make_space(mesh, Family::VectorP2, Region::Fluid);
    cm.solid_to_velocity = map_nodes(*cm.solid, *cm.velocity);
    cm.fluid_to_velocity = map_nodes(*cm.fluid, *cm.velocity);

    cm.M_u = assemble_mass(*cm.velocity, CellTag::Fluid);
    cm.A_nu =
        assemble_strain_stiffness(*cm.velocity, 2 * fluid.nu, CellTag::Fluid);
    cm.M_xi = assemble_mass(*cm.velocity, CellTag::Solid);
    cm.K_sigma =
        assemble_elastic_stiffness(*cm.velocity, elastic, CellTag::Solid);

    cm.B = assemble_divergence(*cm.pressure, *cm.velocity);

    const FeSpace& V = *cm.velocity;
    std::vector<bool> keep(V.n_dofs(), false);
    for (int node = 0; node < V.n_nodes(); ++node) {
        if (V.node_on_outer[node]) continue;
        if (V.node_on_interface[node] && !has_fluid) continue;
        for (int c = 0; c < V.components; ++c)
            keep[V.dof(node, c)] = true;
    }
    cm.free = make_subset(V.n_dofs(), keep);
    return cm;
}

SpMat assemble_divergence(const FeSpace& pressure, const FeSpace& velocity) {
    const Mesh& mesh = *pressure.mesh;
    std::vector<Eigen::Triplet<double>> trip;
    const auto& rule = triangle_rule(pressure.degree + velocity.degree - 1);
    for (int rc = 0; rc < static_cast<int>(pressure.cells.size()); ++rc) {
        const int cell = pressure.cells[rc];
        if (mesh.cell_tag[cell] != CellTag::Fluid) continue;
        const int rcv = region_cell_index(velocity, cell);
        if (rcv < 0)
            throw AssemblyFailure(
                "assemble_divergence: velocity space misses a fluid cell");
        const double measure = mesh.cell_measure(cell);
        const auto& pnodes = pressure.cell_nodes[rc];
        const auto& vnodes = velocity.cell_nodes[rcv];
        for (const auto& q : rule) {
            const BasisEval bq = basis_at(pressure, rc, q);
            const BasisEval bv = basis_at(velocity, rcv, q);
            const double w = q.w * measure;
            for (int i = 0; i < bq.nloc; ++i)
                for (int k = 0; k < bv.nloc; ++k)
                    for (int c = 0; c < velocity.components; ++c)
                        trip.emplace_back(
                            pnodes[i], velocity.dof(vnodes[k], c),
                            w * bq.N[i] * bv.grad[k][c]);
        }
    }
    SpMat B(pressure.n_dofs(), velocity.n_dofs());
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

Eigen::VectorXd convection_load(const Field& u, const Field& w) {
    const FeSpace& space = *u.space;
    const Mesh& mesh = *space.mesh;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(space.n_dofs());
    if (mesh.dim != 2) return load;
    const auto& rule = triangle_rule(5);
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        const int cell = space.cells[rc];
        if (mesh.cell_tag[cell] != CellTag::Fluid) continue;
        const int rcw = region_cell_index(*w.space, cell);
        if (rcw < 0)
            throw InvalidArgument("convection_load: w misses a fluid cell");
        const double measure = mesh.cell_measure(cell);
        const auto& nodes = space.cell_nodes[rc];
        for (const auto& q : rule) {
            const Eigen::VectorXd uv = eval_value(u, rc, q);
            const Eigen::MatrixXd gw = eval_gradient(w, rcw, q);
            const BasisEval b = basis_at(space, rc, q);
            const double weight = q.w * measure;
            Eigen::Vector2d adv;  // (u . grad) w
            for (int c = 0; c < 2; ++c)
                adv[c] = uv[0] * gw(c, 0) + uv[1] * gw(c, 1);
            for (int k = 0; k < b.nloc; ++k)
                for (int c = 0; c < 2; ++c)
                    load[space.dof(nodes[k], c)] +=
                        weight * b.N[k] * adv[c];
        }
    }
    return load;
}

double mean_pressure(const Field& p) {
    const FeSpace& space = *p.space;
    double area = 0, integral = 0;
    const auto& rule = triangle_rule(2 * space.degree);
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        const int cell = space.cells[rc];
        if (space.mesh->cell_tag[cell] != CellTag::Fluid) continue;
        const double measure = space.mesh->cell_measure(cell);
        for (const auto& q : rule) {
            area += q.w * measure;
            integral += q.w * measure * eval_value(p, rc, q)[0];
        }
    }
    if (area <= 0) throw DegenerateInput("mean_pressure: empty fluid region");
    return integral / area;
}

void save_matrix_coordinate(const SpMat& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("save_matrix_coordinate: cannot open " +
                                    path);
    out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            out << it.row() << " " << it.col() << " "
                << format_double(it.value()) << "\n";
}

}  // namespace fsiwave
