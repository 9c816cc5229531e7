#include "fsiwave/initdata.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "fsiwave/io.hpp"
#include <json.hpp>

namespace fsiwave {

namespace {

/// Interior (zero-trace) dof subset of a space.
DofSubset interior_subset(const FeSpace& space) {
    std::vector<bool> keep(space.n_dofs(), false);
    for (int n = 0; n < space.n_nodes(); ++n) {
        if (space.node_on_interface[n] || space.node_on_outer[n]) continue;
        for (int c = 0; c < space.components; ++c)
            keep[space.dof(n, c)] = true;
    }
    return make_subset(space.n_dofs(), keep);
}

DofSubset interface_subset(const FeSpace& space) {
    std::vector<bool> keep(space.n_dofs(), false);
    for (int n = 0; n < space.n_nodes(); ++n) {
        if (!space.node_on_interface[n]) continue;
        for (int c = 0; c < space.components; ++c)
            keep[space.dof(n, c)] = true;
    }
    return make_subset(space.n_dofs(), keep);
}

Field interpolate_seed(SpacePtr space,
                       const std::function<Eigen::VectorXd(const Vec2&)>& f,
                       double amplitude) {
    if (!f) return make_field(space);
    Field out = interpolate(space, f);
    out.coeffs *= amplitude;
    return out;
}

/// Dof-to-dof copy along a node map (from-space -> to-space), restricted
/// to mapped nodes.
void copy_mapped(const FeSpace& from, const Eigen::VectorXd& src,
                 const std::vector<int>& node_map, const FeSpace& to,
                 Eigen::VectorXd& dst) {
    for (int n = 0; n < from.n_nodes(); ++n) {
        const int m = node_map[n];
        if (m < 0) continue;
        for (int c = 0; c < from.components; ++c)
            dst[to.dof(m, c)] = src[from.dof(n, c)];
    }
}

/// Projects v onto the discretely divergence-free subspace with zero
/// trace: bordered saddle system (mass, divergence, pressure-constant
/// gauge).
Eigen::VectorXd project_div_free(const FeSpace& fluid, const FeSpace& press,
                                 const SpMat& M_f, const SpMat& Bf,
                                 const Eigen::VectorXd& v) {
    const DofSubset interior = interior_subset(fluid);
    const int ni = interior.n_sub();
    const int np = press.n_dofs();
    if (ni == 0 || np == 0) return Eigen::VectorXd::Zero(fluid.n_dofs());

    const SpMat M_ii = restrict_matrix(M_f, interior, interior);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < M_ii.outerSize(); ++k)
        for (SpMat::InnerIterator it(M_ii, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()),
                              static_cast<int>(it.col()), it.value());
    for (int k = 0; k < Bf.outerSize(); ++k)
        for (SpMat::InnerIterator it(Bf, k); it; ++it) {
            const int c = interior.full_to_sub[it.col()];
            if (c < 0) continue;
            trip.emplace_back(ni + static_cast<int>(it.row()), c, it.value());
            trip.emplace_back(c, ni + static_cast<int>(it.row()), it.value());
        }
    for (int j = 0; j < np; ++j) {
        trip.emplace_back(ni + j, ni + np, 1.0);
        trip.emplace_back(ni + np, ni + j, 1.0);
    }
    SpMat S(ni + np + 1, ni + np + 1);
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();
    Eigen::SparseLU<SpMat> lu(S);
    if (lu.info() != Eigen::Success)
        throw SolveFailure("construct_compatible: divergence projection "
                           "system singular");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + np + 1);
    rhs.head(ni) = restrict_vector(M_f * v, interior);
    const Eigen::VectorXd sol = lu.solve(rhs);
    return prolong_vector(sol.head(ni), interior, fluid.n_dofs());
}

}  // namespace

InitialData construct_compatible(std::shared_ptr<const Mesh> mesh,
                                 const FluidParams& fluid_p,
                                 const ElasticParams& elastic_p,
                                 const CompatibleSeed& seed) {
    fluid_p.check();
    elastic_p.check();
    SpacePtr fluid = make_space(mesh, Family::VectorP2, Region::Fluid);
    SpacePtr press = make_space(mesh, Family::ScalarP1, Region::Fluid);
    SpacePtr solid = make_space(mesh, Family::VectorP2, Region::Solid);
    const std::vector<int> fluid_to_solid = map_nodes(*fluid, *solid);
    const std::vector<int> solid_to_fluid = map_nodes(*solid, *fluid);

    const SpMat M_f = assemble_mass(*fluid);
    const SpMat A_f = assemble_strain_stiffness(*fluid, 2 * fluid_p.nu);
    const SpMat Bf = fluid->n_dofs() > 0 && press->n_dofs() > 0
                         ? assemble_divergence(*press, *fluid)
                         : SpMat(press->n_dofs(), fluid->n_dofs());
    const SpMat K_s = assemble_elastic_stiffness(*solid, elastic_p);
    const SpMat M_s = assemble_mass(*solid);

    InitialData d;
    d.p0 = make_field(press);

    // step 1: divergence-free u1 with zero trace
    Field u1_seed = interpolate_seed(fluid, seed.u1_spec, seed.amplitude);
    for (int n = 0; n < fluid->n_nodes(); ++n)
        if (fluid->node_on_interface[n] || fluid->node_on_outer[n])
            for (int c = 0; c < fluid->components; ++c)
                u1_seed.coeffs[fluid->dof(n, c)] = 0;
    d.u1 = make_field(fluid);
    if (fluid->n_dofs() > 0)
        d.u1.coeffs =
            project_div_free(*fluid, *press, M_f, Bf, u1_seed.coeffs);

    // step 2: xi2 by interpolation
    d.xi2 = interpolate_seed(solid, seed.xi2_spec, seed.amplitude);

    // step 3: Div Sigma(xi0) = xi2 with Dirichlet trace g
    d.xi0 = interpolate_seed(solid, seed.boundary_g, 1.0);
    for (int n = 0; n < solid->n_nodes(); ++n)
        if (!solid->node_on_interface[n] && !solid->node_on_outer[n])
            for (int c = 0; c < solid->components; ++c)
                d.xi0.coeffs[solid->dof(n, c)] = 0;
    const DofSubset s_int = interior_subset(*solid);
    {
        const SpMat K_ii = restrict_matrix(K_s, s_int, s_int);
        Eigen::SimplicialLDLT<SpMat> ldlt(K_ii);
        if (ldlt.info() != Eigen::Success)
            throw SolveFailure("construct_compatible: elastic Dirichlet "
                               "factorization failed");
        const Eigen::VectorXd rhs = restrict_vector(
            -(M_s * d.xi2.coeffs) - K_s * d.xi0.coeffs, s_int);
        d.xi0.coeffs += prolong_vector(ldlt.solve(rhs), s_int,
                                       solid->n_dofs());
    }

    // discrete solid Neumann functional of xi0, as interface load for the
    // Stokes step (this choice makes the interface-stress residual vanish
    // identically at the discrete level)
    Eigen::VectorXd neumann = K_s * d.xi0.coeffs + M_s * d.xi2.coeffs;
    Eigen::VectorXd neumann_fluid = Eigen::VectorXd::Zero(fluid->n_dofs());
    copy_mapped(*solid, neumann, solid_to_fluid, *fluid, neumann_fluid);

    // step 4: stationary Stokes with convection by Picard
    d.u0 = make_field(fluid);
    if (fluid->n_dofs() > 0 && press->n_dofs() > 0) {
        std::vector<bool> keep(fluid->n_dofs(), false);
        for (int n = 0; n < fluid->n_nodes(); ++n)
            if (!fluid->node_on_outer[n])
                for (int c = 0; c < fluid->components; ++c)
                    keep[fluid->dof(n, c)] = true;
        const DofSubset free = make_subset(fluid->n_dofs(), keep);
        const int nf = free.n_sub();
        const int np = press->n_dofs();
        const SpMat A_ff = restrict_matrix(A_f, free, free);
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < A_ff.outerSize(); ++k)
            for (SpMat::InnerIterator it(A_ff, k); it; ++it)
                trip.emplace_back(static_cast<int>(it.row()),
                                  static_cast<int>(it.col()), it.value());
        for (int k = 0; k < Bf.outerSize(); ++k)
            for (SpMat::InnerIterator it(Bf, k); it; ++it) {
                const int c = free.full_to_sub[it.col()];
                if (c < 0) continue;
                trip.emplace_back(nf + static_cast<int>(it.row()), c,
                                  it.value());
                trip.emplace_back(c, nf + static_cast<int>(it.row()),
                                  -it.value());
            }
        SpMat S(nf + np, nf + np);
        S.setFromTriplets(trip.begin(), trip.end());
        S.makeCompressed();
        Eigen::SparseLU<SpMat> lu(S);
        if (lu.info() != Eigen::Success)
            throw SolveFailure("construct_compatible: Stokes system "
                               "singular");
        for (int iter = 0;; ++iter) {
            Eigen::VectorXd load =
                -(M_f * d.u1.coeffs) - convection_load(d.u0, d.u0) -
                neumann_fluid;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + np);
            rhs.head(nf) = restrict_vector(load, free);
            const Eigen::VectorXd sol = lu.solve(rhs);
            const Eigen::VectorXd u_new =
                prolong_vector(sol.head(nf), free, fluid->n_dofs());
            const double rel = (u_new - d.u0.coeffs).norm() /
                               (u_new.norm() + 1e-300);
            if (!u_new.allFinite())
                throw BlowUp(
                    "construct_compatible: Stokes iterate is not finite; "
                    "the seed lies outside the small-data regime");
            d.u0.coeffs = u_new;
            d.p0.coeffs = sol.tail(np);
            if (iter > 0 && rel < 1e-12) break;
            if (iter >= 50) {
                if (rel > 1.0)
                    throw BlowUp(
                        "construct_compatible: Stokes iteration diverges; "
                        "the seed lies outside the small-data regime");
                throw PicardDivergence(
                    "construct_compatible: Stokes Picard iteration did not "
                    "contract (seed too large?)");
            }
        }
    }

    // step 5: minimal-elastic-energy extension of u0's interface trace
    d.xi1 = make_field(solid);
    copy_mapped(*fluid, d.u0.coeffs, fluid_to_solid, *solid, d.xi1.coeffs);
    for (int n = 0; n < solid->n_nodes(); ++n)
        if (!solid->node_on_interface[n] && !solid->node_on_outer[n])
            for (int c = 0; c < solid->components; ++c)
                d.xi1.coeffs[solid->dof(n, c)] = 0;
    if (s_int.n_sub() > 0) {
        const SpMat K_ii = restrict_matrix(K_s, s_int, s_int);
        Eigen::SimplicialLDLT<SpMat> ldlt(K_ii);
        const Eigen::VectorXd rhs =
            restrict_vector(-(K_s * d.xi1.coeffs), s_int);
        d.xi1.coeffs +=
            prolong_vector(ldlt.solve(rhs), s_int, solid->n_dofs());
    }
    return d;
}

double CompatibilityReport::max() const {
    return std::max({momentum, div_u0, div_u1, interface_stress,
                     interface_velocity, outer_u0, outer_u1, elastic_accel});
}

CompatibilityReport check_compatibility(const InitialData& data,
                                        std::shared_ptr<const Mesh> mesh,
                                        const FluidParams& fluid_p,
                                        const ElasticParams& elastic_p) {
    if (data.u0.space->mesh != mesh || data.xi0.space->mesh != mesh)
        throw InvalidArgument("check_compatibility: data built on a "
                              "different mesh");
    CompatibilityReport r;
    const FeSpace& fluid = *data.u0.space;
    const FeSpace& press = *data.p0.space;
    const FeSpace& solid = *data.xi0.space;

    const SpMat K_s = assemble_elastic_stiffness(solid, elastic_p);
    const SpMat M_s = assemble_mass(solid);

    // elastic acceleration: xi2 - Div Sigma(xi0), H^-1 of the solid
    const DofSubset s_int = interior_subset(solid);
    if (s_int.n_sub() > 0) {
        const SpMat G_s = assemble_gradient_stiffness(solid);
        const Eigen::VectorXd f = restrict_vector(
            M_s * data.xi2.coeffs + K_s * data.xi0.coeffs, s_int);
        r.elastic_accel = DualNorm(restrict_matrix(
            SpMat(G_s + M_s), s_int, s_int))(f);
    }

    if (fluid.n_dofs() == 0) return r;

    const SpMat M_f = assemble_mass(fluid);
    const SpMat A_f = assemble_strain_stiffness(fluid, 2 * fluid_p.nu);
    const SpMat Bf = assemble_divergence(press, fluid);
    const SpMat M_p = assemble_mass(press);

    const Eigen::VectorXd momentum_full =
        M_f * data.u1.coeffs + convection_load(data.u0, data.u0) +
        A_f * data.u0.coeffs - Bf.transpose() * data.p0.coeffs;

    const DofSubset f_int = interior_subset(fluid);
    if (f_int.n_sub() > 0) {
        const SpMat G_f = assemble_gradient_stiffness(fluid);
        r.momentum = DualNorm(restrict_matrix(SpMat(G_f + M_f), f_int,
                                              f_int))(
            restrict_vector(momentum_full, f_int));
    }

    const DualNorm press_dual{M_p};
    r.div_u0 = press_dual(Bf * data.u0.coeffs);
    r.div_u1 = press_dual(Bf * data.u1.coeffs);

    // interface stress: fluid-side discrete Neumann functional minus the
    // solid-side one, in the inverse-boundary-mass norm
    const std::vector<int> solid_to_fluid = map_nodes(solid, fluid);
    Eigen::VectorXd solid_neumann_fluid =
        Eigen::VectorXd::Zero(fluid.n_dofs());
    copy_mapped(solid, K_s * data.xi0.coeffs + M_s * data.xi2.coeffs,
                solid_to_fluid, fluid, solid_neumann_fluid);
    const DofSubset f_gamma = interface_subset(fluid);
    const SpMat Mg = assemble_interface_mass(fluid);
    if (f_gamma.n_sub() > 0) {
        const SpMat Mg_ii = restrict_matrix(Mg, f_gamma, f_gamma);
        r.interface_stress = DualNorm(Mg_ii)(restrict_vector(
            momentum_full + solid_neumann_fluid, f_gamma));
    }

    // interface velocity: u0 - xi1 trace, L2 of the interface
    Eigen::VectorXd xi1_on_fluid = Eigen::VectorXd::Zero(fluid.n_dofs());
    copy_mapped(solid, data.xi1.coeffs, solid_to_fluid, fluid, xi1_on_fluid);
    Eigen::VectorXd gap = data.u0.coeffs - xi1_on_fluid;
    for (int n = 0; n < fluid.n_nodes(); ++n)
        if (!fluid.node_on_interface[n])
            for (int c = 0; c < fluid.components; ++c)
                gap[fluid.dof(n, c)] = 0;
    r.interface_velocity = std::sqrt(std::max(0.0, gap.dot(Mg * gap)));

    const SpMat Mo = assemble_facet_mass(fluid, FacetTag::Outer);
    r.outer_u0 =
        std::sqrt(std::max(0.0, data.u0.coeffs.dot(Mo * data.u0.coeffs)));
    r.outer_u1 =
        std::sqrt(std::max(0.0, data.u1.coeffs.dot(Mo * data.u1.coeffs)));
    return r;
}

void save_initial_data(const InitialData& data,
                       const CompatibilityReport& report,
                       const std::string& dir,
                       const std::string& scenario_name) {
    save_field_csv(data.u0, dir + "/u0.csv");
    save_field_csv(data.u1, dir + "/u1.csv");
    if (data.p0.space->n_dofs() > 0) save_field_csv(data.p0, dir + "/p0.csv");
    save_field_csv(data.xi0, dir + "/xi0.csv");
    save_field_csv(data.xi1, dir + "/xi1.csv");
    save_field_csv(data.xi2, dir + "/xi2.csv");

    nlohmann::json j;
    j["scenario"] = scenario_name;
    j["fields"] = {"u0.csv", "u1.csv", "p0.csv",
                   "xi0.csv", "xi1.csv", "xi2.csv"};
    j["residuals"] = {{"momentum", report.momentum},
                      {"div_u0", report.div_u0},
                      {"div_u1", report.div_u1},
                      {"interface_stress", report.interface_stress},
                      {"interface_velocity", report.interface_velocity},
                      {"outer_u0", report.outer_u0},
                      {"outer_u1", report.outer_u1},
                      {"elastic_accel", report.elastic_accel}};
    std::ofstream out(dir + "/manifest.json");
    if (!out)
        throw InvalidArgument("save_initial_data: cannot write manifest in " +
                              dir);
    out << j.dump(2) << "\n";
}

InitialData load_initial_data(std::shared_ptr<const Mesh> mesh,
                              const std::string& dir) {
    {
        std::ifstream manifest(dir + "/manifest.json");
        if (!manifest)
            throw MissingArtifacts("load_initial_data: no manifest.json in " +
                                   dir);
    }
    SpacePtr fluid = make_space(mesh, Family::VectorP2, Region::Fluid);
    SpacePtr press = make_space(mesh, Family::ScalarP1, Region::Fluid);
    SpacePtr solid = make_space(mesh, Family::VectorP2, Region::Solid);
    auto load = [&](SpacePtr space, const std::string& name,
                    bool optional) -> Field {
        Field f = make_field(space);
        std::ifstream probe(dir + "/" + name);
        if (!probe) {
            if (optional && space->n_dofs() == 0) return f;
            throw MissingArtifacts("load_initial_data: missing " + dir + "/" +
                                   name);
        }
        probe.close();
        f.coeffs = load_field_csv(dir + "/" + name, space->n_dofs());
        return f;
    };
    InitialData d;
    d.u0 = load(fluid, "u0.csv", false);
    d.u1 = load(fluid, "u1.csv", false);
    d.p0 = load(press, "p0.csv", true);
    d.xi0 = load(solid, "xi0.csv", false);
    d.xi1 = load(solid, "xi1.csv", false);
    d.xi2 = load(solid, "xi2.csv", false);
    return d;
}

}  // namespace fsiwave
