#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fsiwave/fluid.hpp"
#include "fsiwave/initdata.hpp"
#include "fsiwave/solver.hpp"

using namespace fsiwave;

namespace {

std::shared_ptr<Mesh> disc_in_square(double h) {
    return std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), h)));
}

Field vec_field(SpacePtr s, Vec2 (*f)(const Vec2&)) {
    return interpolate(s, [f](const Vec2& y) {
        return Eigen::VectorXd(f(y));
    });
}

Field scalar_field(SpacePtr s, double (*f)(const Vec2&)) {
    return interpolate(s, [f](const Vec2& y) {
        Eigen::VectorXd v(1);
        v[0] = f(y);
        return v;
    });
}

}  // namespace

TEST_CASE("fluid stress of canonical states") {
    auto mesh = disc_in_square(0.4);
    SpacePtr vel = make_space(mesh, Family::VectorP2, Region::Fluid);
    SpacePtr prs = make_space(mesh, Family::ScalarP1, Region::Fluid);
    const FluidParams params{1.0};
    const int cell = vel->cells[0];
    const auto& q = triangle_rule(2)[0];

    Field u0 = make_field(vel);
    Field p1 = scalar_field(prs, +[](const Vec2&) { return 1.0; });
    CHECK((stress_fluid_at(u0, p1, params, cell, q) +
           Eigen::Matrix2d::Identity())
              .norm() < 1e-12);

    Field shear = vec_field(vel, +[](const Vec2& y) {
        return Vec2(y.y(), 0.0);
    });
    Field p0 = make_field(prs);
    Eigen::Matrix2d expect;
    expect << 0, 1, 1, 0;
    CHECK((stress_fluid_at(shear, p0, params, cell, q) - expect).norm() <
          1e-12);

    Field rot = vec_field(vel, +[](const Vec2& y) {
        return Vec2(-y.y(), y.x());
    });
    Field p5 = scalar_field(prs, +[](const Vec2&) { return 5.0; });
    CHECK((stress_fluid_at(rot, p5, params, cell, q) +
           5.0 * Eigen::Matrix2d::Identity())
              .norm() < 1e-12);
}

TEST_CASE("coupled blocks: symmetry, rigid kernel, inf-sup") {
    auto mesh = disc_in_square(0.25);
    const CoupledMatrices cm =
        assemble_coupled(mesh, FluidParams{1.0}, ElasticParams{1.0, 1.0});

    SUBCASE("viscous block is symmetric") {
        const SpMat D = SpMat(cm.A_nu - SpMat(cm.A_nu.transpose()));
        double mx = 0;
        for (int k = 0; k < D.outerSize(); ++k)
            for (SpMat::InnerIterator it(D, k); it; ++it)
                mx = std::max(mx, std::abs(it.value()));
        CHECK(mx <= 1e-12);
    }
    SUBCASE("constant translations lie in the elastic kernel") {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(cm.velocity->n_dofs());
        for (int node = 0; node < cm.velocity->n_nodes(); ++node) {
            b[cm.velocity->dof(node, 0)] = 0.7;
            b[cm.velocity->dof(node, 1)] = -0.2;
        }
        CHECK((cm.K_sigma * b).norm() <= 1e-12 * b.norm());
    }
    SUBCASE("discrete inf-sup constant is bounded away from zero") {
        // beta^2 = min_q (q^T B A^{-1} B^T q) / (q^T Mp q) with A the H1
        // Gram of the velocities vanishing on the outer boundary (the
        // coupled solver's trial space keeps interface velocities free)
        SpacePtr fluid = cm.fluid;
        const SpMat Bf = assemble_divergence(*cm.pressure, *fluid);
        const SpMat Mp = assemble_mass(*cm.pressure);
        const SpMat A = assemble_gradient_stiffness(*fluid) +
                        assemble_mass(*fluid);
        std::vector<bool> keep(Bf.cols(), true);
        for (const int d : outer_dof_list(*fluid)) keep[d] = false;
        const DofSubset sub = make_subset(static_cast<int>(Bf.cols()), keep);
        const SpMat A_ff = restrict_matrix(A, sub, sub);
        const SpMat B_full_rows = restrict_matrix(
            Bf, make_subset(static_cast<int>(Bf.rows()),
                            std::vector<bool>(Bf.rows(), true)),
            sub);
        const SpMat& B_f = B_full_rows;
        Eigen::SimplicialLDLT<SpMat> ldlt(A_ff);
        REQUIRE(ldlt.info() == Eigen::Success);
        const Eigen::MatrixXd BT = Eigen::MatrixXd(SpMat(B_f.transpose()));
        const Eigen::MatrixXd Schur =
            Eigen::MatrixXd(B_f) * ldlt.solve(BT);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Schur, Eigen::MatrixXd(Mp));
        CHECK(std::sqrt(std::max(0.0, es.eigenvalues()[0])) > 0.1);
    }
}

TEST_CASE("convection load identities") {
    auto mesh = disc_in_square(0.25);
    SpacePtr vel = make_space(mesh, Family::VectorP2, Region::Fluid);
    const SpMat M = assemble_mass(*vel);

    SUBCASE("constant transported through a linear field") {
        // (c . grad)(A y) = A c, constant
        Field u = vec_field(vel, +[](const Vec2&) { return Vec2(0.5, -1.0); });
        Field w = vec_field(vel, +[](const Vec2& y) {
            return Vec2(2.0 * y.x() + y.y(), -y.x());
        });
        const Vec2 Ac(2.0 * 0.5 + (-1.0), -0.5);
        const Field cst = interpolate(vel, [&](const Vec2&) {
            return Eigen::VectorXd(Ac);
        });
        CHECK((convection_load(u, w) - M * cst.coeffs).norm() <=
              1e-10 * (M * cst.coeffs).norm());
    }
    SUBCASE("quadratic self-transport") {
        // u = (y1, -y2): (u . grad)u = (y1, y2)
        Field u = vec_field(vel, +[](const Vec2& y) {
            return Vec2(y.x(), -y.y());
        });
        Field expect = vec_field(vel, +[](const Vec2& y) { return Vec2(y); });
        CHECK((convection_load(u, u) - M * expect.coeffs).norm() <=
              1e-10 * (M * expect.coeffs).norm());
    }
    SUBCASE("skew symmetry on discretely divergence-free fields") {
        // project the curl of a stream potential that is flat on both
        // boundaries, so the projection barely disturbs the pointwise
        // divergence
        auto m = disc_in_square(0.2);
        CompatibleSeed seed;
        seed.u1_spec = [](const Vec2& yv) {
            const double x = yv.x(), y = yv.y(), r2 = x * x + y * y;
            const double f = (r2 - 1) * (r2 - 1);
            const double g = (x * x - 4) * (x * x - 4);
            const double k = (y * y - 4) * (y * y - 4);
            const double fx = 4 * x * (r2 - 1), fy = 4 * y * (r2 - 1);
            const double gx = 4 * x * (x * x - 4);
            const double ky = 4 * y * (y * y - 4);
            const double psix = (fx * g + f * gx) * k;
            const double psiy = (fy * k + f * ky) * g;
            return Eigen::VectorXd(Vec2(psiy / 256.0, -psix / 256.0));
        };
        const InitialData d = construct_compatible(
            m, FluidParams{1.0}, ElasticParams{1.0, 1.0}, seed);
        const Field& u = d.u1;
        const double norm_u = norm(u, NormKind::L2);
        const double norm_w = norm(u, NormKind::H1);
        REQUIRE(norm_u > 0);
        const double pairing = convection_load(u, u).dot(u.coeffs);
        CHECK(std::abs(pairing) <= 1e-8 * norm_u * norm_w * norm_w);
    }
}

TEST_CASE("mean pressure") {
    auto mesh = disc_in_square(0.3);
    SpacePtr prs = make_space(mesh, Family::ScalarP1, Region::Fluid);

    Field p5 = scalar_field(prs, +[](const Vec2&) { return 5.0; });
    CHECK(mean_pressure(p5) == doctest::Approx(5.0).epsilon(1e-12));

    // odd in y1 over a region symmetric about the y2 axis
    Field lin = scalar_field(prs, +[](const Vec2& y) { return y.x(); });
    CHECK(std::abs(mean_pressure(lin)) < 1e-10);

    Field any = scalar_field(prs, +[](const Vec2& y) {
        return std::sin(y.x()) + y.y() * y.y();
    });
    Field centered{prs, any.coeffs -
                            Eigen::VectorXd::Constant(prs->n_dofs(),
                                                      mean_pressure(any))};
    CHECK(std::abs(mean_pressure(centered)) < 1e-12);
}
