#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fsiwave/error.hpp"
#include "fsiwave/mesh.hpp"
#include "fsiwave/quadrature.hpp"
#include "fsiwave/space.hpp"

using namespace fsiwave;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("quadrature rules integrate their degree exactly") {
    // oracle: monomial integrals over the reference triangle,
    // int x^a y^b = a! b! / (a+b+2)!
    auto tri_exact = [](int a, int b) {
        auto fact = [](int n) {
            double r = 1;
            for (int i = 2; i <= n; ++i) r *= i;
            return r;
        };
        auto fact2 = [&](int n) { return fact(n); };
        return fact2(a) * fact2(b) / fact2(a + b + 2);
    };
    for (int deg : {2, 4, 5}) {
        const auto rule = triangle_rule(deg);
        for (int a = 0; a + 0 <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) {
                double s = 0;
                for (const auto& q : rule)
                    s += q.w * std::pow(q.l1, a) * std::pow(q.l2, b);
                // weights sum to 1; the reference triangle has area 1/2
                CHECK(0.5 * s ==
                      doctest::Approx(tri_exact(a, b)).epsilon(1e-12));
            }
    }
    for (int deg = 1; deg <= 5; ++deg) {
        const auto rule = segment_rule(deg);
        for (int a = 0; a <= deg; ++a) {
            double s = 0;
            for (const auto& q : rule) s += q.w * std::pow(q.l1, a);
            CHECK(s == doctest::Approx(1.0 / (a + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("disc-in-square solid area approximates pi") {
    const Mesh mesh = build_mesh(
        DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.2));
    mesh.validate();
    const double area = mesh.region_measure(CellTag::Solid);
    CHECK(std::abs(area - pi) / pi < 0.02);
    // fluid + solid tile the square
    CHECK(mesh.region_measure(CellTag::Fluid) + area ==
          doctest::Approx(16.0).epsilon(1e-10));
    CHECK(mesh.min_angle_deg() >= 20.0);
}

TEST_CASE("1d interval mesh is solid-only") {
    const Mesh mesh = build_mesh(DomainSpec::interval(-1.0, 1.0, 0.01));
    CHECK(mesh.dim == 1);
    CHECK(mesh.n_cells() == 200);
    for (const CellTag t : mesh.cell_tag) CHECK(t == CellTag::Solid);
    CHECK(mesh.region_measure(CellTag::Solid) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("containment violations are rejected") {
    CHECK_THROWS_AS(build_mesh(DomainSpec::disc_in_square(4.0, 2.0,
                                                          Vec2::Zero(), 0.2)),
                    InvalidSpec);
    CHECK_THROWS_AS(build_mesh(DomainSpec::interval(-1.0, 1.0, -0.1)),
                    InvalidSpec);
}

TEST_CASE("mesh json round trip") {
    const Mesh mesh = build_mesh(
        DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.4));
    const Mesh back = mesh_from_json(mesh_to_json(mesh));
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_cells() == mesh.n_cells());
    CHECK(back.facets.size() == mesh.facets.size());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        CHECK((back.vertices[v] - mesh.vertices[v]).norm() < 1e-15);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        CHECK(back.cells[c] == mesh.cells[c]);
        CHECK(back.cell_tag[c] == mesh.cell_tag[c]);
    }
    back.validate();
}

TEST_CASE("norms of simple fields") {
    auto mesh = std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.3)));
    SpacePtr s = make_space(mesh, Family::ScalarP2, Region::Solid);

    Field one = interpolate(s, [](const Vec2&) {
        return Eigen::VectorXd::Ones(1);
    });
    // unit constant: L2 norm is sqrt(area)
    CHECK(norm(one, NormKind::L2) ==
          doctest::Approx(std::sqrt(mesh->region_measure(CellTag::Solid)))
              .epsilon(1e-12));
    CHECK(norm(one, NormKind::H1Semi) == doctest::Approx(0.0).epsilon(1e-10));

    Field zero = make_field(s);
    CHECK(norm(zero, NormKind::L2) == 0.0);
    CHECK(norm(zero, NormKind::H1) == 0.0);

    // f = y1: |grad f|^2 = 1, so the seminorm is sqrt(area)
    Field lin = interpolate(s, [](const Vec2& y) {
        Eigen::VectorXd v(1);
        v[0] = y.x();
        return v;
    });
    CHECK(norm(lin, NormKind::H1Semi) ==
          doctest::Approx(std::sqrt(mesh->region_measure(CellTag::Solid)))
              .epsilon(1e-12));
}

TEST_CASE("interface flux of the identity field is twice the solid area") {
    auto mesh = std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.15)));
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);
    Field v = interpolate(s, [](const Vec2& y) {
        return Eigen::VectorXd(y);
    });
    // divergence theorem: int_Gamma y.n = int div y = 2 |Omega_S|
    CHECK(interface_normal_flux(v) ==
          doctest::Approx(2.0 * mesh->region_measure(CellTag::Solid))
              .epsilon(1e-10));
    Field z = make_field(s);
    CHECK(interface_normal_flux(z) == 0.0);
}

TEST_CASE("field csv round trip") {
    auto mesh = std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.5)));
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);
    Field f = interpolate(s, [](const Vec2& y) {
        return Eigen::VectorXd(Vec2(std::sin(y.x()), y.y() * y.y()));
    });
    const std::string path = "test_field_roundtrip.csv";
    save_field_csv(f, path);
    const Eigen::VectorXd back = load_field_csv(path, s->n_dofs());
    CHECK((back - f.coeffs).lpNorm<Eigen::Infinity>() < 1e-14);
    std::remove(path.c_str());
    std::remove("test_field_roundtrip.dat");
}
