#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fsiwave/ball_mode.hpp"
#include "fsiwave/bessel.hpp"
#include "fsiwave/elasticity.hpp"

using namespace fsiwave;

namespace {

const double pi = 3.14159265358979323846;

std::shared_ptr<Mesh> solid_disc(double h) {
    return std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), h)));
}

std::shared_ptr<Mesh> solid_square(double h) {
    return std::make_shared<Mesh>(
        build_mesh(DomainSpec::square_in_square(3.0, 1.0, h)));
}

Field vec_field(SpacePtr s, Vec2 (*f)(const Vec2&)) {
    return interpolate(s, [f](const Vec2& y) {
        return Eigen::VectorXd(f(y));
    });
}

}  // namespace

TEST_CASE("strain and stress of canonical displacements") {
    auto mesh = solid_disc(0.4);
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);
    const ElasticParams params{1.0, 1.0};
    const auto& rule = triangle_rule(2);

    SUBCASE("rigid motion has zero strain and stress") {
        Field xi = vec_field(s, +[](const Vec2& y) {
            return Vec2(0.3 - 2.0 * y.y(), 2.0 * y.x() + 0.1);
        });
        for (int c = 0; c < static_cast<int>(s->cells.size()); ++c) {
            CHECK(strain_at(xi, c, rule[0]).norm() < 1e-12);
            CHECK(stress_elastic_at(xi, params, c, rule[0]).norm() < 1e-12);
        }
    }
    SUBCASE("identity displacement") {
        Field xi = vec_field(s, +[](const Vec2& y) { return Vec2(y); });
        const Eigen::Matrix2d eps = strain_at(xi, 0, rule[0]);
        CHECK((eps - Eigen::Matrix2d::Identity()).norm() < 1e-12);
        // Sigma = 2 l1 eps + l2 div Id = 2 Id + 2 Id
        const Eigen::Matrix2d sig = stress_elastic_at(xi, params, 0, rule[0]);
        CHECK((sig - 4.0 * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    }
    SUBCASE("simple shear") {
        Field xi = vec_field(s, +[](const Vec2& y) {
            return Vec2(y.y(), 0.0);
        });
        Eigen::Matrix2d expect;
        expect << 0, 0.5, 0.5, 0;
        CHECK((strain_at(xi, 0, rule[0]) - expect).norm() < 1e-12);
        CHECK((stress_elastic_at(xi, params, 0, rule[0]) - 2.0 * expect)
                  .norm() < 1e-12);
    }
}

TEST_CASE("rigid projection recovers rigid motions exactly") {
    auto mesh = solid_disc(0.3);
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);

    Field cst = vec_field(s, +[](const Vec2&) { return Vec2(1.5, -0.25); });
    RigidMotion r = project_rigid(cst);
    CHECK(r.skew.norm() < 1e-12);
    CHECK((r.shift - Vec2(1.5, -0.25)).norm() < 1e-12);

    Field rot = vec_field(s, +[](const Vec2& y) {
        return Vec2(-0.7 * y.y(), 0.7 * y.x());
    });
    r = project_rigid(rot);
    CHECK(std::abs(r.skew(0, 1) + 0.7) < 1e-10);
    CHECK(std::abs(r.skew(1, 0) - 0.7) < 1e-10);
    // disc is centered, so the rotation has no mean
    CHECK(r.shift.norm() < 1e-10);

    // f = y: symmetric gradient, zero skew part; the projection is the
    // constant centroid value
    Field id = vec_field(s, +[](const Vec2& y) { return Vec2(y); });
    r = project_rigid(id);
    CHECK(r.skew.norm() < 1e-10);
    CHECK((r.shift - r.centroid).norm() < 1e-10);
}

TEST_CASE("projection is idempotent and strain-free on its range") {
    auto mesh = solid_disc(0.3);
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);
    Field f = vec_field(s, +[](const Vec2& y) {
        return Vec2(y.x() * y.x() + 0.2 * y.y(), std::sin(y.x()));
    });
    const RigidMotion r = project_rigid(f);
    const Field rf = rigid_field(s, r);
    const RigidMotion r2 = project_rigid(rf);
    CHECK((r2.skew - r.skew).norm() < 1e-12);
    CHECK((r2.shift - r.shift).norm() < 1e-12);
    const auto& rule = triangle_rule(2);
    for (int c = 0; c < static_cast<int>(s->cells.size()); ++c)
        CHECK(strain_at(rf, c, rule[0]).norm() < 1e-12);
}

TEST_CASE("korn gap is finite, positive, and rejects rigid input") {
    auto mesh = solid_disc(0.3);
    SpacePtr s = make_space(mesh, Family::VectorP2, Region::Solid);

    Field id = vec_field(s, +[](const Vec2& y) { return Vec2(y); });
    const double g1 = korn_gap(id);
    CHECK(g1 > 0);
    CHECK(std::isfinite(g1));

    Field shear = vec_field(s, +[](const Vec2& y) {
        return Vec2(y.y(), 0.0);
    });
    Field quad = vec_field(s, +[](const Vec2& y) {
        return Vec2(y.x() * y.x(), 0.0);
    });
    const double g2 = korn_gap(shear);
    const double g3 = korn_gap(quad);
    // the family stays inside a bounded interval [c*, C*]
    const double lo = std::min({g1, g2, g3});
    const double hi = std::max({g1, g2, g3});
    CHECK(lo > 0.1);
    CHECK(hi < 100.0);

    Field rot = vec_field(s, +[](const Vec2& y) {
        return Vec2(-y.y(), y.x());
    });
    CHECK_THROWS_AS(korn_gap(rot), DegenerateInput);
}

TEST_CASE("stationary Neumann solution is linear in 2d") {
    // ansatz phi = c (y - centroid): Sigma = (2 l1 + 2 l2) c Id, so the
    // traction matches n when c = 1 / (2 l1 + 2 l2)
    const ElasticParams params{1.0, 1.0};
    auto mesh = solid_disc(0.15);
    const NeumannPhi sol = solve_neumann_phi(mesh, params);
    CHECK(sol.defect < 0.05);

    SpacePtr s = sol.phi.space;
    Field exact = interpolate(s, [](const Vec2& y) {
        return Eigen::VectorXd(Vec2(y / 4.0));
    });
    const Field diff{s, sol.phi.coeffs - exact.coeffs};
    CHECK(norm(diff, NormKind::H1) / norm(exact, NormKind::H1) < 0.02);

    const RigidMotion r = project_rigid(sol.phi);
    CHECK(r.skew.norm() < 1e-10);
    CHECK(r.shift.norm() < 1e-10);
}

TEST_CASE("dirichlet eigenvalues are positive and ascending") {
    const ElasticParams params{1.0, 1.0};
    auto mesh = solid_disc(0.25);
    const auto pairs = dirichlet_eigs(mesh, params, 6);
    REQUIRE(pairs.size() == 6);
    CHECK(pairs[0].mu > 0);
    for (std::size_t k = 1; k < pairs.size(); ++k)
        CHECK(pairs[k].mu >= pairs[k - 1].mu - 1e-10);
    for (const auto& p : pairs)
        CHECK(norm(p.psi, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("disc radial mode approximates the separated eigenvalue") {
    // separation of variables: psi = grad(J0(k r)), boundary J1(k R) = 0,
    // mu = (2 l1 + l2) k^2 with k = 3.8317059702 the first J1 root
    const ElasticParams params{1.0, 1.0};
    const double mu_exact = 3.0 * 3.8317059702 * 3.8317059702;
    auto mesh = solid_disc(0.15);
    const Classification cls = classify_domain(mesh, params, 10, 0.1);
    CHECK(cls.bad);
    REQUIRE(!cls.offenders.empty());
    const BadMode& m = *std::min_element(
        cls.offenders.begin(), cls.offenders.end(),
        [](const BadMode& a, const BadMode& b) {
            return a.badness < b.badness;
        });
    CHECK(std::abs(m.mu - mu_exact) / mu_exact < 0.02);
    CHECK(m.badness < 0.05);
}

TEST_CASE("square solid has no near-overdetermined mode") {
    const ElasticParams params{1.0, 1.0};
    auto mesh = solid_square(0.2);
    const Classification cls = classify_domain(mesh, params, 10, 0.1);
    CHECK(!cls.bad);
    double min_badness = 1;
    for (const auto& p : cls.pairs) min_badness = std::min(min_badness,
                                                           p.badness);
    CHECK(min_badness > 0.2);
}

TEST_CASE("classify rejects an empty mode request") {
    auto mesh = solid_disc(0.4);
    CHECK_THROWS_AS(classify_domain(mesh, ElasticParams{1.0, 1.0}, 0, 0.1),
                    InvalidArgument);
}

TEST_CASE("spherical bessel roots") {
    const auto roots = spherical_bessel_roots(2);
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - 4.493409) < 1e-6);
    CHECK(std::abs(roots[1] - 7.725252) < 1e-6);
    for (const double r : roots) {
        // j1(r) = 0 is equivalent to tan r = r
        CHECK(std::abs(std::tan(r) - r) < 1e-10);
    }
    CHECK(roots[0] > pi);
    CHECK(roots[0] < 1.5 * pi);
}

TEST_CASE("analytic ball mode") {
    const ElasticParams params{1.0, 1.0};
    const AnalyticBallMode mode = ball_pressure_wave(1, 1.0, params);

    CHECK(mode.mu == doctest::Approx(3.0 * mode.root * mode.root)
                         .epsilon(1e-12));
    // sin(r1) = -r1 / sqrt(1 + r1^2) in the third quadrant of tan r = r
    const double s_exact = -mode.root / std::sqrt(1.0 + mode.root * mode.root);
    CHECK(std::abs(std::sin(mode.root) - s_exact) < 1e-12);
    CHECK(mode.q == doctest::Approx(3.0 * s_exact).epsilon(1e-10));
    CHECK(std::abs(mode.q + 2.9284) < 1e-4);

    // zero boundary trace
    for (const Vec3& n : {Vec3(1, 0, 0), Vec3(0.6, 0.0, 0.8),
                          Vec3(0, -1, 0)})
        CHECK(mode.displacement(n).norm() < 1e-14);

    // pointwise eigen-residual at pseudo-random interior points
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-0.57, 0.57);
    const double scale = std::sqrt(mode.mu);
    for (int i = 0; i < 100; ++i) {
        const Vec3 y(dist(rng), dist(rng), dist(rng));
        CHECK(mode.eigen_residual(y) <=
              1e-8 * scale * std::max(1e-3, mode.displacement(y).norm()));
    }

    CHECK(ball_badness(mode, 5000) < 1e-8);

    // phi_N of the ball: y / (2 l1 + 3 l2)
    CHECK((ball_phi_n(Vec3(0.2, -0.4, 0.1), params) -
           Vec3(0.2, -0.4, 0.1) / 5.0)
              .norm() < 1e-14);
}
