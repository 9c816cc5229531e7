// Acceptance gate: one line per criterion, tolerances pinned below.
// Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "fsiwave/asymptotics.hpp"
#include "fsiwave/ball_mode.hpp"
#include "fsiwave/bessel.hpp"
#include "fsiwave/elasticity.hpp"
#include "fsiwave/initdata.hpp"
#include "fsiwave/solver.hpp"

using namespace fsiwave;

namespace {

const double pi = 3.14159265358979323846;
int failures = 0;

void report(int criterion, const char* name, bool ok, const char* detail) {
    std::printf("criterion %d (%s): %s  %s\n", criterion, name,
                ok ? "PASS" : "FAIL", detail);
    if (!ok) ++failures;
}

std::shared_ptr<Mesh> disc_mesh(double h) {
    return std::make_shared<Mesh>(
        build_mesh(DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), h)));
}

const EigenPair& least_bad(const std::vector<EigenPair>& pairs) {
    const EigenPair* best = &pairs[0];
    for (const auto& p : pairs)
        if (p.badness < best->badness) best = &p;
    return *best;
}

Eigen::VectorXd boundary_flat_curl(const Vec2& yv) {
    // curl of (r^2-1)^2 (x^2-4)^2 (y^2-4)^2 / 256: exactly divergence
    // free, gradient vanishing on the interface and the outer square
    const double x = yv.x(), y = yv.y(), r2 = x * x + y * y;
    const double f = (r2 - 1) * (r2 - 1);
    const double g = (x * x - 4) * (x * x - 4);
    const double k = (y * y - 4) * (y * y - 4);
    const double fx = 4 * x * (r2 - 1), fy = 4 * y * (r2 - 1);
    const double gx = 4 * x * (x * x - 4), ky = 4 * y * (y * y - 4);
    return Eigen::VectorXd(Vec2(((fy * k + f * ky) * g) / 256.0,
                                -((fx * g + f * gx) * k) / 256.0));
}

// --------------------------------------------------------------------------

void criterion_1() {
    const auto roots = spherical_bessel_roots(2);
    char buf[128];
    const double e1 = std::abs(roots[0] - 4.493409);
    const double e2 = std::abs(roots[1] - 7.725252);
    double tan_defect = 0;
    for (const double r : roots)
        tan_defect = std::max(tan_defect, std::abs(std::tan(r) - r));
    std::snprintf(buf, sizeof(buf),
                  "|r1-4.493409|=%.2e |r2-7.725252|=%.2e |tan r - r|=%.2e",
                  e1, e2, tan_defect);
    report(1, "spherical bessel roots", e1 <= 1e-6 && e2 <= 1e-6 &&
                                            tan_defect <= 1e-10, buf);
}

void criterion_2() {
    const ElasticParams params{1.0, 1.0};
    const AnalyticBallMode mode = ball_pressure_wave(1, 1.0, params);
    const double mu_err = std::abs(mode.mu - 3.0 * mode.root * mode.root);

    std::mt19937 rng(123);
    std::uniform_real_distribution<double> dist(-0.57, 0.57);
    double max_resid = 0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 y(dist(rng), dist(rng), dist(rng));
        max_resid = std::max(max_resid, mode.eigen_residual(y));
    }
    const double badness = ball_badness(mode, 4000);

    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "|mu-3r^2|=%.2e residual=%.2e badness=%.2e", mu_err,
                  max_resid, badness);
    report(2, "analytic ball mode",
           mu_err <= 1e-10 && max_resid <= 1e-8 && badness <= 1e-8, buf);
}

void criterion_3() {
    const ElasticParams params{1.0, 1.0};
    const double mu_exact = 3.0 * 3.8317059702 * 3.8317059702;

    auto disc = disc_mesh(0.05);
    const auto disc_pairs = dirichlet_eigs(disc, params, 12);
    const EigenPair& radial = least_bad(disc_pairs);
    const double mu_rel = std::abs(radial.mu - mu_exact) / mu_exact;

    auto square = std::make_shared<Mesh>(
        build_mesh(DomainSpec::square_in_square(3.0, 1.0, 0.08)));
    const auto sq_pairs = dirichlet_eigs(square, params, 20);
    double min_badness = 1;
    for (const auto& p : sq_pairs)
        min_badness = std::min(min_badness, p.badness);

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "disc mu=%.4f (rel err %.4f) badness=%.4f; square min "
                  "badness=%.4f",
                  radial.mu, mu_rel, radial.badness, min_badness);
    report(3, "fem eigenvalue cross-check",
           mu_rel < 0.02 && radial.badness < 0.05 && min_badness > 0.2, buf);
}

State wave_state_1d(const Scenario& sc, double t) {
    State s = sc.zero_state();
    s.t = t;
    s.xi = interpolate(s.xi.space, [&](const Vec2& y) {
        Eigen::VectorXd v(1);
        v[0] = std::cos(pi * t) * std::sin(pi * y.x());
        return v;
    });
    s.xi_dot = interpolate(s.xi_dot.space, [&](const Vec2& y) {
        Eigen::VectorXd v(1);
        v[0] = -pi * std::sin(pi * t) * std::sin(pi * y.x());
        return v;
    });
    return s;
}

double oracle_error_1d(int cells, double dt) {
    ScenarioConfig cfg;
    cfg.domain = DomainSpec::interval(-1.0, 1.0, 2.0 / cells);
    cfg.elastic = ElasticParams{0.25, 0.5};  // 2 l1 + l2 = 1
    cfg.dt = dt;
    cfg.t_end = 2.0;
    cfg.stride = 100;
    Scenario sc(cfg);
    const Trajectory traj = sc.run(wave_state_1d(sc, 0.0));
    double max_err = 0;
    for (const State& s : traj.states) {
        const Field exact = wave_state_1d(sc, s.t).xi;
        Field diff{s.xi.space, s.xi.coeffs - exact.coeffs};
        max_err = std::max(max_err, diff.coeffs.lpNorm<Eigen::Infinity>());
    }
    return max_err;
}

void criterion_4() {
    const double e_fine = oracle_error_1d(200, 1e-3);
    const double e_coarse = oracle_error_1d(100, 2e-3);
    const double ratio = e_coarse / e_fine;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max err=%.3e ratio(2dt,2h)=%.2f",
                  e_fine, ratio);
    report(4, "1d oracle", e_fine < 1e-3 && ratio > 3.0 && ratio < 5.0, buf);
}

// criterion 5 returns its trajectory so criterion 8 can reuse the flux
Trajectory criterion_5(ScenarioConfig& cfg_out) {
    ScenarioConfig cfg;
    cfg.domain = DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.12);
    cfg.dt = 2e-3;
    cfg.stride = 25;
    Scenario sc(cfg);
    const auto pairs = dirichlet_eigs(sc.mesh(), cfg.elastic, 10);
    const EigenPair& mode = least_bad(pairs);
    const double a = 1e-2;
    cfg.t_end = 3.0 * 2.0 * pi / std::sqrt(mode.mu);
    Scenario sc2(cfg, sc.mesh());

    State s = sc2.zero_state();
    s.p.coeffs.setConstant(-a * mode.q_fit);
    s.xi.coeffs = a * mode.psi.coeffs;
    const Trajectory traj = sc2.run(s);

    const double e0 = traj.diagnostics.records.front().E;
    double max_u = 0, max_drift = 0, max_resid = 0;
    for (const auto& rec : traj.diagnostics.records) {
        max_u = std::max(max_u, rec.u_H1);
        max_drift = std::max(max_drift, std::abs(rec.E - e0) / e0);
        max_resid = std::max(max_resid, std::abs(rec.energy_residual));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max |u|_H1=%.2e E drift=%.2e residual/E0=%.2e", max_u,
                  max_drift, max_resid / e0);
    report(5, "exact coupled pressure wave",
           max_u <= 1e-6 && max_drift <= 1e-6 && max_resid <= 1e-8 * e0,
           buf);
    cfg_out = cfg;
    return traj;
}

void criterion_6() {
    double worst[3];
    int k = 0;
    for (const double dt : {8e-3, 4e-3, 2e-3}) {
        ScenarioConfig cfg;
        cfg.domain = DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.25);
        cfg.dt = dt;
        cfg.t_end = 0.4;
        Scenario sc(cfg);
        State s = sc.zero_state();
        s.xi = interpolate(s.xi.space, [](const Vec2& y) {
            const double b = std::max(0.0, 1.0 - y.squaredNorm());
            return Eigen::VectorXd(Vec2(0.02 * b * b, -0.01 * b * b));
        });
        const Trajectory traj = sc.run(s);
        double mx = 0;
        for (const double r : energy_residual(sc, traj))
            mx = std::max(mx, std::abs(r));
        worst[k++] = mx;
    }
    const double r1 = worst[0] / worst[1];
    const double r2 = worst[1] / worst[2];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "residuals %.2e/%.2e/%.2e ratios %.2f %.2f",
                  worst[0], worst[1], worst[2], r1, r2);
    report(6, "discrete energy equality order",
           r1 > 2.5 && r1 < 6.0 && r2 > 2.5 && r2 < 6.0, buf);
}

void criterion_7() {
    const ElasticParams params{1.0, 1.0};
    bool ok = true;
    char buf[256];
    std::string detail;

    {  // exact synthetic trajectory
        auto mesh = disc_mesh(0.25);
        const auto pairs = dirichlet_eigs(mesh, params, 10);
        const EigenPair& radial = least_bad(pairs);
        int radial_index = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (&pairs[i] == &radial) radial_index = static_cast<int>(i);
        const NeumannPhi phi = solve_neumann_phi(mesh, params);

        ScenarioConfig cfg;
        cfg.domain = DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), 0.25);
        cfg.dt = 5e-3;
        Scenario sc(cfg);
        const double a = 1e-2, c = 3e-3, om = std::sqrt(radial.mu);
        Trajectory traj;
        traj.config = cfg;
        const int n_steps =
            static_cast<int>(4.0 * 2.0 * pi / om / cfg.dt);
        for (int j = 0; j <= n_steps; ++j) {
            const double t = j * cfg.dt;
            State s = sc.zero_state();
            s.t = t;
            s.xi.coeffs = a * std::cos(om * t) * radial.psi.coeffs +
                          c * phi.phi.coeffs;
            s.xi_dot.coeffs = -a * om * std::sin(om * t) * radial.psi.coeffs;
            traj.states.push_back(std::move(s));
            traj.state_steps.push_back(j);
        }
        const Decomposition dec =
            decompose(traj, pairs, {radial_index}, phi.phi, params);
        const double amp = std::hypot(dec.eta_star.a[0], dec.eta_star.b[0]);
        double max_resid = 0, max_rigid = 0;
        for (const double r : dec.residual_h1)
            max_resid = std::max(max_resid, r);
        for (const RigidMotion& r : dec.rigid_series)
            max_rigid = std::max(max_rigid, r.skew.norm() + r.shift.norm());
        const bool exact_ok = std::abs(dec.phi_n0_coeff - c) <= 1e-6 &&
                              std::abs(amp - a) <= 1e-4 &&
                              max_rigid <= 1e-8 * (a + c) &&
                              max_resid <= 1e-6 * (a + c);
        ok = ok && exact_ok;
        std::snprintf(buf, sizeof(buf),
                      "|phi-coeff - c|=%.2e |amp - a|=%.2e rigid=%.2e "
                      "resid=%.2e",
                      std::abs(dec.phi_n0_coeff - c), std::abs(amp - a),
                      max_rigid, max_resid);
        detail = buf;
    }

    {  // good-domain small-data run: no surviving wave, decaying residual
        ScenarioConfig cfg;
        cfg.domain = DomainSpec::square_in_square(3.0, 1.0, 0.2);
        cfg.dt = 5e-3;
        cfg.t_end = 8.0;
        cfg.stride = 5;
        Scenario sc(cfg);
        const auto pairs = dirichlet_eigs(sc.mesh(), cfg.elastic, 6);
        const NeumannPhi phi = solve_neumann_phi(sc.mesh(), cfg.elastic);
        State s = sc.zero_state();
        s.xi = interpolate(s.xi.space, [](const Vec2& y) {
            const double bx = std::max(0.0, 0.25 - y.x() * y.x());
            const double by = std::max(0.0, 0.25 - y.y() * y.y());
            return Eigen::VectorXd(Vec2(0.3 * bx * by, -0.2 * bx * by));
        });
        const Trajectory traj = sc.run(s);
        // the square is a good domain (criterion 3); fit the least-bad
        // modes anyway and demand they carry nothing
        std::vector<int> fit_modes{0, 1, 2};
        const Decomposition dec =
            decompose(traj, pairs, fit_modes, phi.phi, cfg.elastic);
        double amp = 0;
        for (std::size_t k = 0; k < dec.eta_star.a.size(); ++k)
            amp = std::max(amp, std::hypot(dec.eta_star.a[k],
                                           dec.eta_star.b[k]));
        double noise = 0;
        for (const double r : energy_residual(sc, traj))
            noise = std::max(noise, std::abs(r));
        noise = std::sqrt(noise);  // residual is an energy (squared) scale
        // the remainder oscillates while it decays, so compare window
        // peaks: the last quarter must sit well below the first quarter
        const std::size_t n = dec.residual_h1.size();
        double head = 0, tail = 0;
        for (std::size_t j = 0; j < n / 4; ++j)
            head = std::max(head, dec.residual_h1[j]);
        for (std::size_t j = 3 * n / 4; j < n; ++j)
            tail = std::max(tail, dec.residual_h1[j]);
        const bool decaying = tail <= 0.25 * head;
        const bool good_ok = amp <= 10.0 * noise && decaying;
        ok = ok && good_ok;
        std::snprintf(buf, sizeof(buf),
                      "; good domain: amp=%.2e noise=%.2e resid head=%.2e "
                      "tail=%.2e",
                      amp, noise, head, tail);
        detail += buf;
    }
    report(7, "decomposition theorem", ok, detail.c_str());
}

void criterion_8(const Trajectory& wave_traj, const ScenarioConfig& wave_cfg) {
    const ElasticParams params{1.0, 1.0};
    auto mesh = disc_mesh(0.2);
    SpacePtr solid = make_space(mesh, Family::VectorP2, Region::Solid);
    bool ok = true;
    std::string detail;
    char buf[160];

    {  // rigid projection invariants on random fields
        std::mt19937 rng(99);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const auto& rule = triangle_rule(2);
        double worst_proj = 0, worst_eps = 0;
        for (int trial = 0; trial < 50; ++trial) {
            Field f = make_field(solid);
            for (int i = 0; i < f.coeffs.size(); ++i)
                f.coeffs[i] = gauss(rng);
            const RigidMotion r = project_rigid(f);
            const Field rf = rigid_field(solid, r);
            const RigidMotion r2 = project_rigid(rf);
            worst_proj = std::max(worst_proj, (r2.skew - r.skew).norm() +
                                                  (r2.shift - r.shift).norm());
            for (std::size_t c = 0; c < solid->cells.size(); c += 7)
                worst_eps = std::max(
                    worst_eps,
                    strain_at(rf, static_cast<int>(c), rule[0]).norm());
        }
        ok = ok && worst_proj <= 1e-12 && worst_eps <= 1e-12;
        std::snprintf(buf, sizeof(buf), "P_R idem=%.1e eps(P_R)=%.1e",
                      worst_proj, worst_eps);
        detail += buf;
    }

    {  // two-sided elastic energy bound, d = 2
        const SpMat K = assemble_elastic_stiffness(*solid, params);
        const SpMat E = assemble_strain_stiffness(*solid, 1.0);
        std::mt19937 rng(7);
        std::normal_distribution<double> gauss(0.0, 1.0);
        bool bound_ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd x(solid->n_dofs());
            for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
            const double sig = x.dot(K * x);
            const double eps2 = x.dot(E * x);
            if (sig < 2.0 * 1.0 * eps2 * (1 - 1e-12) ||
                sig > (2.0 * 1.0 + 2 * 1.0) * eps2 * (1 + 1e-12))
                bound_ok = false;
        }
        ok = ok && bound_ok;
        std::snprintf(buf, sizeof(buf), "; energy bound=%d",
                      bound_ok ? 1 : 0);
        detail += buf;
    }

    {  // convection antisymmetry on a projected div-free field
        CompatibleSeed seed;
        seed.u1_spec = boundary_flat_curl;
        const InitialData d =
            construct_compatible(mesh, FluidParams{1.0}, params, seed);
        const double nl2 = norm(d.u1, NormKind::L2);
        const double nh1 = norm(d.u1, NormKind::H1);
        const double pairing =
            convection_load(d.u1, d.u1).dot(d.u1.coeffs);
        const double rel = std::abs(pairing) / (nl2 * nh1 * nh1);
        ok = ok && rel <= 1e-8;
        std::snprintf(buf, sizeof(buf), "; conv antisym=%.2e", rel);
        detail += buf;

        // compatibility checker on the constructed data
        const CompatibilityReport rep =
            check_compatibility(d, mesh, FluidParams{1.0}, params);
        ok = ok && rep.max() <= 1e-8;
        std::snprintf(buf, sizeof(buf), "; compat=%.2e", rep.max());
        detail += buf;
    }

    {  // interface flux along the pressure-wave run of criterion 5
        double mx = 0;
        for (const auto& rec : wave_traj.diagnostics.records)
            mx = std::max(mx, std::abs(rec.interface_flux));
        ok = ok && mx <= 10.0 * wave_cfg.linear_tol;
        std::snprintf(buf, sizeof(buf), "; flux=%.2e", mx);
        detail += buf;
    }

    report(8, "invariant suites", ok, detail.c_str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    ScenarioConfig wave_cfg;
    const Trajectory wave_traj = criterion_5(wave_cfg);
    criterion_6();
    criterion_7();
    criterion_8(wave_traj, wave_cfg);
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures;
}
