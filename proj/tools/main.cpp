#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "fsiwave/asymptotics.hpp"
#include "fsiwave/ball_mode.hpp"
#include "fsiwave/bessel.hpp"
#include "fsiwave/elasticity.hpp"
#include "fsiwave/initdata.hpp"
#include "fsiwave/io.hpp"
#include "fsiwave/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fsiwave;

namespace {

constexpr const char* kVersion = "0.1.0";

void error_line(const std::string& kind, const std::string& what) {
    json j;
    j["error"] = kind;
    j["what"] = what;
    std::cerr << j.dump() << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("malformed JSON in ") + path + ": " +
                          e.what());
    }
    return j;
}

DomainSpec parse_domain(const json& j) {
    if (!j.contains("kind")) throw InvalidSpec("domain: missing key 'kind'");
    const std::string kind = j.at("kind");
    const double h = j.value("h", 0.1);
    if (kind == "interval")
        return DomainSpec::interval(j.value("a", -1.0), j.value("b", 1.0), h);
    if (kind == "disc_in_square")
        return DomainSpec::disc_in_square(
            j.value("L", 4.0), j.value("R", 1.0),
            Vec2(j.value("cx", 0.0), j.value("cy", 0.0)), h);
    if (kind == "disc_in_disc")
        return DomainSpec::disc_in_disc(j.value("R_out", 2.0),
                                        j.value("R_in", 1.0), h);
    if (kind == "square_in_square")
        return DomainSpec::square_in_square(j.value("L_out", 3.0),
                                            j.value("L_in", 1.0), h);
    if (kind == "ball_analytic")
        return DomainSpec::ball_analytic(j.value("radius", 1.0));
    throw InvalidSpec("domain: unknown kind '" + kind + "'");
}

struct ScenarioFile {
    ScenarioConfig config;
    json seed;
    int analysis_modes = 20;
    double analysis_threshold = 0.1;
    std::string output_dir;
};

ScenarioFile parse_scenario(const std::string& path) {
    const json j = load_json(path);
    ScenarioFile s;
    if (!j.contains("domain")) throw InvalidSpec("scenario: missing 'domain'");
    s.config.domain = parse_domain(j.at("domain"));
    if (j.contains("fluid"))
        s.config.fluid.nu = j.at("fluid").value("nu", 1.0);
    if (j.contains("elastic")) {
        s.config.elastic.lambda1 = j.at("elastic").value("lambda1", 1.0);
        s.config.elastic.lambda2 = j.at("elastic").value("lambda2", 1.0);
    }
    if (j.contains("time")) {
        const json& t = j.at("time");
        s.config.dt = t.value("dt", 1e-2);
        s.config.t_end = t.value("t_end", 1.0);
        s.config.stride = t.value("stride", 1);
        s.config.picard_tol = t.value("picard_tol", 1e-10);
        s.config.picard_max = t.value("picard_max", 50);
        s.config.convection = t.value("convection", true);
    }
    s.seed = j.value("seed", json{{"kind", "zero"}});
    if (j.contains("analysis")) {
        s.analysis_modes = j.at("analysis").value("modes", 20);
        s.analysis_threshold = j.at("analysis").value("threshold", 0.1);
    }
    s.output_dir = j.value("output_dir", "out");
    return s;
}

/// Smooth divergence-free-ish seed; the constructor projects it exactly.
Eigen::VectorXd bump_curl(const Vec2& y) {
    const double r2 = y.squaredNorm();
    const double e = std::exp(-r2);
    // curl of psi = x^2 y^2 exp(-r^2)
    const double px = y.x() * y.y() * y.y() * e * (2.0 - 2.0 * y.x() * y.x());
    const double py = y.x() * y.x() * y.y() * e * (2.0 - 2.0 * y.y() * y.y());
    return Eigen::Vector2d(py, -px);
}

Eigen::VectorXd bump_xi2(const Vec2& y) {
    return Eigen::Vector2d(std::sin(y.x()) * std::cos(y.y()),
                           -std::cos(y.x()) * std::sin(y.y()));
}

/// Initial data for the given seed spec: either the compatible-data
/// constructor or the exact discrete pressure-wave mode.
InitialData build_initial_data(const ScenarioFile& s,
                               std::shared_ptr<const Mesh> mesh,
                               json* seed_info) {
    const std::string kind = s.seed.value("kind", "zero");
    const double amp = s.seed.value("amplitude", 0.0);
    if (kind == "zero") {
        CompatibleSeed seed;
        return construct_compatible(mesh, s.config.fluid, s.config.elastic,
                                    seed);
    }
    if (kind == "bump") {
        CompatibleSeed seed;
        seed.amplitude = amp;
        seed.u1_spec = bump_curl;
        seed.xi2_spec = bump_xi2;
        return construct_compatible(mesh, s.config.fluid, s.config.elastic,
                                    seed);
    }
    if (kind == "pressure_wave") {
        const int n_modes = s.seed.value("modes", 12);
        const auto cls = classify_domain(mesh, s.config.elastic, n_modes,
                                         s.seed.value("threshold", 0.5));
        if (cls.offenders.empty())
            throw InvalidSpec("seed pressure_wave: no near-overdetermined "
                              "mode among the first " +
                              std::to_string(n_modes));
        const BadMode& best = *std::min_element(
            cls.offenders.begin(), cls.offenders.end(),
            [](const BadMode& a, const BadMode& b) {
                return a.badness < b.badness;
            });
        const EigenPair& pair = cls.pairs[best.k - 1];
        SpacePtr fluid = make_space(mesh, Family::VectorP2, Region::Fluid);
        SpacePtr press = make_space(mesh, Family::ScalarP1, Region::Fluid);
        InitialData d;
        d.u0 = make_field(fluid);
        d.u1 = make_field(fluid);
        d.p0 = make_field(press);
        d.p0.coeffs.setConstant(-amp * pair.q_fit);
        d.xi0 = pair.psi;
        d.xi0.coeffs *= amp;
        d.xi1 = make_field(pair.psi.space);
        d.xi2 = pair.psi;
        d.xi2.coeffs *= -amp * pair.mu;
        if (seed_info) {
            (*seed_info)["mode_index"] = best.k;
            (*seed_info)["mu"] = pair.mu;
            (*seed_info)["q_fit"] = pair.q_fit;
            (*seed_info)["badness"] = pair.badness;
            (*seed_info)["amplitude"] = amp;
        }
        return d;
    }
    if (kind == "wave_1d") {
        // the exact 1d standing wave at t = 0
        CompatibleSeed seed;
        InitialData d = construct_compatible(mesh, s.config.fluid,
                                             s.config.elastic, seed);
        const double pi = 3.14159265358979323846;
        const double a = amp == 0.0 ? 1.0 : amp;
        d.xi0 = interpolate(d.xi0.space, [&](const Vec2& y) {
            Eigen::VectorXd v(1);
            v[0] = a * std::sin(pi * y.x());
            return v;
        });
        d.xi2 = interpolate(d.xi2.space, [&](const Vec2& y) {
            Eigen::VectorXd v(1);
            v[0] = -a * pi * pi * std::sin(pi * y.x());
            return v;
        });
        return d;
    }
    throw InvalidSpec("seed: unknown kind '" + kind + "'");
}

int cmd_run(const std::string& scenario_path) {
    const ScenarioFile s = parse_scenario(scenario_path);
    fs::create_directories(s.output_dir);
    Scenario sc(s.config);
    save_mesh(*sc.mesh(), s.output_dir + "/mesh.json");
    {
        std::ifstream src(scenario_path, std::ios::binary);
        std::ofstream dst(s.output_dir + "/scenario.json", std::ios::binary);
        dst << src.rdbuf();
    }
    json seed_info;
    const InitialData data = build_initial_data(s, sc.mesh(), &seed_info);
    const CompatibilityReport rep =
        check_compatibility(data, sc.mesh(), s.config.fluid, s.config.elastic);

    State init = sc.zero_state();
    init.u = data.u0;
    init.p = data.p0;
    init.xi = data.xi0;
    init.xi_dot = data.xi1;
    const Trajectory traj = sc.run(init);

    save_diagnostics_csv(traj.diagnostics, s.output_dir + "/diagnostics.csv");
    save_trajectory_states(traj, s.output_dir + "/state");

    const SmallDataReport small =
        small_data_report(sc, init, data.u1, data.xi2);
    json out;
    out["seed"] = seed_info;
    out["compatibility_max_residual"] = rep.max();
    out["E0"] = small.E0;
    out["K0"] = small.K0;
    out["margin_E"] = small.margin_E;
    out["margin_K"] = small.margin_K;
    out["small_regime"] = small.small_regime;
    out["steps"] = traj.diagnostics.records.size() - 1;
    out["stored_states"] = traj.states.size();
    std::ofstream manifest(s.output_dir + "/run.json");
    manifest << out.dump(2) << "\n";
    std::cout << "run: " << traj.diagnostics.records.size() - 1
              << " steps, E(0) = " << format_double(small.E0)
              << ", E(end) = "
              << format_double(traj.diagnostics.records.back().E) << "\n";
    return 0;
}

int cmd_eigs(const std::string& scenario_path, int modes) {
    const ScenarioFile s = parse_scenario(scenario_path);
    fs::create_directories(s.output_dir);
    auto mesh = std::make_shared<Mesh>(build_mesh(s.config.domain));
    const auto pairs =
        dirichlet_eigs(mesh, s.config.elastic,
                       modes >= 0 ? modes : s.analysis_modes);
    save_eigen_report(pairs, s.output_dir + "/eigs.csv");
    for (std::size_t k = 0; k < pairs.size(); ++k)
        std::cout << "mode " << k + 1 << ": mu = "
                  << format_double(pairs[k].mu)
                  << ", badness = " << format_double(pairs[k].badness)
                  << "\n";
    return 0;
}

int cmd_classify(const std::string& scenario_path, int modes,
                 double threshold) {
    const ScenarioFile s = parse_scenario(scenario_path);
    fs::create_directories(s.output_dir);
    auto mesh = std::make_shared<Mesh>(build_mesh(s.config.domain));
    const int n = modes >= 0 ? modes : s.analysis_modes;
    const double tau = threshold >= 0 ? threshold : s.analysis_threshold;
    const Classification cls =
        classify_domain(mesh, s.config.elastic, n, tau);
    save_eigen_report(cls.pairs, s.output_dir + "/eigs.csv");
    json j;
    j["verdict"] = cls.bad ? "Bad" : "Good";
    j["threshold"] = tau;
    j["bad_modes"] = json::array();
    for (const BadMode& m : cls.offenders)
        j["bad_modes"].push_back({{"k", m.k},
                                  {"mu", m.mu},
                                  {"q_fit", m.q_fit},
                                  {"badness", m.badness}});
    std::ofstream out(s.output_dir + "/classification.json");
    out << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_pressure_wave(int index, double radius, double l1, double l2,
                      int samples, const std::string& out_path) {
    ElasticParams params{l1, l2};
    const AnalyticBallMode mode = ball_pressure_wave(index, radius, params);
    save_analytic_mode_csv(mode, samples, out_path);
    json j;
    j["index"] = mode.index;
    j["radius"] = mode.radius;
    j["root"] = mode.root;
    j["mu"] = mode.mu;
    j["q"] = mode.q;
    j["badness_sampled"] = ball_badness(mode, 2000);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_make_data(const std::string& scenario_path) {
    const ScenarioFile s = parse_scenario(scenario_path);
    const std::string dir = s.output_dir + "/initdata";
    fs::create_directories(dir);
    auto mesh = std::make_shared<Mesh>(build_mesh(s.config.domain));
    save_mesh(*mesh, s.output_dir + "/mesh.json");
    json seed_info;
    const InitialData data = build_initial_data(s, mesh, &seed_info);
    const CompatibilityReport rep =
        check_compatibility(data, mesh, s.config.fluid, s.config.elastic);
    save_initial_data(data, rep, dir, scenario_path);
    std::cout << "make-data: max residual = " << format_double(rep.max())
              << "\n";
    return 0;
}

int cmd_analyze(const std::string& run_dir) {
    if (!fs::exists(run_dir + "/scenario.json") ||
        !fs::exists(run_dir + "/mesh.json"))
        throw MissingArtifacts("analyze: " + run_dir +
                               " is not a run directory (missing "
                               "scenario.json/mesh.json)");
    const ScenarioFile s = parse_scenario(run_dir + "/scenario.json");
    auto mesh = std::make_shared<Mesh>(load_mesh(run_dir + "/mesh.json"));
    Scenario sc(s.config, mesh);

    // stored steps from the snapshot file names
    std::vector<int> steps;
    for (const auto& e : fs::directory_iterator(run_dir)) {
        const std::string name = e.path().filename().string();
        const std::string pre = "state_xi_";
        if (name.rfind(pre, 0) == 0 && name.rfind("state_xi_dot_", 0) != 0 &&
            name.size() > pre.size() + 4 &&
            name.substr(name.size() - 4) == ".csv")
            steps.push_back(std::stoi(
                name.substr(pre.size(), name.size() - pre.size() - 4)));
    }
    std::sort(steps.begin(), steps.end());
    if (steps.empty())
        throw MissingArtifacts("analyze: no state snapshots in " + run_dir);

    Trajectory traj;
    traj.config = s.config;
    char buf[32];
    for (const int step : steps) {
        std::snprintf(buf, sizeof(buf), "%06d", step);
        const std::string tag(buf);
        State st = sc.zero_state();
        st.t = step * s.config.dt;
        st.u.coeffs = load_field_csv(run_dir + "/state_u_" + tag + ".csv",
                                     st.u.space->n_dofs());
        if (st.p.space->n_dofs() > 0)
            st.p.coeffs = load_field_csv(run_dir + "/state_p_" + tag + ".csv",
                                         st.p.space->n_dofs());
        st.xi.coeffs = load_field_csv(run_dir + "/state_xi_" + tag + ".csv",
                                      st.xi.space->n_dofs());
        st.xi_dot.coeffs =
            load_field_csv(run_dir + "/state_xi_dot_" + tag + ".csv",
                           st.xi_dot.space->n_dofs());
        traj.states.push_back(std::move(st));
        traj.state_steps.push_back(step);
    }

    const Classification cls = classify_domain(
        mesh, s.config.elastic, s.analysis_modes, s.analysis_threshold);
    std::vector<int> bad;
    for (const BadMode& m : cls.offenders) bad.push_back(m.k - 1);
    const NeumannPhi phi = solve_neumann_phi(mesh, s.config.elastic);

    const Decomposition dec =
        decompose(traj, cls.pairs, bad, phi.phi, s.config.elastic);
    save_decomposition_report(dec, run_dir + "/decomposition.json",
                              run_dir + "/residuals.csv");

    // shifted-difference distances at a quarter-span shift
    const int quarter = std::max(1, static_cast<int>(traj.states.size()) / 4);
    const double t0 =
        (traj.state_steps[quarter] - traj.state_steps[0]) * s.config.dt;
    const ShiftSeries shift =
        shift_difference(traj, t0, cls.pairs, bad, s.config.elastic);
    {
        CsvWriter csv(run_dir + "/shift_distance.csv",
                      {"t", "distance", "xi_tilde_H1"});
        for (std::size_t j = 0; j < shift.times.size(); ++j)
            csv.row({shift.times[j], shift.distance[j],
                     norm(shift.xi_tilde[j], NormKind::H1)});
    }
    std::cout << "analyze: " << traj.states.size() << " snapshots, "
              << bad.size() << " bad mode(s), phi_N0 coefficient = "
              << format_double(dec.phi_n0_coeff) << "\n";
    return 0;
}

int cmd_oracle_1d(double t0, double t1, double dt, int nx,
                  const std::string& out_path) {
    if (dt <= 0 || nx < 2) throw InvalidArgument("oracle-1d: dt > 0, nx >= 2");
    CsvWriter csv(out_path, {"t", "x", "eta", "q"});
    for (double t = t0; t <= t1 + 1e-12; t += dt)
        for (int i = 0; i <= nx; ++i) {
            const double x = -1.0 + 2.0 * i / nx;
            const auto [eta, q] = oracle_wave_1d(t, x);
            csv.row({t, x, eta, q});
        }
    std::cout << "oracle-1d: wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("FSIW_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(threads)));

    CLI::App app{"fsiwave: fluid-structure interaction wave toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string scenario, run_dir, out_path = "mode.csv";
    int modes = -1, index = 1, samples = 1000, nx = 50;
    double threshold = -1.0, radius = 1.0, l1 = 1.0, l2 = 1.0;
    double t0 = 0.0, t1 = 2.0, dt = 0.1;

    auto* run = app.add_subcommand("run", "time-integrate a scenario");
    run->add_option("scenario", scenario, "scenario JSON")->required();

    auto* eigs = app.add_subcommand("eigs", "Dirichlet eigenmodes of the "
                                            "solid");
    eigs->add_option("scenario", scenario)->required();
    eigs->add_option("--modes", modes, "number of modes");

    auto* classify =
        app.add_subcommand("classify", "good/bad domain verdict");
    classify->add_option("scenario", scenario)->required();
    classify->add_option("--modes", modes);
    classify->add_option("--threshold", threshold);

    auto* pw = app.add_subcommand("pressure-wave",
                                  "dump the analytic ball mode");
    pw->add_option("--index", index);
    pw->add_option("--radius", radius);
    pw->add_option("--lambda1", l1);
    pw->add_option("--lambda2", l2);
    pw->add_option("--samples", samples);
    pw->add_option("--out", out_path);

    auto* mk = app.add_subcommand("make-data", "construct compatible "
                                               "initial data");
    mk->add_option("scenario", scenario)->required();

    auto* an = app.add_subcommand("analyze", "decompose a finished run");
    an->add_option("run_dir", run_dir)->required();

    auto* orc = app.add_subcommand("oracle-1d", "tabulate the exact 1d "
                                                "standing wave");
    orc->add_option("--t0", t0);
    orc->add_option("--t1", t1);
    orc->add_option("--dt", dt);
    orc->add_option("--nx", nx);
    orc->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) return cmd_run(scenario);
        if (eigs->parsed()) return cmd_eigs(scenario, modes);
        if (classify->parsed()) return cmd_classify(scenario, modes,
                                                    threshold);
        if (pw->parsed())
            return cmd_pressure_wave(index, radius, l1, l2, samples,
                                     out_path);
        if (mk->parsed()) return cmd_make_data(scenario);
        if (an->parsed()) return cmd_analyze(run_dir);
        if (orc->parsed()) return cmd_oracle_1d(t0, t1, dt, nx, out_path);
    } catch (const BlowUp& e) {
        error_line("BlowUp", e.what());
        return 2;
    } catch (const Error& e) {
        error_line("Error", e.what());
        return 1;
    } catch (const std::exception& e) {
        error_line("Exception", e.what());
        return 1;
    }
    return 1;
}
