#include <benchmark/benchmark.h>

#include <map>

#include "fsiwave/bessel.hpp"
#include "fsiwave/elasticity.hpp"
#include "fsiwave/fluid.hpp"
#include "fsiwave/solver.hpp"

using namespace fsiwave;

namespace {

std::shared_ptr<const Mesh> disc_mesh(double h) {
    static std::map<double, std::shared_ptr<const Mesh>> cache;
    auto it = cache.find(h);
    if (it == cache.end())
        it = cache.emplace(h, std::make_shared<Mesh>(build_mesh(
                                  DomainSpec::disc_in_square(
                                      4.0, 1.0, Vec2::Zero(), h))))
                 .first;
    return it->second;
}

void BM_BesselRoots(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            spherical_bessel_roots(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BesselRoots)->Arg(2)->Arg(10);

void BM_BuildMesh(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_mesh(
            DomainSpec::disc_in_square(4.0, 1.0, Vec2::Zero(), h)));
}
BENCHMARK(BM_BuildMesh)->Arg(4)->Arg(8)->Arg(16);

void BM_AssembleCoupled(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    auto mesh = disc_mesh(h);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            assemble_coupled(mesh, FluidParams{1.0}, ElasticParams{1.0, 1.0}));
}
BENCHMARK(BM_AssembleCoupled)->Arg(4)->Arg(8);

void BM_SolverStep(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.domain = DomainSpec::disc_in_square(
        4.0, 1.0, Vec2::Zero(), 1.0 / static_cast<double>(state.range(0)));
    cfg.dt = 5e-3;
    Scenario sc(cfg);
    State s = sc.zero_state();
    s.xi = interpolate(s.xi.space, [](const Vec2& y) {
        const double b = std::max(0.0, 1.0 - y.squaredNorm());
        return Eigen::VectorXd(Vec2(0.01 * b * b, 0.0));
    });
    s = sc.step(s);  // warm the factorization cache
    for (auto _ : state) benchmark::DoNotOptimize(s = sc.step(s));
}
BENCHMARK(BM_SolverStep)->Arg(4)->Arg(8);

void BM_DirichletEigs(benchmark::State& state) {
    auto mesh = disc_mesh(0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            dirichlet_eigs(mesh, ElasticParams{1.0, 1.0},
                           static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DirichletEigs)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
