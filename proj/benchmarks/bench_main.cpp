#include <benchmark/benchmark.h>

#include <memory>

#include "pageopt/estimator.hpp"
#include "pageopt/matrix.hpp"
#include "pageopt/optimizer.hpp"
#include "pageopt/problems.hpp"
#include "pageopt/random.hpp"
#include "pageopt/theory.hpp"

namespace {

using namespace pageopt;

std::shared_ptr<SharedCurvatureQuadratic> bench_quadratic(std::size_t d, std::size_t n) {
    RandomSource rng(42);
    return make_shared_curvature_quadratic(rng, d, n, 1.0);
}

Vector bench_point(std::size_t d) {
    RandomSource rng(7);
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.normal();
    return x;
}

void bm_component_gradient(benchmark::State& state) {
    auto problem = bench_quadratic(static_cast<std::size_t>(state.range(0)), 16);
    Vector x = bench_point(problem->dim());
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(problem->component_gradient(i, x));
        i = (i + 1) % problem->component_count();
    }
}
BENCHMARK(bm_component_gradient)->Arg(16)->Arg(64)->Arg(256);

void bm_full_gradient(benchmark::State& state) {
    auto problem = bench_quadratic(32, static_cast<std::size_t>(state.range(0)));
    Vector x = bench_point(problem->dim());
    for (auto _ : state) benchmark::DoNotOptimize(problem->full_gradient(x));
}
BENCHMARK(bm_full_gradient)->Arg(64)->Arg(1024);

void bm_estimator_step(benchmark::State& state) {
    auto problem = bench_quadratic(32, 1024);
    /* p sets the refresh rate: 0 exercises corrections, 1 exercises refreshes */
    double p = state.range(0) == 0 ? 1e-9 : 1.0;
    EstimatorParams params{256, 16, p};
    RandomSource rng(3);
    Vector x = bench_point(problem->dim());
    Vector x_next = x + 0.01 * problem->full_gradient(x);
    EstimatorState est = make_initial_estimate(*problem, params, x, rng);
    for (auto _ : state) {
        estimator_step(est, *problem, params, x_next, rng);
        std::swap(x, x_next);
    }
}
BENCHMARK(bm_estimator_step)->Arg(0)->Arg(1);

void bm_full_run(benchmark::State& state) {
    auto problem = bench_quadratic(16, 256);
    PageConfig cfg;
    cfg.params = EstimatorParams{256, 16, theory::default_probability(256, 16)};
    cfg.eta = theory::stepsize_max(problem->constants().smoothness, cfg.params.p, 16);
    cfg.iters = static_cast<std::size_t>(state.range(0));
    cfg.seed = 11;
    for (auto _ : state) benchmark::DoNotOptimize(run_page(*problem, cfg));
}
BENCHMARK(bm_full_run)->Arg(100)->Arg(1000);

void bm_power_iteration(benchmark::State& state) {
    std::size_t d = static_cast<std::size_t>(state.range(0));
    RandomSource rng(5);
    Vector eigs(d);
    for (std::size_t i = 0; i < d; ++i) eigs[i] = rng.uniform(0.5, 2.0);
    Matrix m = symmetric_from_spectrum(random_orthogonal(rng, d), eigs);
    for (auto _ : state) {
        RandomSource local(9);
        benchmark::DoNotOptimize(power_iteration_lmax(m, local));
    }
}
BENCHMARK(bm_power_iteration)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
