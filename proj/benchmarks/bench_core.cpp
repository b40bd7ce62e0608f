// Micro-benchmarks for the hot kernels: subspace intersection, the triple
// index, stable/unstable frame evolution, and the discretized inertia count.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>

#include "maslov/bundle_evolution.hpp"
#include "maslov/linearized.hpp"
#include "maslov/spectral_count.hpp"
#include "maslov/symplectic.hpp"

using namespace maslov;
using Eigen::MatrixXd;

namespace {

symp::LagrangianFrame frame4(const symp::SymplecticSpace& sp, double a, double b) {
    MatrixXd Z(4, 2);
    Z << 1, 0, 0, 1, std::cos(a), std::sin(b), -std::sin(b), std::cos(a);
    return symp::LagrangianFrame(sp, Z);
}

// Reflectionless-well test bundle: B(xi) = beta + A sech^2(kappa xi).
model::LinearizedBundle pulse_bundle() {
    symp::SymplecticSpace sp(1, 1);
    auto B = [](double xi) {
        double s = 1.0 / std::cosh(2.0 * xi);
        MatrixXd M(1, 1);
        M << -1.0 + 10.0 * s * s;
        return M;
    };
    MatrixXd Binf(1, 1);
    Binf << -1.0;
    return model::LinearizedBundle::synthetic(sp, 1.0, B, Binf, Binf, 10.0);
}

void BM_IntersectSubspaces(benchmark::State& state) {
    symp::SymplecticSpace sp(2, 1);
    auto L1 = frame4(sp, 0.3, 0.3);
    auto L2 = frame4(sp, 1.1, -0.4);
    for (auto _ : state) {
        auto r = symp::intersection(sp, L1, L2);
        benchmark::DoNotOptimize(r.dim);
    }
}
BENCHMARK(BM_IntersectSubspaces);

void BM_TripleIndex(benchmark::State& state) {
    symp::SymplecticSpace sp(2, 1);
    auto a = frame4(sp, 0.0, 0.0);
    auto b = frame4(sp, 0.7, 0.2);
    auto k = frame4(sp, -0.5, 1.3);
    for (auto _ : state) {
        int i = symp::triple_index(sp, a, b, k);
        benchmark::DoNotOptimize(i);
    }
}
BENCHMARK(BM_TripleIndex);

void BM_EvolveFrames(benchmark::State& state) {
    auto bundle = pulse_bundle();
    for (auto _ : state) {
        auto tr = bundle::evolve_frames(bundle, 0.3, 6.0, 101);
        benchmark::DoNotOptimize(tr.max_isotropy_defect);
    }
}
BENCHMARK(BM_EvolveFrames);

void BM_NegativeCountS(benchmark::State& state) {
    auto bundle = pulse_bundle();
    for (auto _ : state) {
        int n = spectral::negative_count_S(bundle, 0.5, 10.0, 600);
        benchmark::DoNotOptimize(n);
    }
}
BENCHMARK(BM_NegativeCountS);

}  // namespace

BENCHMARK_MAIN();
