// Copyright 2026 The RQML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts, and the serial
// ensemble driver against the parallel one.

#include <benchmark/benchmark.h>

#include <vector>

#include "rqml/experiments.hpp"
#include "rqml/kernels.hpp"
#include "rqml/rng.hpp"

namespace {

using rqml::Complex;

std::vector<Complex> composite(std::size_t d) {
    rqml::Rng rng = rqml::make_rng(7, rqml::Stream::Nature);
    std::vector<Complex> v(2 * d * d);
    for (auto& z : v) z = Complex(rqml::uniform(rng, -1, 1), rqml::uniform(rng, -1, 1));
    return v;
}

template <void (*Kernel)(std::span<Complex>, std::size_t)>
void bm_cswap(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    auto v = composite(d);
    for (auto _ : state) {
        Kernel(v, d);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

template <void (*Kernel)(std::span<Complex>, const rqml::kernels::Gate2&)>
void bm_hadamard(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    auto v = composite(d);
    const auto h = rqml::kernels::hadamard_gate();
    for (auto _ : state) {
        Kernel(v, h);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

template <void (*Kernel)(std::span<Complex>, std::size_t, const Eigen::MatrixXcd&)>
void bm_controlled_t(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    auto v = composite(d);
    const Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (auto _ : state) {
        Kernel(v, d, t);
        benchmark::DoNotOptimize(v.data());
    }
}

rqml::EnsembleConfig ensemble(std::size_t runs) {
    rqml::EnsembleConfig e;
    e.session.n_l = 50;
    e.runs = runs;
    e.seed = 1;
    return e;
}

void bm_ensemble_serial(benchmark::State& state) {
    const auto cfg = ensemble(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rqml::run_ensemble_serial(cfg).n_bar_sim);
}

void bm_ensemble_omp(benchmark::State& state) {
    const auto cfg = ensemble(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rqml::run_ensemble(cfg).n_bar_sim);
}

}  // namespace

BENCHMARK(bm_cswap<rqml::kernels::serial::controlled_swap>)->Name("cswap/serial")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(bm_cswap<rqml::kernels::omp::controlled_swap>)->Name("cswap/omp")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(bm_hadamard<rqml::kernels::serial::apply_ref_gate>)->Name("ref_gate/serial")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(bm_hadamard<rqml::kernels::omp::apply_ref_gate>)->Name("ref_gate/omp")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(bm_controlled_t<rqml::kernels::serial::controlled_first_factor>)->Name("controlled_t/serial")->RangeMultiplier(4)->Range(4, 64);
BENCHMARK(bm_controlled_t<rqml::kernels::omp::controlled_first_factor>)->Name("controlled_t/omp")->RangeMultiplier(4)->Range(4, 64);
BENCHMARK(bm_ensemble_serial)->Name("ensemble/serial")->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ensemble_omp)->Name("ensemble/omp")->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
