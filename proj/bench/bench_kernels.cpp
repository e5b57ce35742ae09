// Throughput of the hot loops: queue kernel (serial vs OpenMP), annealing
// restarts (serial vs OpenMP) and replica sweeps.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fatpipe/anneal.hpp"
#include "fatpipe/queue_kernel.hpp"
#include "fatpipe/runner.hpp"
#include "fatpipe/scenario.hpp"

using namespace fatpipe;

namespace {

struct KernelFixture {
    std::vector<CircuitRuntime> circuits;
    SlotBuffers buffers;

    explicit KernelFixture(std::size_t n)
    {
        circuits.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            circuits[c].circuit = c;
            circuits[c].omega = 3;
            circuits[c].flows.assign(1 + c % 4, 0);
            circuits[c].queues.assign(1 + c % 4, 0.0);
        }
        buffers.resize_for(circuits);
        std::mt19937_64 g(1);
        std::uniform_real_distribution<double> u(0.0, 120.0);
        for (double& a : buffers.arrivals) a = u(g);
    }
};

void BM_KernelSerial(benchmark::State& state)
{
    KernelFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        step_circuits_serial(f.circuits, f.buffers, 1e-4);
        benchmark::DoNotOptimize(f.buffers.transmitted.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KernelParallel(benchmark::State& state)
{
    KernelFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        step_circuits_parallel(f.circuits, f.buffers, 1e-4);
        benchmark::DoNotOptimize(f.buffers.transmitted.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

QuboProblem random_qubo(std::size_t n)
{
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuboProblem q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) q.add(i, j, u(g));
    return q;
}

void BM_AnnealSerial(benchmark::State& state)
{
    const QuboProblem q = random_qubo(static_cast<std::size_t>(state.range(0)));
    AnnealConfig c;
    c.sweeps = 100;
    c.restarts = 8;
    for (auto _ : state) benchmark::DoNotOptimize(anneal_serial(q, c).energy);
}

void BM_AnnealParallel(benchmark::State& state)
{
    const QuboProblem q = random_qubo(static_cast<std::size_t>(state.range(0)));
    AnnealConfig c;
    c.sweeps = 100;
    c.restarts = 8;
    for (auto _ : state) benchmark::DoNotOptimize(anneal_parallel(q, c).energy);
}

void BM_Replicas(benchmark::State& state)
{
    ScenarioSpec spec = parse_scenario_file(std::string(FATPIPE_SOURCE_DIR) + "/scenarios/four_node.json");
    spec.duration_s = 0.5;
    const ScenarioModel model = build_model(spec);
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
    const bool parallel = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(compare_modes(spec, model, seeds, parallel).loss_ratio());
}

}  // namespace

BENCHMARK(BM_KernelSerial)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_KernelParallel)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_AnnealSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_AnnealParallel)->Arg(64)->Arg(256);
BENCHMARK(BM_Replicas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
