#include "rowswarm/commnet.hpp"
#include "rowswarm/episode.hpp"
#include "rowswarm/rng.hpp"
#include "rowswarm/sensing.hpp"
#include "rowswarm/world.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace rowswarm;

WorldConfig bench_config(int n) {
    WorldConfig cfg;
    cfg.n_agents = n;
    cfg.avg_gap = 12.0;
    cfg.motor_noise_rel = 0.0;
    return cfg;
}

void bm_step_world(benchmark::State& state) {
    WorldConfig cfg = bench_config(static_cast<int>(state.range(0)));
    WorldState world = spawn_world(cfg, 1);
    std::vector<double> speeds(world.n(), 1.0);
    for (auto _ : state) {
        step_world(world, speeds);
        benchmark::DoNotOptimize(world.agents.front().x);
    }
}
BENCHMARK(bm_step_world)->Arg(5)->Arg(10)->Arg(50);

void bm_sensor_frame(benchmark::State& state) {
    WorldConfig cfg = bench_config(static_cast<int>(state.range(0)));
    WorldState world = spawn_world(cfg, 1);
    SensorModel model;
    std::vector<double> tx(world.n(), 0.5);
    for (auto _ : state) {
        auto events = exchange_comm(world, tx, model);
        for (int i = 0; i < world.n(); ++i) {
            SensorFrame frame;
            frame.prox_values = read_prox_values(world, i, model);
            auto comm = flatten_events(events[static_cast<std::size_t>(i)]);
            frame.prox_comm = comm.prox_comm;
            benchmark::DoNotOptimize(frame.prox_comm[0]);
        }
    }
}
BENCHMARK(bm_sensor_frame)->Arg(5)->Arg(10)->Arg(50);

void bm_mlp_forward(benchmark::State& state) {
    MlpParams params = make_mlp(Arch::single_comm, 16, 3);
    std::vector<double> input(16, 0.25);
    for (auto _ : state) {
        ForwardTape tape = forward(params, input);
        benchmark::DoNotOptimize(tape.output[0]);
    }
}
BENCHMARK(bm_mlp_forward);

void bm_commnet_unroll_backward(benchmark::State& state) {
    MlpParams params = make_mlp(Arch::single_comm, 16, 4);
    auto rng = make_rng(4);
    SequenceSample sample;
    sample.n_agents = 10;
    sample.n_slots = 10;
    sample.mask.assign(10, 1);
    sample.mask.front() = 0;
    sample.mask.back() = 0;
    for (int t = 0; t < seq_len; ++t) {
        sample.sensing[t].assign(10, std::vector<double>(14, 0.1));
        sample.targets[t].assign(10, 0.5);
    }
    std::vector<double> comm = make_init_comm(10, rng);
    for (auto _ : state) {
        UnrollResult result = commnet_unroll(params, sample, comm);
        Grads grads = zero_grads(params);
        std::array<std::vector<double>, seq_len> d_primary;
        for (int t = 0; t < seq_len; ++t) d_primary[t].assign(10, 1.0);
        commnet_backward(params, sample, result, d_primary, grads);
        benchmark::DoNotOptimize(grads.layers[0].bias[0]);
    }
}
BENCHMARK(bm_commnet_unroll_backward);

void bm_expert_episode(benchmark::State& state) {
    WorldConfig cfg = bench_config(8);
    ControllerSpec spec;
    for (auto _ : state) {
        WorldState world = spawn_world(cfg, 7);
        RunLog log = run_episode(world, spec, cfg.max_steps);
        benchmark::DoNotOptimize(log.converged);
    }
}
BENCHMARK(bm_expert_episode);

} // namespace

BENCHMARK_MAIN();
