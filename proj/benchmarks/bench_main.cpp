#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scbicm/channel.hpp"
#include "scbicm/density_evolution.hpp"
#include "scbicm/lifting.hpp"
#include "scbicm/protograph.hpp"
#include "scbicm/rng.hpp"
#include "scbicm/simulator.hpp"

namespace {

using namespace scbicm;

SingleChainParams chain_params() {
    return {};  // (3,6,10,2)
}

const Protograph& loop_graph() {
    static Protograph g = build_loop_connected(chain_params());
    return g;
}

void BM_BitChannelCapacities(benchmark::State& state) {
    auto cons = LabeledConstellation::qam16_gray();
    for (auto _ : state)
        benchmark::DoNotOptimize(bit_channel_capacities(cons, 5.0, state.range(0)));
}
BENCHMARK(BM_BitChannelCapacities)->Arg(16)->Arg(64)->Arg(128);

void BM_RunDE(benchmark::State& state) {
    DEGraph de(loop_graph());
    std::vector<double> eps(loop_graph().vn_count(), 0.515);  // below threshold
    for (auto _ : state)
        benchmark::DoNotOptimize(de.run(eps));
}
BENCHMARK(BM_RunDE);

void BM_ThresholdScalar(benchmark::State& state) {
    DEGraph de(build_single_chain(chain_params()));
    for (auto _ : state)
        benchmark::DoNotOptimize(threshold_scalar(de));
}
BENCHMARK(BM_ThresholdScalar);

void BM_CanonicalForm(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(loop_graph().canonical_form());
}
BENCHMARK(BM_CanonicalForm);

void BM_Lift(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(lift(loop_graph(), static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_Lift)->Arg(100)->Arg(500);

void BM_BpDecode(benchmark::State& state) {
    LiftedCode code = lift(loop_graph(), 100, 1);
    BpDecoder dec(code);
    auto eng = make_engine(33, 0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> llr(code.n);
    for (auto& v : llr) v = 2.0 + noise(eng);  // mostly-correct all-zero word
    std::vector<std::uint8_t> hard;
    for (auto _ : state)
        benchmark::DoNotOptimize(dec.decode(llr, static_cast<int>(state.range(0)), hard));
}
BENCHMARK(BM_BpDecode)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
