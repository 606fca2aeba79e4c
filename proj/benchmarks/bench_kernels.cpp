#include <benchmark/benchmark.h>

#include "treeglass/couplings.hpp"
#include "treeglass/electrical.hpp"
#include "treeglass/flow_cut.hpp"
#include "treeglass/groundstate.hpp"

using namespace treeglass;

namespace {

void BM_MaxFlowBinary(benchmark::State& state) {
    const auto depth = static_cast<unsigned>(state.range(0));
    const Tree t = generate(TreeSpec::b_ary(2, depth));
    const EdgeWeights cap = sample_couplings(t, DistributionSpec::exponential(1), 1);
    std::vector<double> scratch;
    for (auto _ : state) benchmark::DoNotOptimize(max_flow(t, cap, depth, scratch));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.edge_count()));
}
BENCHMARK(BM_MaxFlowBinary)->Arg(10)->Arg(16)->Arg(20);

void BM_ConductanceSquare(benchmark::State& state) {
    const auto depth = static_cast<unsigned>(state.range(0));
    const Tree t = generate(TreeSpec::square_profile(depth));
    const EdgeWeights one(t, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(effective_conductance(t, one, depth));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.edge_count()));
}
BENCHMARK(BM_ConductanceSquare)->Arg(40)->Arg(128);

void BM_SampleCouplings(benchmark::State& state) {
    const Tree t = generate(TreeSpec::b_ary(2, 16));
    EdgeWeights out(t);
    const auto d = DistributionSpec::cube_root();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        sample_couplings_into(d, CounterRng(++seed), out);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.edge_count()));
}
BENCHMARK(BM_SampleCouplings);

void BM_VerifyDefect(benchmark::State& state) {
    const Tree t = generate(TreeSpec::b_ary(2, 10));
    const EdgeWeights j = sample_couplings(t, DistributionSpec::uniform(0, 1), 3);
    const SpinConfig s = defect_config(t, j, 1);
    VerifyOptions opts;
    opts.k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(verify_ground_state(t, j, s, opts).pass);
}
BENCHMARK(BM_VerifyDefect)->Arg(4)->Arg(6);

void BM_VerifyExact(benchmark::State& state) {
    const Tree t = generate(TreeSpec::b_ary(2, 14));
    const EdgeWeights j = sample_couplings(t, DistributionSpec::uniform(0, 1), 3);
    const SpinConfig s = natural_ground_state(t, j);
    for (auto _ : state) benchmark::DoNotOptimize(verify_ground_state_exact(t, j, s).pass);
}
BENCHMARK(BM_VerifyExact);

}  // namespace

BENCHMARK_MAIN();
