#include <benchmark/benchmark.h>

#include <limits>
#include <random>

#include "mmwcs/mmwcs.hpp"

using namespace mmwcs;

namespace {

CMatrix gaussian(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = cplx(n(gen), n(gen));
    return m;
}

void BM_Somp(benchmark::State& state)
{
    const auto g = state.range(0);
    const CMatrix phi = gaussian(40, g, 1);
    const CMatrix y = gaussian(40, 4, 2);
    SompOptions opt;
    opt.update = state.range(1) ? CorrelationUpdate::incremental : CorrelationUpdate::direct;
    for (auto _ : state)
        benchmark::DoNotOptimize(somp(y, phi, 4, opt));
}
BENCHMARK(BM_Somp)->ArgsProduct({{64, 256, 1024}, {0, 1}});

struct PaperSetup {
    ArrayGeometry geo{20, 64, 4};
    AngleDictionary dr = build_dictionary(20, 1.0);
    AngleDictionary dt = build_dictionary(64, 1.0);
    ChannelRealization ch;

    explicit PaperSetup(int nr = 20)
    {
        geo.num_rx_antennas = nr;
        dr = build_dictionary(nr, 1.0);
        Rng rng(3);
        const std::vector<double> var(4, 1.0);
        ch = sample_channel(geo, 4, OnGrid{nr, 64}, var, rng);
    }
};

void BM_TwoStageSomp(benchmark::State& state)
{
    const PaperSetup s(static_cast<int>(state.range(0)));
    const auto plan = StagePlan::from_budget(s.geo, 4, 50 + s.geo.num_rx_antennas / 4 - 5, 1, 10.0, 10.0);
    Rng rng(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(two_stage_somp(s.ch, s.geo, s.dr, s.dt, plan, 1.0, rng));
}
BENCHMARK(BM_TwoStageSomp)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_OneStageOmp(benchmark::State& state)
{
    const PaperSetup s(static_cast<int>(state.range(0)));
    Rng rng(5);
    const int br = s.geo.num_rx_antennas;
    const int bt = 50 * 4 / br;
    for (auto _ : state)
        benchmark::DoNotOptimize(one_stage_omp(s.ch, s.geo, s.dr, s.dt, br, bt, 10.0, 1.0, rng));
}
BENCHMARK(BM_OneStageOmp)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_AtomicAdmm(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    const CMatrix y = array_responses(m, std::vector<double>{0.2, 0.6}) * gaussian(2, 4, 6) +
                      0.1 * gaussian(m, 4, 7);
    AdmmOptions opt;
    opt.lambda = default_lambda(0.1, m, 4);
    opt.log_objective = false;
    int iterations = 0;
    for (auto _ : state) {
        const auto r = atomic_admm(y, opt);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.u.data());
    }
    state.counters["iterations"] = iterations;
}
BENCHMARK(BM_AtomicAdmm)->Arg(20)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_TracyWidomInverse(benchmark::State& state)
{
    double q = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tw_inverse(q));
        q = q < 0.98 ? q + 0.01 : 0.01;
    }
}
BENCHMARK(BM_TracyWidomInverse);

}  // namespace

BENCHMARK_MAIN();
