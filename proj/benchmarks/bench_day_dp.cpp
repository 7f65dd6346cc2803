#include <benchmark/benchmark.h>

#include "dcmin/data_io.hpp"
#include "dcmin/day_dp.hpp"
#include "dcmin/dpi.hpp"

namespace {

using namespace dcmin;

DispatchModel make_model(const StateGrid& grid, CostKind kind) {
    return DispatchModel(grid, BatteryParams::defaults(), TariffSchedule::defaults(), kind);
}

void BM_SolveDayDesk(benchmark::State& state) {
    const auto model = make_model(StateGrid::desk(), CostKind::c2(0.5));
    const DayTrace day = synth_day(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_day_optimal(day, model));
}
BENCHMARK(BM_SolveDayDesk)->Unit(benchmark::kMillisecond);

// Full grid with the peak axis collapsed, as S1-S3 agents train.
void BM_SolveDayFullNoPeak(benchmark::State& state) {
    const auto model = make_model(StateGrid::full().with_collapsed_peak(), CostKind::c1());
    const DayTrace day = synth_day(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_day_optimal(day, model));
}
BENCHMARK(BM_SolveDayFullNoPeak)->Unit(benchmark::kMillisecond);

void BM_SolveDayFull(benchmark::State& state) {
    const auto model = make_model(StateGrid::full(), CostKind::c2(0.5));
    const DayTrace day = synth_day(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_day_optimal(day, model));
}
BENCHMARK(BM_SolveDayFull)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_EvaluatePolicyDesk(benchmark::State& state) {
    const auto model = make_model(StateGrid::desk(), CostKind::c2(0.5));
    const auto days = synth_days(static_cast<int>(state.range(0)), 3);
    const SparseQ q = init_qbar(days, model, StateVariant::S4);
    const Policy policy = improve(q, ControllerKind::Lazy, model.tie_order);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(days, policy, model));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluatePolicyDesk)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
