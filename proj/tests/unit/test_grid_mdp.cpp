#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dcmin/errors.hpp"
#include "dcmin/grid_mdp.hpp"

namespace dcmin {
namespace {

DayTrace flat_day(double cons, double pv, int horizon = 144) {
    return DayTrace{"flat", std::vector<double>(static_cast<std::size_t>(horizon), cons),
                    std::vector<double>(static_cast<std::size_t>(horizon), pv)};
}

TEST(Axis, RangeIsInclusive) {
    const auto a = Axis::range(-60, 60, 2);
    EXPECT_EQ(a.count, 61);
    EXPECT_DOUBLE_EQ(a.value(0), -60.0);
    EXPECT_DOUBLE_EQ(a.max(), 60.0);
    EXPECT_THROW(Axis::range(0, 1, 0.3), ConfigError);
    EXPECT_THROW(Axis::range(0, 1, 0.0), ConfigError);
    EXPECT_THROW(Axis::range(1, 0, 0.5), ConfigError);
}

TEST(Axis, SnapExamples) {
    const auto soc = Axis::range(0, 1, 0.01);
    EXPECT_EQ(soc.snap(0.507), 51);
    EXPECT_EQ(soc.snap(0.505), 50);
    const auto delta = Axis::range(-60, 60, 2);
    EXPECT_EQ(delta.snap(-999), 0);
    EXPECT_EQ(delta.snap(999), 60);
    EXPECT_EQ(delta.snap(3.0), 31);  // tie between 2 and 4 goes to 2
}

TEST(Axis, IndexValueBijection) {
    const auto g = StateGrid::full();
    for (const Axis* a : {&g.soc, &g.delta, &g.peak, &g.action}) {
        for (int i = 0; i < a->count; ++i) EXPECT_EQ(a->snap(a->value(i)), i);
    }
}

TEST(StateGrid, Presets) {
    const auto full = StateGrid::full();
    EXPECT_EQ(full.horizon, 144);
    EXPECT_EQ(full.soc.count, 101);
    EXPECT_EQ(full.delta.count, 61);
    EXPECT_EQ(full.peak.count, 101);
    EXPECT_EQ(full.action.count, 41);
    EXPECT_DOUBLE_EQ(full.action.value(full.zero_action()), 0.0);
    const auto desk = StateGrid::desk();
    EXPECT_EQ(desk.soc.count, 21);
    EXPECT_EQ(desk.delta.count, 13);
    EXPECT_EQ(desk.peak.count, 21);
    EXPECT_EQ(desk.action.count, 9);
    EXPECT_EQ(desk.with_collapsed_peak().peak.count, 1);
}

TEST(StepEnv, DemandIncrement) {
    // p = 10 kW; step meter 12 kW at the off-peak price; mu_d = 0.5.
    auto grid = StateGrid::full();
    const auto battery = BatteryParams::defaults();
    const auto tariff = TariffSchedule::defaults();
    auto day = flat_day(12.0, 0.0);
    const DiscreteState s{60, 50, grid.delta.snap(12.0), grid.peak.snap(10.0)};
    const auto o = step_env(s, grid.zero_action(), day, grid, battery, tariff, CostKind::c2(0.5));
    const double c1 = 12.0 / 6.0 * 0.1330;
    EXPECT_NEAR(o.cost, c1 + 2.0 * 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(o.new_peak_kw, 12.0);
    EXPECT_EQ(o.next.peak_idx, grid.peak.snap(12.0));
    EXPECT_EQ(o.next.tau, 61);
}

TEST(StepEnv, NoIncrementBelowPeak) {
    auto grid = StateGrid::full();
    const auto battery = BatteryParams::defaults();
    const auto tariff = TariffSchedule::defaults();
    auto day = flat_day(8.0, 0.0);
    const DiscreteState s{60, 50, 0, grid.peak.snap(10.0)};
    const auto o = step_env(s, grid.zero_action(), day, grid, battery, tariff, CostKind::c2(0.5));
    EXPECT_NEAR(o.cost, 8.0 / 6.0 * 0.1330, 1e-12);
    EXPECT_DOUBLE_EQ(o.new_peak_kw, 10.0);
}

TEST(StepEnv, BalancedDayCostsNothing) {
    auto grid = StateGrid::full();
    auto day = flat_day(7.0, 7.0);
    const DiscreteState s{0, 0, 0, 0};
    const auto o = step_env(s, grid.zero_action(), day, grid, BatteryParams::defaults(),
                            TariffSchedule::defaults(), CostKind::c1());
    EXPECT_EQ(o.meter_kw, 0.0);
    EXPECT_EQ(o.cost, 0.0);
}

TEST(StepEnv, Errors) {
    auto grid = StateGrid::desk();
    auto day = flat_day(7.0, 1.0);
    const auto b = BatteryParams::defaults();
    const auto t = TariffSchedule::defaults();
    EXPECT_THROW(step_env({144, 0, 0, 0}, grid.zero_action(), day, grid, b, t, CostKind::c1()),
                 TimeOverflow);
    EXPECT_THROW(step_env({0, 0, 0, 0}, 0, day, grid, b, t, CostKind::c1()), InfeasibleAction);
    EXPECT_THROW(step_env({0, 0, 0, 0}, grid.zero_action(), flat_day(1, 1, 10), grid, b, t,
                          CostKind::c1()),
                 BadTraceLength);
}

TEST(StepEnv, TerminalDeltaIsZeroIndex) {
    auto grid = StateGrid::desk();
    auto day = flat_day(30.0, 0.0);
    const auto o = step_env({143, 0, 0, 0}, grid.zero_action(), day, grid,
                            BatteryParams::defaults(), TariffSchedule::defaults(), CostKind::c1());
    EXPECT_EQ(o.next.tau, 144);
    EXPECT_EQ(o.next.delta_idx, grid.delta.snap(0.0));
}

TEST(StepEnv, EnergyCostIndependentOfPeak) {
    auto grid = StateGrid::desk();
    const auto b = BatteryParams::defaults();
    const auto t = TariffSchedule::defaults();
    auto day = flat_day(9.0, 3.0);
    for (int a = 0; a < grid.action.count; ++a) {
        const DiscreteState base{40, 10, 0, 0};
        if (!is_feasible(b, grid.soc.value(10), grid.action.value(a), grid.dt_seconds)) continue;
        const auto ref = step_env(base, a, day, grid, b, t, CostKind::c1());
        for (int p = 1; p < grid.peak.count; ++p) {
            const auto o = step_env({40, 10, 0, p}, a, day, grid, b, t, CostKind::c1());
            EXPECT_EQ(o.cost, ref.cost);
            EXPECT_EQ(o.next.soc_idx, ref.next.soc_idx);
        }
    }
}

TEST(StepEnv, Deterministic) {
    auto grid = StateGrid::full();
    auto day = flat_day(9.0, 3.0);
    const DiscreteState s{70, 33, 0, 12};
    const auto a = step_env(s, 25, day, grid, BatteryParams::defaults(), TariffSchedule::defaults(),
                            CostKind::c3(10));
    const auto b = step_env(s, 25, day, grid, BatteryParams::defaults(), TariffSchedule::defaults(),
                            CostKind::c3(10));
    EXPECT_EQ(a.next, b.next);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.meter_kw, b.meter_kw);
}

TEST(AllowedActions, Examples) {
    const auto grid = StateGrid::full();
    const auto b = BatteryParams::defaults();
    const auto empty = allowed_actions({0, 0, 0, 0}, grid, b);
    EXPECT_TRUE(std::none_of(empty.begin(), empty.end(),
                             [&](int a) { return grid.action.value(a) < 0.0; }));
    const auto full = allowed_actions({0, 100, 0, 0}, grid, b);
    EXPECT_TRUE(std::none_of(full.begin(), full.end(),
                             [&](int a) { return grid.action.value(a) > 0.0; }));
    EXPECT_EQ(allowed_actions({0, 50, 0, 0}, grid, b).size(), 41u);
    for (int s = 0; s < grid.soc.count; ++s) {
        const auto acts = allowed_actions({0, s, 0, 0}, grid, b);
        EXPECT_NE(std::find(acts.begin(), acts.end(), grid.zero_action()), acts.end());
    }
}

TEST(SocTransitions, AgreeWithStepEnv) {
    const auto grid = StateGrid::desk();
    const auto b = BatteryParams::defaults();
    const SocTransitions tr(grid, b);
    auto day = flat_day(5.0, 5.0);
    for (int s = 0; s < grid.soc.count; ++s) {
        const auto acts = allowed_actions({0, s, 0, 0}, grid, b);
        for (int a = 0; a < grid.action.count; ++a) {
            const bool allowed = std::find(acts.begin(), acts.end(), a) != acts.end();
            EXPECT_EQ(tr.feasible(s, a), allowed);
            if (allowed) {
                const auto o = step_env({0, s, 0, 0}, a, day, grid, b, TariffSchedule::defaults(),
                                        CostKind::c1());
                EXPECT_EQ(tr.next(s, a), o.next.soc_idx);
            }
        }
    }
}

TEST(TieBreakOrder, SmallerMagnitudeThenSmallerValue) {
    const auto order = tie_break_order(Axis::range(-10, 10, 5));
    // values: -10 -5 0 5 10 at indices 0..4
    EXPECT_EQ(order, (std::vector<int>{2, 1, 3, 0, 4}));
}

TEST(ResetPeak, Semantics) {
    const DiscreteState s{0, 3, 4, 30};
    EXPECT_EQ(reset_peak(s, PeakBoundary::DayStart, PeakResetMode::Daily).peak_idx, 0);
    EXPECT_EQ(reset_peak(s, PeakBoundary::DayStart, PeakResetMode::Monthly).peak_idx, 30);
    EXPECT_EQ(reset_peak(s, PeakBoundary::MonthStart, PeakResetMode::Monthly).peak_idx, 0);
    EXPECT_EQ(reset_peak(s, PeakBoundary::MonthStart, PeakResetMode::Daily).peak_idx, 0);
}

TEST(PeakTelescoping, IncrementsSumToFinalPeak) {
    const double peaks[] = {5, 3, 8, 6};
    double p = 0.0;
    double increments = 0.0;
    for (double m : peaks) {
        increments += positive_part(std::max(p, m) - p);
        p = std::max(p, m);
    }
    EXPECT_EQ(increments, 8.0);
    EXPECT_EQ(p, 8.0);
}

TEST(PeakTelescoping, PhysicalStepsTelescope) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    const auto b = BatteryParams::defaults();
    const auto t = TariffSchedule::defaults();
    DayTrace day{"r", {}, {}};
    for (int i = 0; i < 144; ++i) {
        day.p_cons.push_back(10.0 + u(rng) / 2);
        day.p_pv.push_back(std::max(0.0, u(rng)));
    }
    double soc = 0.3;
    double peak = 4.0;
    const double p0 = peak;
    double total = 0.0;
    std::vector<double> meter;
    for (int tau = 0; tau < 144; ++tau) {
        const double a = clip_to_feasible(b, soc, u(rng), 600.0);
        const auto s = step_physical(tau, soc, peak, a, day, b, t, CostKind::c2(0.5), 600.0);
        EXPECT_GE(s.new_peak_kw, peak);
        total += s.cost;
        meter.push_back(s.meter_kw);
        soc = s.soc;
        peak = s.new_peak_kw;
    }
    EXPECT_NEAR(total, day_energy_charge(meter, t) + 0.5 * (peak - p0), 1e-9);
}

}  // namespace
}  // namespace dcmin
