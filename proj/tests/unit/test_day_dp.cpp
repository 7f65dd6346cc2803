#include <gtest/gtest.h>

#include <cmath>

#include "dcmin/day_dp.hpp"
#include "dcmin/errors.hpp"
#include "support/oracles.hpp"

namespace dcmin {
namespace {

using testing::brute_force_q;
using testing::random_tiny_instance;

double min_q(const QDay& q, int tau, int soc, int peak) {
    double best = QDay::kInfeasible;
    for (int a = 0; a < q.n_action(); ++a) best = std::min(best, q(tau, soc, peak, a));
    return best;
}

DispatchModel desk_model(CostKind kind) {
    return DispatchModel(StateGrid::desk(), BatteryParams::defaults(), TariffSchedule::defaults(),
                         kind);
}

DayTrace ramp_day() {
    DayTrace d{"ramp", {}, {}};
    for (int t = 0; t < 144; ++t) {
        d.p_cons.push_back(6.0 + 8.0 * std::sin(t / 20.0) * std::sin(t / 20.0));
        d.p_pv.push_back(t > 40 && t < 110 ? 18.0 * std::sin((t - 40) / 70.0 * 3.14159) : 0.0);
    }
    return d;
}

TEST(SolveDayOptimal, SingleStepIsImmediateCost) {
    for (std::uint64_t seed = 1; seed < 40; ++seed) {
        auto inst = random_tiny_instance(seed);
        inst.grid.horizon = 1;
        inst.tariff.purchase_price.resize(1);
        inst.tariff.sell_price.resize(1);
        inst.days[0].p_cons.resize(1);
        inst.days[0].p_pv.resize(1);
        const DispatchModel m(inst.grid, inst.battery, inst.tariff, inst.kind);
        const QDay q = solve_day_optimal(inst.days[0], m);
        for (int s = 0; s < inst.grid.soc.count; ++s) {
            for (int p = 0; p < inst.grid.peak.count; ++p) {
                for (int a = 0; a < inst.grid.action.count; ++a) {
                    if (!m.transitions.feasible(s, a)) {
                        EXPECT_TRUE(std::isinf(q(0, s, p, a)));
                        continue;
                    }
                    const auto o = step_env({0, s, 0, p}, a, inst.days[0], inst.grid, inst.battery,
                                            inst.tariff, inst.kind);
                    EXPECT_NEAR(q(0, s, p, a), o.cost, 1e-12);
                }
            }
        }
    }
}

TEST(SolveDayOptimal, MatchesBruteForce) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto inst = random_tiny_instance(seed);
        const QDay q = solve_day_optimal(inst.days[0], inst.grid, inst.battery, inst.tariff,
                                         inst.kind);
        for (int s = 0; s < inst.grid.soc.count; ++s) {
            for (int p = 0; p < inst.grid.peak.count; ++p) {
                for (int a = 0; a < inst.grid.action.count; ++a) {
                    const DiscreteState st{0, s, inst.grid.delta.snap(inst.days[0].delta(0)), p};
                    const double expected = brute_force_q(st, a, inst.days[0], inst.grid,
                                                          inst.battery, inst.tariff, inst.kind);
                    if (std::isinf(expected)) {
                        EXPECT_TRUE(std::isinf(q(0, s, p, a)));
                    } else {
                        EXPECT_NEAR(q(0, s, p, a), expected, 1e-9) << "seed " << seed;
                    }
                }
            }
        }
    }
}

TEST(SolveDayOptimal, ZeroDayIdlePathCostsNothing) {
    const auto m = desk_model(CostKind::c1());
    const DayTrace day{"z", std::vector<double>(144, 0.0), std::vector<double>(144, 0.0)};
    const QDay idle =
        evaluate_day_policy(day, [&](int, int, int) { return m.grid.zero_action(); }, m);
    for (int tau = 0; tau < 144; ++tau) {
        for (int s = 0; s < idle.n_soc(); ++s) EXPECT_EQ(idle(tau, s, 0, m.grid.zero_action()), 0.0);
    }
    EXPECT_LE(min_q(solve_day_optimal(day, m), 0, 0, 0), 0.0);
}

TEST(SolveDayOptimal, RejectsWrongLength) {
    const auto m = desk_model(CostKind::c1());
    const DayTrace day{"short", std::vector<double>(10, 1.0), std::vector<double>(10, 0.0)};
    EXPECT_THROW(solve_day_optimal(day, m), BadTraceLength);
}

TEST(SolveDayOptimal, EnergyCostIgnoresPeak) {
    const auto m = desk_model(CostKind::c1());
    const QDay q = solve_day_optimal(ramp_day(), m);
    for (int tau : {0, 50, 143}) {
        for (int s = 0; s < q.n_soc(); s += 4) {
            for (int a = 0; a < q.n_action(); ++a) {
                for (int p = 1; p < q.n_peak(); ++p) EXPECT_EQ(q(tau, s, p, a), q(tau, s, 0, a));
            }
        }
    }
}

TEST(SolveDayOptimal, ValueNonIncreasingInPeak) {
    for (auto kind : {CostKind::c2(0.5), CostKind::c3(10.0)}) {
        const auto m = desk_model(kind);
        const QDay q = solve_day_optimal(ramp_day(), m);
        for (int tau : {0, 30, 90, 143}) {
            for (int s = 0; s < q.n_soc(); ++s) {
                for (int p = 1; p < q.n_peak(); ++p) {
                    EXPECT_LE(min_q(q, tau, s, p), min_q(q, tau, s, p - 1) + 1e-9);
                }
            }
        }
    }
}

TEST(EvaluateDayPolicy, GreedyPolicyReproducesOptimum) {
    const auto m = desk_model(CostKind::c2(0.5));
    const auto day = ramp_day();
    const QDay opt = solve_day_optimal(day, m);
    const QDay ev = evaluate_day_policy(
        day, [&](int tau, int s, int p) { return greedy_action(opt, tau, s, p, m.tie_order); }, m);
    for (int tau = 0; tau < 144; tau += 13) {
        for (int s = 0; s < opt.n_soc(); s += 3) {
            for (int p = 0; p < opt.n_peak(); p += 5) {
                for (int a = 0; a < opt.n_action(); ++a) {
                    if (std::isinf(opt(tau, s, p, a))) {
                        EXPECT_TRUE(std::isinf(ev(tau, s, p, a)));
                    } else {
                        EXPECT_NEAR(ev(tau, s, p, a), opt(tau, s, p, a), 1e-9);
                    }
                }
            }
        }
    }
}

TEST(EvaluateDayPolicy, MatchesForwardSimulation) {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        const auto inst = random_tiny_instance(seed);
        const DispatchModel m(inst.grid, inst.battery, inst.tariff, inst.kind);
        // Deterministic but arbitrary feasible rule.
        const DayActionRule rule = [&](int tau, int s, int p) {
            const int want = (tau * 7 + s * 3 + p) % inst.grid.action.count;
            return m.transitions.feasible(s, want) ? want : inst.grid.zero_action();
        };
        const QDay ev = evaluate_day_policy(inst.days[0], rule, m);
        for (int s = 0; s < inst.grid.soc.count; ++s) {
            for (int a = 0; a < inst.grid.action.count; ++a) {
                if (!m.transitions.feasible(s, a)) continue;
                const DiscreteState st{0, s, inst.grid.delta.snap(inst.days[0].delta(0)), 0};
                const double fwd = testing::forward_policy_return(
                    st, a, inst.days[0], inst.grid, inst.battery, inst.tariff, inst.kind, rule);
                EXPECT_NEAR(ev(0, s, 0, a), fwd, 1e-9) << "seed " << seed;
            }
        }
    }
}

TEST(EvaluateDayPolicy, OptimumDominatesAnyPolicy) {
    const auto m = desk_model(CostKind::c3(10.0));
    const auto day = ramp_day();
    const QDay opt = solve_day_optimal(day, m);
    const QDay idle =
        evaluate_day_policy(day, [&](int, int, int) { return m.grid.zero_action(); }, m);
    for (int tau = 0; tau < 144; tau += 7) {
        for (int s = 0; s < opt.n_soc(); ++s) {
            for (int p = 0; p < opt.n_peak(); p += 2) {
                for (int a = 0; a < opt.n_action(); ++a) {
                    if (std::isinf(opt(tau, s, p, a))) continue;
                    EXPECT_LE(opt(tau, s, p, a), idle(tau, s, p, a) + 1e-9);
                }
            }
        }
    }
}

TEST(EvaluateDayPolicy, InfeasibleRuleThrows) {
    const auto m = desk_model(CostKind::c1());
    EXPECT_THROW(evaluate_day_policy(ramp_day(), [](int, int, int) { return 0; }, m),
                 PolicyUndefined);
}

TEST(Rollout, LatticeGreedyMatchesOptimalValue) {
    for (auto kind : {CostKind::c1(), CostKind::c2(0.5), CostKind::c3(10.0)}) {
        const auto m = desk_model(kind);
        const auto day = ramp_day();
        const QDay q = solve_day_optimal(day, m);
        const auto r = rollout(day, m, 0.0, 0.0, greedy_rule(q, m), RolloutMode::Lattice);
        EXPECT_NEAR(r.total_cost, min_q(q, 0, 0, 0), 1e-9);
    }
}

TEST(Rollout, LatticeRejectsOffGridAction) {
    const auto m = desk_model(CostKind::c1());
    const RolloutRule rule = [](const DiscreteState&, double, double) { return 2.5; };
    EXPECT_THROW(rollout(ramp_day(), m, 0.5, 0.0, rule, RolloutMode::Lattice), InfeasibleAction);
}

TEST(Rollout, PhysicalClipsAndTelescopes) {
    const auto m = desk_model(CostKind::c2(0.5));
    const auto day = ramp_day();
    const RolloutRule rule = [](const DiscreteState& s, double, double) {
        return s.tau % 3 == 0 ? -35.0 : 12.0;
    };
    const auto r = rollout(day, m, 0.1, 2.0, rule, RolloutMode::Physical);
    ASSERT_EQ(r.steps.size(), 144u);
    double prev_peak = r.initial_peak_kw;
    for (const auto& s : r.steps) {
        EXPECT_GE(s.action_kw, -20.0);
        EXPECT_LE(s.action_kw, 20.0);
        EXPECT_GE(s.peak_kw, prev_peak);
        prev_peak = s.peak_kw;
    }
    EXPECT_NEAR(r.total_cost, r.energy_cost + 0.5 * (r.final_peak_kw - 2.0), 1e-9);
}

}  // namespace
}  // namespace dcmin
