#include "dcmin/day_dp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcmin/controllers.hpp"
#include "dcmin/errors.hpp"

namespace dcmin {

DispatchModel::DispatchModel(StateGrid grid_, BatteryParams battery_, TariffSchedule tariff_,
                             CostKind kind_)
    : grid(std::move(grid_)),
      battery(std::move(battery_)),
      tariff(std::move(tariff_)),
      kind(kind_),
      transitions(grid, battery),
      tie_order(tie_break_order(grid.action)) {
    if (tariff.horizon() != grid.horizon) {
        throw ConfigError("tariff horizon " + std::to_string(tariff.horizon()) +
                          " differs from grid horizon " + std::to_string(grid.horizon));
    }
}

QDay::QDay(int horizon, int n_soc, int n_peak, int n_action)
    : horizon_(horizon),
      n_soc_(n_soc),
      n_peak_(n_peak),
      n_action_(n_action),
      values_(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_soc) *
                  static_cast<std::size_t>(n_peak) * static_cast<std::size_t>(n_action),
              kInfeasible) {}

int greedy_action(const QDay& q, int tau, int soc, int peak, std::span<const int> tie_order) {
    int best = -1;
    double best_value = QDay::kInfeasible;
    for (int a : tie_order) {
        const double v = q(tau, soc, peak, a);
        if (v < best_value) {
            best = a;
            best_value = v;
        }
    }
    return best;
}

namespace {

struct DayCosts {
    std::vector<double> meter;   // [tau * n_action + a]
    std::vector<double> energy;  // [tau * n_action + a]
};

DayCosts precompute_costs(const DayTrace& day, const DispatchModel& m) {
    const int n_a = m.grid.action.count;
    DayCosts c;
    c.meter.resize(static_cast<std::size_t>(m.grid.horizon * n_a));
    c.energy.resize(c.meter.size());
    for (int tau = 0; tau < m.grid.horizon; ++tau) {
        const auto t = static_cast<std::size_t>(tau);
        for (int a = 0; a < n_a; ++a) {
            const auto i = static_cast<std::size_t>(tau * n_a + a);
            c.meter[i] = p_meter(day.p_cons[t], day.p_pv[t], m.grid.action.value(a),
                                 m.battery.rho_d);
            c.energy[i] = step_energy_cost(c.meter[i], m.tariff.purchase_price[t],
                                           m.tariff.sell_price[t], m.tariff.dt_hours);
        }
    }
    return c;
}

void check_day(const DayTrace& day, const StateGrid& grid) {
    if (day.size() != grid.horizon || static_cast<int>(day.p_pv.size()) != grid.horizon) {
        throw BadTraceLength("day '" + day.day_id + "' has " + std::to_string(day.size()) +
                             " steps, expected " + std::to_string(grid.horizon));
    }
}

// Fills layer tau of q from the continuation values of layer tau + 1.
void fill_layer(QDay& q, int tau, const DayCosts& costs, const DispatchModel& m,
                const std::vector<double>& v_next) {
    const int n_a = m.grid.action.count;
    const int n_p = q.n_peak();
    const bool demand = m.kind.has_demand();
    for (int s = 0; s < q.n_soc(); ++s) {
        for (int a : m.transitions.feasible_actions(s)) {
            const int s2 = m.transitions.next(s, a);
            const auto i = static_cast<std::size_t>(tau * n_a + a);
            const double bought = positive_part(costs.meter[i]);
            const double energy = costs.energy[i];
            for (int p = 0; p < n_p; ++p) {
                const double peak = m.grid.peak.value(p);
                const double new_peak = std::max(peak, bought);
                const double demand_cost = demand ? positive_part(new_peak - peak) * m.kind.mu : 0.0;
                const double cost = energy + demand_cost;
                const int p2 = m.grid.peak.snap(new_peak);
                q.at(tau, s, p, a) = cost + v_next[static_cast<std::size_t>(s2 * n_p + p2)];
            }
        }
    }
}

}  // namespace

QDay solve_day_optimal(const DayTrace& day, const DispatchModel& m) {
    check_day(day, m.grid);
    const int horizon = m.grid.horizon;
    const int n_s = m.grid.soc.count;
    const int n_p = m.grid.peak.count;
    QDay q(horizon, n_s, n_p, m.grid.action.count);
    q.delta_idx.resize(static_cast<std::size_t>(horizon));
    for (int tau = 0; tau < horizon; ++tau) {
        q.delta_idx[static_cast<std::size_t>(tau)] = m.grid.delta.snap(day.delta(tau));
    }

    const DayCosts costs = precompute_costs(day, m);
    std::vector<double> v_next(static_cast<std::size_t>(n_s * n_p), 0.0);
    for (int tau = horizon - 1; tau >= 0; --tau) {
        fill_layer(q, tau, costs, m, v_next);
        for (int s = 0; s < n_s; ++s) {
            for (int p = 0; p < n_p; ++p) {
                const int a = greedy_action(q, tau, s, p, m.tie_order);
                v_next[static_cast<std::size_t>(s * n_p + p)] = q(tau, s, p, a);
            }
        }
    }
    return q;
}

QDay solve_day_optimal(const DayTrace& day, const StateGrid& grid, const BatteryParams& battery,
                       const TariffSchedule& tariff, CostKind kind) {
    return solve_day_optimal(day, DispatchModel(grid, battery, tariff, kind));
}

QDay evaluate_day_policy(const DayTrace& day, const DayActionRule& rule,
                         const DispatchModel& m) {
    check_day(day, m.grid);
    const int horizon = m.grid.horizon;
    const int n_s = m.grid.soc.count;
    const int n_p = m.grid.peak.count;
    const int n_a = m.grid.action.count;
    QDay q(horizon, n_s, n_p, n_a);
    q.delta_idx.resize(static_cast<std::size_t>(horizon));
    for (int tau = 0; tau < horizon; ++tau) {
        q.delta_idx[static_cast<std::size_t>(tau)] = m.grid.delta.snap(day.delta(tau));
    }

    const DayCosts costs = precompute_costs(day, m);
    std::vector<double> v_next(static_cast<std::size_t>(n_s * n_p), 0.0);
    for (int tau = horizon - 1; tau >= 0; --tau) {
        fill_layer(q, tau, costs, m, v_next);
        if (tau == 0) break;
        const int prev = tau;  // continuation for layer tau - 1 follows the rule at tau
        for (int s = 0; s < n_s; ++s) {
            for (int p = 0; p < n_p; ++p) {
                const int a = rule(prev, s, p);
                if (a < 0 || a >= n_a || !m.transitions.feasible(s, a)) {
                    throw PolicyUndefined("policy has no feasible action at step " +
                                          std::to_string(prev) + ", soc index " +
                                          std::to_string(s));
                }
                v_next[static_cast<std::size_t>(s * n_p + p)] = q(prev, s, p, a);
            }
        }
    }
    return q;
}

DayActionRule bind_policy(const Policy& policy, const DayTrace& day, const DispatchModel& m) {
    return [&policy, &day, &m](int tau, int soc, int peak) {
        const BlockKey key{tau, delta_key(policy.variant(), day.delta(tau), m.grid.delta)};
        const int peak_key = uses_peak(policy.variant()) ? peak : 0;
        if (auto a = policy.lookup(key, soc, peak_key)) return *a;
        const auto ctx = make_context(tau, m.grid.soc.value(soc), m.grid.peak.value(peak), day,
                                      m.tariff, m.battery, m.grid);
        return snap_feasible_action(controller_action(policy.fallback(), ctx), soc, m.grid,
                                    m.transitions);
    };
}

QDay evaluate_day_policy(const DayTrace& day, const Policy& policy, const DispatchModel& m) {
    return evaluate_day_policy(day, bind_policy(policy, day, m), m);
}

RolloutResult rollout(const DayTrace& day, const DispatchModel& m, double start_soc,
                      double start_peak_kw, const RolloutRule& rule, RolloutMode mode) {
    check_day(day, m.grid);
    const auto& g = m.grid;
    RolloutResult out;
    out.steps.reserve(static_cast<std::size_t>(g.horizon));
    out.meter_kw.reserve(static_cast<std::size_t>(g.horizon));

    int soc_idx = g.soc.snap(start_soc);
    int peak_idx = g.peak.snap(start_peak_kw);
    double soc = mode == RolloutMode::Lattice ? g.soc.value(soc_idx) : start_soc;
    double peak = mode == RolloutMode::Lattice ? g.peak.value(peak_idx) : start_peak_kw;
    out.initial_peak_kw = peak;

    for (int tau = 0; tau < g.horizon; ++tau) {
        if (mode == RolloutMode::Physical) {
            soc_idx = g.soc.snap(soc);
            peak_idx = g.peak.snap(peak);
        }
        const DiscreteState observed{tau, soc_idx, g.delta.snap(day.delta(tau)), peak_idx};
        double a = rule(observed, soc, peak);

        int a_idx = -1;
        if (mode == RolloutMode::Lattice) {
            a_idx = g.action.snap(a);
            if (std::abs(g.action.value(a_idx) - a) > 1e-9 || !m.transitions.feasible(soc_idx, a_idx)) {
                throw InfeasibleAction("rollout action " + std::to_string(a) +
                                       " kW is not a feasible grid action at step " +
                                       std::to_string(tau));
            }
            a = g.action.value(a_idx);
        } else {
            const auto bounds = action_bounds(m.battery, g.soc.step);
            a = clip_to_feasible(m.battery, soc, std::clamp(a, bounds.min_kw, bounds.max_kw),
                                 g.dt_seconds);
        }

        const PhysicalStep step =
            step_physical(tau, soc, peak, a, day, m.battery, m.tariff, m.kind, g.dt_seconds);
        out.steps.push_back({tau, soc, peak, a, step.meter_kw, step.cost});
        out.meter_kw.push_back(step.meter_kw);
        out.total_cost += step.cost;
        out.energy_cost += step.energy_cost;

        if (mode == RolloutMode::Lattice) {
            soc_idx = m.transitions.next(soc_idx, a_idx);
            peak_idx = g.peak.snap(step.new_peak_kw);
            soc = g.soc.value(soc_idx);
            peak = g.peak.value(peak_idx);
        } else {
            soc = step.soc;
            peak = step.new_peak_kw;
        }
    }
    out.final_peak_kw = peak;
    out.final_soc = soc;

    const BillingMode billing = m.kind.type == CostKind::Type::Energy        ? BillingMode::EnergyOnly
                                : m.kind.type == CostKind::Type::DailyDemand ? BillingMode::Daily
                                                                             : BillingMode::Monthly;
    out.bill = bill(std::span(&out.meter_kw, 1), m.tariff, billing);
    return out;
}

RolloutRule greedy_rule(const QDay& q, const DispatchModel& m) {
    return [&q, &m](const DiscreteState& s, double, double) {
        const int peak = std::min(s.peak_idx, q.n_peak() - 1);
        const int a = greedy_action(q, s.tau, s.soc_idx, peak, m.tie_order);
        return a < 0 ? 0.0 : m.grid.action.value(a);
    };
}

}  // namespace dcmin
