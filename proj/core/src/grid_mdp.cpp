#include "dcmin/grid_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "dcmin/errors.hpp"

namespace dcmin {

Axis Axis::range(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("axis step must be positive");
    if (!(hi >= lo)) throw ConfigError("axis upper bound below lower bound");
    const double n = (hi - lo) / step;
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
        throw ConfigError("axis [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is not a whole number of steps of " + std::to_string(step));
    }
    return Axis{lo, step, static_cast<int>(rounded) + 1};
}

int Axis::snap(double v) const {
    const double f = (v - min) / step;
    if (!(f > 0.0)) return 0;
    if (f >= count - 1) return count - 1;
    const double lower = std::floor(f);
    int idx = static_cast<int>(lower);
    if (f - lower > 0.5 + 1e-9) ++idx;
    return std::clamp(idx, 0, count - 1);
}

StateGrid StateGrid::full() {
    return StateGrid{
        .horizon = 144,
        .dt_seconds = 600.0,
        .soc = Axis::range(0.0, 1.0, 0.01),
        .delta = Axis::range(-60.0, 60.0, 2.0),
        .peak = Axis::range(0.0, 100.0, 1.0),
        .action = Axis::range(-20.0, 20.0, 1.0),
    };
}

StateGrid StateGrid::desk() {
    return StateGrid{
        .horizon = 144,
        .dt_seconds = 600.0,
        .soc = Axis::range(0.0, 1.0, 0.05),
        .delta = Axis::range(-60.0, 60.0, 10.0),
        .peak = Axis::range(0.0, 100.0, 5.0),
        .action = Axis::range(-20.0, 20.0, 5.0),
    };
}

int StateGrid::zero_action() const {
    const int idx = action.snap(0.0);
    if (std::abs(action.value(idx)) > 1e-9) throw ConfigError("action axis must contain 0");
    return idx;
}

StateGrid StateGrid::with_collapsed_peak() const {
    StateGrid g = *this;
    g.peak = Axis{0.0, 1.0, 1};
    return g;
}

void StateGrid::validate() const {
    if (horizon < 1) throw ConfigError("horizon must be at least one step");
    if (!(dt_seconds > 0.0)) throw ConfigError("dt must be positive");
    for (const Axis* a : {&soc, &delta, &peak, &action}) {
        if (!(a->step > 0.0) || a->count < 1) throw ConfigError("grid axes need positive steps");
    }
    if (std::abs(soc.min) > 1e-12 || std::abs(soc.max() - 1.0) > 1e-9) {
        throw ConfigError("SOC axis must span [0, 1]");
    }
    if (std::abs(peak.min) > 1e-12) throw ConfigError("peak axis must start at 0");
    (void)zero_action();
}

PhysicalStep step_physical(int tau, double soc, double peak_kw, double action_kw,
                           const DayTrace& day, const BatteryParams& battery,
                           const TariffSchedule& tariff, CostKind kind, double dt_seconds) {
    const auto t = static_cast<std::size_t>(tau);
    const SocStep s = step_soc(battery, soc, action_kw, dt_seconds);

    PhysicalStep out;
    out.soc = s.soc;
    out.saturated = s.saturated;
    out.meter_kw = p_meter(day.p_cons[t], day.p_pv[t], action_kw, battery.rho_d);
    out.energy_cost = step_energy_cost(out.meter_kw, tariff.purchase_price[t],
                                       tariff.sell_price[t], tariff.dt_hours);
    out.new_peak_kw = std::max(peak_kw, positive_part(out.meter_kw));
    if (kind.has_demand()) out.demand_cost = positive_part(out.new_peak_kw - peak_kw) * kind.mu;
    out.cost = out.energy_cost + out.demand_cost;
    return out;
}

StepOutcome step_env(const DiscreteState& state, int action_idx, const DayTrace& day,
                     const StateGrid& grid, const BatteryParams& battery,
                     const TariffSchedule& tariff, CostKind kind) {
    if (state.tau < 0 || state.tau >= grid.horizon) {
        throw TimeOverflow("step index " + std::to_string(state.tau) + " outside the horizon");
    }
    if (day.size() != grid.horizon || static_cast<int>(day.p_pv.size()) != grid.horizon) {
        throw BadTraceLength("day '" + day.day_id + "' does not match the horizon");
    }
    const double x = grid.soc.value(state.soc_idx);
    const double a = grid.action.value(action_idx);
    const auto bounds = action_bounds(battery, grid.soc.step);
    if (action_idx < 0 || action_idx >= grid.action.count || a < bounds.min_kw - 1e-9 ||
        a > bounds.max_kw + 1e-9 || !is_feasible(battery, x, a, grid.dt_seconds)) {
        throw InfeasibleAction("action " + std::to_string(a) + " kW infeasible at soc " +
                               std::to_string(x));
    }

    const PhysicalStep p = step_physical(state.tau, x, grid.peak.value(state.peak_idx), a, day,
                                         battery, tariff, kind, grid.dt_seconds);
    StepOutcome out;
    out.cost = p.cost;
    out.meter_kw = p.meter_kw;
    out.new_peak_kw = p.new_peak_kw;
    out.next.tau = state.tau + 1;
    out.next.soc_idx = grid.soc.snap(p.soc);
    out.next.delta_idx = out.next.tau < grid.horizon ? grid.delta.snap(day.delta(out.next.tau))
                                                     : grid.delta.snap(0.0);
    out.next.peak_idx = grid.peak.snap(p.new_peak_kw);
    return out;
}

std::vector<int> allowed_actions(const DiscreteState& state, const StateGrid& grid,
                                 const BatteryParams& battery) {
    const auto bounds = action_bounds(battery, grid.soc.step);
    const double x = grid.soc.value(state.soc_idx);
    const int zero = grid.zero_action();
    std::vector<int> out;
    for (int i = 0; i < grid.action.count; ++i) {
        const double a = grid.action.value(i);
        if (i == zero) {
            out.push_back(i);
            continue;
        }
        if (a < bounds.min_kw - 1e-9 || a > bounds.max_kw + 1e-9) continue;
        if (is_feasible(battery, x, a, grid.dt_seconds)) out.push_back(i);
    }
    return out;
}

SocTransitions::SocTransitions(const StateGrid& grid, const BatteryParams& battery)
    : n_action_(grid.action.count),
      next_(static_cast<std::size_t>(grid.soc.count * grid.action.count), -1),
      feasible_(static_cast<std::size_t>(grid.soc.count)) {
    const auto bounds = action_bounds(battery, grid.soc.step);
    const int zero = grid.zero_action();
    for (int s = 0; s < grid.soc.count; ++s) {
        const double x = grid.soc.value(s);
        for (int i = 0; i < grid.action.count; ++i) {
            const double a = grid.action.value(i);
            int target = -1;
            if (i == zero) {
                target = s;
            } else if (a >= bounds.min_kw - 1e-9 && a <= bounds.max_kw + 1e-9) {
                try {
                    const SocStep step = step_soc(battery, x, a, grid.dt_seconds);
                    if (!step.saturated) target = grid.soc.snap(step.soc);
                } catch (const Error&) {
                }
            }
            next_[static_cast<std::size_t>(s * n_action_ + i)] = target;
            if (target >= 0) feasible_[static_cast<std::size_t>(s)].push_back(i);
        }
    }
}

std::vector<int> tie_break_order(const Axis& action) {
    std::vector<int> order(static_cast<std::size_t>(action.count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
        const double al = action.value(l);
        const double ar = action.value(r);
        if (std::abs(al) != std::abs(ar)) return std::abs(al) < std::abs(ar);
        return al < ar;
    });
    return order;
}

DiscreteState reset_peak(DiscreteState state, PeakBoundary boundary, PeakResetMode mode) {
    if (mode == PeakResetMode::Daily || boundary == PeakBoundary::MonthStart) state.peak_idx = 0;
    return state;
}

}  // namespace dcmin
