#include "dcmin/controllers.hpp"

#include <algorithm>

namespace dcmin {

ControllerContext make_context(int tau, double soc, double peak_kw, const DayTrace& day,
                               const TariffSchedule& tariff, const BatteryParams& battery,
                               const StateGrid& grid) {
    const auto t = static_cast<std::size_t>(tau);
    return ControllerContext{
        .tau = tau,
        .soc = soc,
        .peak_kw = peak_kw,
        .p_cons = day.p_cons[t],
        .p_pv = day.p_pv[t],
        .on_peak = tariff.is_on_peak(tau),
        .last_on_peak_step = tariff.last_on_peak_step(),
        .horizon = grid.horizon,
        .bounds = action_bounds(battery, grid.soc.step),
        .rho_d = battery.rho_d,
        .battery = &battery,
        .dt_seconds = grid.dt_seconds,
    };
}

double lazy(const ControllerContext&) { return 0.0; }

double heuristic(const ControllerContext& ctx) {
    double a = 0.0;
    if (ctx.p_pv >= ctx.p_cons) {
        if (ctx.soc < 1.0) a = std::min(ctx.p_pv - ctx.p_cons, ctx.bounds.max_kw);
    } else if (ctx.on_peak) {
        if (ctx.soc > 0.0) a = -std::min((ctx.p_cons - ctx.p_pv) / ctx.rho_d, -ctx.bounds.min_kw);
    } else if (ctx.in_end_of_day_window()) {
        if (ctx.soc > 0.0) a = ctx.bounds.min_kw;
    }
    a = std::clamp(a, ctx.bounds.min_kw, ctx.bounds.max_kw);
    if (ctx.battery != nullptr && a != 0.0) {
        a = clip_to_feasible(*ctx.battery, ctx.soc, a, ctx.dt_seconds);
    }
    return a;
}

double controller_action(ControllerKind kind, const ControllerContext& ctx) {
    return kind == ControllerKind::Heuristic ? heuristic(ctx) : lazy(ctx);
}

double recouple(double base_kw, const ControllerContext& ctx, const Axis& action_axis) {
    if (!ctx.in_end_of_day_window()) return base_kw;
    for (int i = action_axis.count - 1; i >= 0; --i) {
        const double a = action_axis.value(i);
        if (a < 0.0) break;
        if (a > ctx.bounds.max_kw + 1e-9) continue;
        if (positive_part(p_meter(ctx.p_cons, ctx.p_pv, a, ctx.rho_d)) > ctx.peak_kw + 1e-9) {
            continue;
        }
        if (a == 0.0 || ctx.battery == nullptr ||
            is_feasible(*ctx.battery, ctx.soc, a, ctx.dt_seconds)) {
            return a;
        }
    }
    return base_kw;
}

int snap_feasible_action(double action_kw, int soc_idx, const StateGrid& grid,
                         const SocTransitions& transitions) {
    const int zero = grid.zero_action();
    int idx = grid.action.snap(action_kw);
    while (idx != zero && !transitions.feasible(soc_idx, idx)) idx += idx > zero ? -1 : 1;
    return idx;
}

}  // namespace dcmin
