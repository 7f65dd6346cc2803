#pragma once

#include "dcmin/battery.hpp"
#include "dcmin/day_trace.hpp"
#include "dcmin/grid_mdp.hpp"
#include "dcmin/tariff.hpp"

namespace dcmin {

struct ControllerContext {
    int tau = 0;
    double soc = 0.0;
    double peak_kw = 0.0;
    double p_cons = 0.0;
    double p_pv = 0.0;
    bool on_peak = false;
    int last_on_peak_step = -1;
    int horizon = 0;
    ActionBounds bounds{0.0, 0.0};
    double rho_d = 1.0;
    const BatteryParams* battery = nullptr;
    double dt_seconds = 600.0;

    /// From the step after the last on-peak step to the end of the day.
    bool in_end_of_day_window() const {
        return last_on_peak_step >= 0 && tau > last_on_peak_step && tau < horizon;
    }
};

ControllerContext make_context(int tau, double soc, double peak_kw, const DayTrace& day,
                               const TariffSchedule& tariff, const BatteryParams& battery,
                               const StateGrid& grid);

enum class ControllerKind { Lazy, Heuristic };

/// Does nothing.
double lazy(const ControllerContext& ctx);

/// Rule-based dispatch: absorb PV surplus, cover on-peak deficits, empty the
/// battery after the last on-peak window. Output is clipped to feasibility.
double heuristic(const ControllerContext& ctx);

double controller_action(ControllerKind kind, const ControllerContext& ctx);

/// In the end-of-day window, replaces `base_kw` with the largest grid charge
/// that keeps the meter at or below the current peak. Returns `base_kw`
/// outside the window or when no non-negative grid action qualifies.
double recouple(double base_kw, const ControllerContext& ctx, const Axis& action_axis);

/// Nearest grid action to `action_kw`; moved toward zero until feasible.
int snap_feasible_action(double action_kw, int soc_idx, const StateGrid& grid,
                         const SocTransitions& transitions);

}  // namespace dcmin
