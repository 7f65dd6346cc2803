#pragma once

#include <compare>
#include <span>
#include <vector>

#include "dcmin/battery.hpp"
#include "dcmin/day_trace.hpp"
#include "dcmin/tariff.hpp"

namespace dcmin {

/// Uniform lattice {min, min + step, ..., min + (count - 1) step}.
struct Axis {
    double min = 0.0;
    double step = 1.0;
    int count = 1;

    /// Inclusive of both endpoints; (hi - lo) must be a whole number of steps.
    static Axis range(double lo, double hi, double step);

    double value(int index) const { return min + index * step; }
    double max() const { return value(count - 1); }

    /// Nearest index, ties toward the smaller index, clamped to the axis.
    int snap(double v) const;

    bool operator==(const Axis&) const = default;
};

/// Discretized (tau, SOC, delta, peak) state lattice plus the action lattice.
struct StateGrid {
    int horizon = 144;
    double dt_seconds = 600.0;
    Axis soc;
    Axis delta;
    Axis peak;
    Axis action;

    /// SOC step 0.01, delta [-60, 60] step 2, peak [0, 100] step 1,
    /// actions [-20, 20] step 1, 144 ten-minute steps.
    static StateGrid full();
    /// Coarse lattice for fast runs: SOC 0.05, delta 10, peak 5, action 5.
    static StateGrid desk();

    double dt_hours() const { return dt_seconds / 3600.0; }
    /// Index of the zero action; validate() guarantees it exists.
    int zero_action() const;
    /// Same grid with the peak axis reduced to the single point 0.
    StateGrid with_collapsed_peak() const;

    void validate() const;

    bool operator==(const StateGrid&) const = default;
};

struct DiscreteState {
    int tau = 0;
    int soc_idx = 0;
    int delta_idx = 0;
    int peak_idx = 0;

    auto operator<=>(const DiscreteState&) const = default;
};

/// Immediate-cost family: energy charge only (C1), or energy charge plus the
/// peak increment priced at the daily (C2) or monthly (C3) demand rate.
struct CostKind {
    enum class Type { Energy, DailyDemand, MonthlyDemand };

    Type type = Type::Energy;
    double mu = 0.0;

    static CostKind c1() { return {Type::Energy, 0.0}; }
    static CostKind c2(double mu_daily) { return {Type::DailyDemand, mu_daily}; }
    static CostKind c3(double mu_monthly) { return {Type::MonthlyDemand, mu_monthly}; }

    bool has_demand() const { return type != Type::Energy; }

    bool operator==(const CostKind&) const = default;
};

/// One step with continuous SOC and peak.
struct PhysicalStep {
    double soc = 0.0;
    bool saturated = false;
    double meter_kw = 0.0;
    double new_peak_kw = 0.0;
    double energy_cost = 0.0;
    double demand_cost = 0.0;
    double cost = 0.0;
};

PhysicalStep step_physical(int tau, double soc, double peak_kw, double action_kw,
                           const DayTrace& day, const BatteryParams& battery,
                           const TariffSchedule& tariff, CostKind kind, double dt_seconds);

struct StepOutcome {
    DiscreteState next;
    double cost = 0.0;
    double meter_kw = 0.0;
    double new_peak_kw = 0.0;
};

/// Lattice transition: simulates from the grid values of `state`, then snaps
/// the next SOC and peak. The next delta comes from the day trace (index of
/// 0 at the terminal step). Throws TimeOverflow, BadTraceLength,
/// InfeasibleAction.
StepOutcome step_env(const DiscreteState& state, int action_idx, const DayTrace& day,
                     const StateGrid& grid, const BatteryParams& battery,
                     const TariffSchedule& tariff, CostKind kind);

/// Grid actions inside the battery bounds that are feasible from the state's
/// SOC. Always contains the zero action.
std::vector<int> allowed_actions(const DiscreteState& state, const StateGrid& grid,
                                 const BatteryParams& battery);

/// Precomputed SOC lattice transitions; -1 marks an infeasible action.
class SocTransitions {
public:
    SocTransitions(const StateGrid& grid, const BatteryParams& battery);

    int next(int soc_idx, int action_idx) const {
        return next_[static_cast<std::size_t>(soc_idx * n_action_ + action_idx)];
    }
    bool feasible(int soc_idx, int action_idx) const { return next(soc_idx, action_idx) >= 0; }
    std::span<const int> feasible_actions(int soc_idx) const {
        return feasible_[static_cast<std::size_t>(soc_idx)];
    }

private:
    int n_action_;
    std::vector<int> next_;
    std::vector<std::vector<int>> feasible_;
};

/// Action indices ordered by |a|, then a: the deterministic argmin tie rule.
std::vector<int> tie_break_order(const Axis& action);

enum class PeakBoundary { DayStart, MonthStart };
enum class PeakResetMode { Daily, Monthly };

/// Daily mode zeroes the peak at every day start; Monthly mode only at the
/// start of a billing period.
DiscreteState reset_peak(DiscreteState state, PeakBoundary boundary, PeakResetMode mode);

}  // namespace dcmin
