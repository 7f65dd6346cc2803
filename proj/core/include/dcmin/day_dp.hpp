#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dcmin/battery.hpp"
#include "dcmin/day_trace.hpp"
#include "dcmin/grid_mdp.hpp"
#include "dcmin/q_table.hpp"
#include "dcmin/tariff.hpp"

namespace dcmin {

/// Everything that stays fixed while days vary: lattice, battery, tariff,
/// cost family, and the precomputed SOC transitions.
struct DispatchModel {
    DispatchModel(StateGrid grid, BatteryParams battery, TariffSchedule tariff, CostKind kind);

    StateGrid grid;
    BatteryParams battery;
    TariffSchedule tariff;
    CostKind kind;
    SocTransitions transitions;
    std::vector<int> tie_order;
};

/// Dense Q-function of one known day over (tau, soc, peak, action).
/// Infeasible actions hold +inf; Q(H, ., .) = 0 is implicit.
class QDay {
public:
    static constexpr double kInfeasible = std::numeric_limits<double>::infinity();

    QDay(int horizon, int n_soc, int n_peak, int n_action);

    int horizon() const { return horizon_; }
    int n_soc() const { return n_soc_; }
    int n_peak() const { return n_peak_; }
    int n_action() const { return n_action_; }

    double operator()(int tau, int soc, int peak, int action) const {
        return values_[index(tau, soc, peak, action)];
    }
    double& at(int tau, int soc, int peak, int action) {
        return values_[index(tau, soc, peak, action)];
    }

    /// Contiguous (soc, peak, action) slice of step tau.
    const double* layer(int tau) const { return &values_[index(tau, 0, 0, 0)]; }

    /// Delta index of the day at each step.
    std::vector<int> delta_idx;

private:
    std::size_t index(int tau, int soc, int peak, int action) const {
        return static_cast<std::size_t>(((tau * n_soc_ + soc) * n_peak_ + peak) * n_action_ +
                                        action);
    }

    int horizon_;
    int n_soc_;
    int n_peak_;
    int n_action_;
    std::vector<double> values_;
};

/// Greedy action of a QDay cell under the tie order; -1 if none is finite.
int greedy_action(const QDay& q, int tau, int soc, int peak, std::span<const int> tie_order);

/// Backward induction of the Bellman optimality equation over one day,
/// sweeping every SOC and peak value. Throws BadTraceLength.
QDay solve_day_optimal(const DayTrace& day, const DispatchModel& model);
QDay solve_day_optimal(const DayTrace& day, const StateGrid& grid, const BatteryParams& battery,
                       const TariffSchedule& tariff, CostKind kind);

/// Continuation action chosen at lattice cell (tau, soc, peak) of a known
/// day. Returns an action index.
using DayActionRule = std::function<int(int tau, int soc_idx, int peak_idx)>;

/// Backward recursion of the fixed-policy Bellman equation: the
/// continuation follows `rule` instead of the min. Throws PolicyUndefined
/// when the rule yields an infeasible action.
QDay evaluate_day_policy(const DayTrace& day, const DayActionRule& rule,
                         const DispatchModel& model);

/// Same with a tabular policy (unseen states go to its fallback controller).
QDay evaluate_day_policy(const DayTrace& day, const Policy& policy, const DispatchModel& model);

/// Binds a policy to a day: projects lattice cells to policy keys and
/// resolves unseen keys through the fallback, snapped to a feasible action.
DayActionRule bind_policy(const Policy& policy, const DayTrace& day, const DispatchModel& model);

enum class RolloutMode {
    /// Replays the lattice transitions (snapped SOC and peak), the exact
    /// model the DP solves.
    Lattice,
    /// Carries continuous SOC and peak; the rule sees the snapped state and
    /// actions are clipped to what the battery can physically do.
    Physical,
};

/// Action rule for rollouts: observed lattice state plus the true SOC and
/// peak; returns power in kW.
using RolloutRule =
    std::function<double(const DiscreteState& observed, double soc, double peak_kw)>;

struct RolloutStep {
    int tau = 0;
    double soc = 0.0;
    double peak_kw = 0.0;
    double action_kw = 0.0;
    double meter_kw = 0.0;
    double cost = 0.0;
};

struct RolloutResult {
    std::vector<RolloutStep> steps;
    std::vector<double> meter_kw;
    double total_cost = 0.0;
    double energy_cost = 0.0;
    double initial_peak_kw = 0.0;
    double final_peak_kw = 0.0;
    double final_soc = 0.0;
    BillBreakdown bill;
};

/// Simulates one day forward from (start_soc, start_peak). In Lattice mode
/// the start values are snapped and actions must be feasible grid actions
/// (InfeasibleAction otherwise).
RolloutResult rollout(const DayTrace& day, const DispatchModel& model, double start_soc,
                      double start_peak_kw, const RolloutRule& rule, RolloutMode mode);

/// Greedy rule over a solved day.
RolloutRule greedy_rule(const QDay& q, const DispatchModel& model);

}  // namespace dcmin
