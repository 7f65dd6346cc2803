#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcmin/controllers.hpp"
#include "dcmin/day_dp.hpp"
#include "dcmin/q_table.hpp"

namespace dcmin {

// Decomposition-based policy iteration. The global Q-function of a policy is
// estimated as the average, over training days, of the exact per-day
// fixed-policy Q-functions; each day is solved by backward induction because
// its consumption and production are known in hindsight.

/// The model the per-day DP runs on for a variant: agents that do not key
/// on the peak train on a grid whose peak axis is the single point 0.
DispatchModel training_model(const DispatchModel& model, StateVariant variant);

/// Throws ConfigError when a demand-charge problem is paired with a variant
/// that does not carry the peak.
void check_variant(const DispatchModel& model, StateVariant variant);

/// Average of the per-day optimal Q-functions, folded day by day with a
/// running mean. `model` must already be the training model.
/// Throws EmptyTrainingSet.
SparseQ init_qbar(std::span<const DayTrace> days, const DispatchModel& model,
                  StateVariant variant, int jobs = 1);

struct PolicyEvaluation {
    SparseQ q;
    /// Per-day return from (tau 0, empty battery, zero peak) under the policy.
    std::vector<double> day_returns;
    double average_return = 0.0;
};

/// Average of the per-day fixed-policy Q-functions, folded in day order.
PolicyEvaluation evaluate_policy(std::span<const DayTrace> days, const Policy& policy,
                                 const DispatchModel& model, int jobs = 1);

/// Greedy policy: per state, the argmin over stored actions with the
/// |a|-then-a tie rule. Unstored states are left to `fallback`.
Policy improve(const SparseQ& q, ControllerKind fallback, std::span<const int> tie_order);

struct TrainOptions {
    StateVariant variant = StateVariant::S4;
    ControllerKind fallback = ControllerKind::Lazy;
    int max_iters = 20;
    int jobs = 1;
};

struct TrainReport {
    int iterations = 0;
    bool converged = false;
    /// Average training return of the policy evaluated at each iteration.
    std::vector<double> average_return;
    /// Cells whose action changed in the improvement following each evaluation.
    std::vector<std::size_t> policy_changes;
    double wall_seconds = 0.0;
};

struct TrainResult {
    SparseQ q;
    Policy policy;
    TrainReport report;
};

/// pi_0 = improve(init_qbar), then evaluate/improve until the policy table
/// stops changing or max_iters evaluations have run. `model` is the full
/// model; the peak axis is collapsed internally for S1-S3.
TrainResult train(std::span<const DayTrace> days, const DispatchModel& model,
                  const TrainOptions& options);

/// What an online agent observes at a step.
struct Observation {
    int tau = 0;
    int soc_idx = 0;
    int peak_idx = 0;
    double delta_kw = 0.0;
};

/// Greedy action [kW] from the stored Q-values of the observed state, or the
/// fallback controller snapped to the nearest feasible grid action.
double online_action(const SparseQ& q, const Observation& obs, ControllerKind fallback,
                     const ControllerContext& ctx, const DispatchModel& model);

/// Same decision through a policy table.
double policy_action(const Policy& policy, const Observation& obs, const ControllerContext& ctx,
                     const DispatchModel& model);

}  // namespace dcmin
