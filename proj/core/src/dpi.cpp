#include "dcmin/dpi.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <thread>

#include "dcmin/errors.hpp"

namespace dcmin {

DispatchModel training_model(const DispatchModel& model, StateVariant variant) {
    if (uses_peak(variant)) return model;
    return DispatchModel(model.grid.with_collapsed_peak(), model.battery, model.tariff,
                         model.kind);
}

void check_variant(const DispatchModel& model, StateVariant variant) {
    if (model.kind.has_demand() && !uses_peak(variant)) {
        throw ConfigError("demand-charge problems need the s4 state variant");
    }
}

namespace {

// Solves days in batches of `jobs` concurrent workers and hands the results
// to `fold` strictly in day order, so the reduction is deterministic.
template <typename Solve, typename Fold>
void for_each_day_ordered(std::span<const DayTrace> days, int jobs, Solve solve, Fold fold) {
    const std::size_t batch = static_cast<std::size_t>(std::max(1, jobs));
    for (std::size_t begin = 0; begin < days.size(); begin += batch) {
        const std::size_t end = std::min(days.size(), begin + batch);
        std::vector<std::optional<QDay>> results(end - begin);
        if (end - begin == 1) {
            results[0].emplace(solve(days[begin]));
        } else {
            std::vector<std::exception_ptr> errors(end - begin);
            {
                std::vector<std::jthread> workers;
                for (std::size_t i = begin; i < end; ++i) {
                    workers.emplace_back([&, i] {
                        try {
                            results[i - begin].emplace(solve(days[i]));
                        } catch (...) {
                            errors[i - begin] = std::current_exception();
                        }
                    });
                }
            }
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        for (std::size_t i = begin; i < end; ++i) fold(i, *results[i - begin]);
    }
}

void fold_day(SparseQ& q, const DayTrace& day, const QDay& qd, const DispatchModel& m) {
    const int n_cells = qd.n_soc() * qd.n_peak() * qd.n_action();
    for (int tau = 0; tau < qd.horizon(); ++tau) {
        const BlockKey key{tau, delta_key(q.variant(), day.delta(tau), m.grid.delta)};
        SparseQ::Block& block = q.block(key);
        const double* layer = qd.layer(tau);
        for (int c = 0; c < n_cells; ++c) {
            const double v = layer[c];
            if (std::isinf(v)) continue;
            const auto cell = static_cast<std::size_t>(c);
            const std::uint32_t n = ++block.visits[cell];
            block.value[cell] += (v - block.value[cell]) / static_cast<double>(n);
        }
    }
}

}  // namespace

SparseQ init_qbar(std::span<const DayTrace> days, const DispatchModel& model,
                  StateVariant variant, int jobs) {
    if (days.empty()) throw EmptyTrainingSet("training needs at least one day");
    SparseQ q(variant, model.grid.soc.count, model.grid.peak.count, model.grid.action.count);
    for_each_day_ordered(
        days, jobs, [&](const DayTrace& day) { return solve_day_optimal(day, model); },
        [&](std::size_t i, const QDay& qd) { fold_day(q, days[i], qd, model); });
    return q;
}

PolicyEvaluation evaluate_policy(std::span<const DayTrace> days, const Policy& policy,
                                 const DispatchModel& model, int jobs) {
    if (days.empty()) throw EmptyTrainingSet("policy evaluation needs at least one day");
    PolicyEvaluation out;
    out.q = SparseQ(policy.variant(), model.grid.soc.count, model.grid.peak.count,
                    model.grid.action.count);
    out.day_returns.resize(days.size());
    for_each_day_ordered(
        days, jobs,
        [&](const DayTrace& day) { return evaluate_day_policy(day, policy, model); },
        [&](std::size_t i, const QDay& qd) {
            fold_day(out.q, days[i], qd, model);
            const int start = bind_policy(policy, days[i], model)(0, 0, 0);
            out.day_returns[i] = qd(0, 0, 0, start);
        });
    double sum = 0.0;
    for (double r : out.day_returns) sum += r;
    out.average_return = sum / static_cast<double>(days.size());
    return out;
}

Policy improve(const SparseQ& q, ControllerKind fallback, std::span<const int> tie_order) {
    Policy policy(q.variant(), q.n_soc(), q.n_peak(), fallback);
    for (const auto& [key, block] : q.blocks()) {
        for (int s = 0; s < q.n_soc(); ++s) {
            for (int p = 0; p < q.n_peak(); ++p) {
                if (auto a = greedy_action(q, block, s, p, tie_order)) policy.set(key, s, p, *a);
            }
        }
    }
    return policy;
}

TrainResult train(std::span<const DayTrace> days, const DispatchModel& model,
                  const TrainOptions& options) {
    if (options.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    check_variant(model, options.variant);
    const auto started = std::chrono::steady_clock::now();
    const DispatchModel tm = training_model(model, options.variant);

    TrainResult out;
    out.q = init_qbar(days, tm, options.variant, options.jobs);
    out.policy = improve(out.q, options.fallback, tm.tie_order);

    for (int it = 1; it <= options.max_iters; ++it) {
        PolicyEvaluation ev = evaluate_policy(days, out.policy, tm, options.jobs);
        Policy next = improve(ev.q, options.fallback, tm.tie_order);
        const std::size_t changes = next.count_differences(out.policy);

        out.report.iterations = it;
        out.report.average_return.push_back(ev.average_return);
        out.report.policy_changes.push_back(changes);
        out.q = std::move(ev.q);
        out.policy = std::move(next);
        if (changes == 0) {
            out.report.converged = true;
            break;
        }
    }
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

namespace {

double fallback_action(ControllerKind fallback, const Observation& obs,
                       const ControllerContext& ctx, const DispatchModel& model) {
    return model.grid.action.value(snap_feasible_action(controller_action(fallback, ctx),
                                                        obs.soc_idx, model.grid,
                                                        model.transitions));
}

}  // namespace

double online_action(const SparseQ& q, const Observation& obs, ControllerKind fallback,
                     const ControllerContext& ctx, const DispatchModel& model) {
    const BlockKey key{obs.tau, delta_key(q.variant(), obs.delta_kw, model.grid.delta)};
    if (const SparseQ::Block* block = q.find(key)) {
        const int peak = uses_peak(q.variant()) ? obs.peak_idx : 0;
        if (auto a = greedy_action(q, *block, obs.soc_idx, peak, model.tie_order)) {
            return model.grid.action.value(*a);
        }
    }
    return fallback_action(fallback, obs, ctx, model);
}

double policy_action(const Policy& policy, const Observation& obs, const ControllerContext& ctx,
                     const DispatchModel& model) {
    const BlockKey key{obs.tau, delta_key(policy.variant(), obs.delta_kw, model.grid.delta)};
    const int peak = uses_peak(policy.variant()) ? obs.peak_idx : 0;
    if (auto a = policy.lookup(key, obs.soc_idx, peak)) return model.grid.action.value(*a);
    return fallback_action(policy.fallback(), obs, ctx, model);
}

}  // namespace dcmin
