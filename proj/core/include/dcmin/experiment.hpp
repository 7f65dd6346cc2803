#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dcmin/artifacts.hpp"
#include "dcmin/config.hpp"
#include "dcmin/dpi.hpp"

namespace dcmin {

/// Decision maker used during evaluation: a trained policy table (with its
/// fallback for unseen states) or a bare controller.
struct Agent {
    const Policy* policy = nullptr;
    ControllerKind controller = ControllerKind::Lazy;
    bool recouple = false;

    static Agent trained(const Policy& policy, bool recouple = false) {
        return {&policy, policy.fallback(), recouple};
    }
    static Agent bare(ControllerKind kind, bool recouple = false) { return {nullptr, kind, recouple}; }
};

struct DayEvaluation {
    std::string day_id;
    int period = 0;
    double energy_no_battery = 0.0;
    double energy_agent = 0.0;
    double demand_no_battery = 0.0;  // this day's share, [$]
    double demand_agent = 0.0;
    double peak_no_battery_kw = 0.0;
    double peak_agent_kw = 0.0;
    /// Recorded peak the agent starts the day with (0 after a reset).
    double start_peak_kw = 0.0;
    std::vector<double> meter_no_battery;
    std::vector<double> meter_agent;

    double bill_no_battery() const { return energy_no_battery + demand_no_battery; }
    double bill_agent() const { return energy_agent + demand_agent; }
    double reduction_energy() const { return energy_no_battery - energy_agent; }
    double reduction_demand() const { return demand_no_battery - demand_agent; }
    double reduction_total() const { return bill_no_battery() - bill_agent(); }
};

struct PeriodEvaluation {
    int index = 0;
    std::size_t n_days = 0;
    bool partial = false;
    double peak_no_battery_kw = 0.0;
    double peak_agent_kw = 0.0;
    double demand_no_battery = 0.0;
    double demand_agent = 0.0;
};

struct HistogramRow {
    int bin_kw = 0;  // covers [bin_kw, bin_kw + 1)
    std::size_t no_battery = 0;
    std::size_t agent = 0;
};

struct EvaluationReport {
    Problem problem = Problem::DEM;
    std::string label;
    std::vector<DayEvaluation> days;
    /// Billing periods; only populated for MDM.
    std::vector<PeriodEvaluation> periods;

    double average(double (DayEvaluation::*metric)() const) const;
    double average(double DayEvaluation::*field) const;
    /// Positive meter power per step, binned per kW; non-positive values land in bin 0.
    std::vector<HistogramRow> histogram() const;
};

/// Simulates the agent over consecutive test days with continuous SOC and
/// peak. SOC starts empty each day unless recoupling carries it over. The
/// peak restarts at every day for DEM/DDM and at every billing period start
/// for MDM, whose demand charge is split evenly over the period's days.
EvaluationReport evaluate_agent(std::span<const DayTrace> days, const DispatchModel& model,
                                Problem problem, int bp_length, const Agent& agent);

void write_per_day_csv(std::ostream& out, const EvaluationReport& report);
void write_summary_csv(std::ostream& out, const EvaluationReport& report);
void write_histogram_csv(std::ostream& out, const EvaluationReport& report);
void write_periods_csv(std::ostream& out, const EvaluationReport& report);

/// Writes train.csv and test.csv under paths.data_dir. Returns the day count.
std::size_t cmd_generate(const ExperimentConfig& config);

struct TrainArtifacts {
    std::filesystem::path q_table;
    std::filesystem::path policy;
    std::filesystem::path report;
    TrainResult result;
};

/// Trains on data_dir/train.csv and writes q_table.csv, policy.csv and
/// train_report.csv under artifacts_dir. Progress goes to `log`.
TrainArtifacts cmd_train(const ExperimentConfig& config, std::ostream& log);

/// What cmd_evaluate simulates.
enum class AgentSource { Trained, Lazy, Heuristic };

/// Evaluates on data_dir/test.csv and writes per_day.csv, summary.csv,
/// histogram.csv (and bp.csv for MDM) under eval_dir. The trained agent
/// reads policy.csv and throws ArtifactMismatch when its meta disagrees with
/// the config.
EvaluationReport cmd_evaluate(const ExperimentConfig& config, std::ostream& log,
                              AgentSource source = AgentSource::Trained);

/// Side-by-side report_summary.csv and report_histogram.csv from evaluation
/// directories, one column each. Throws ConfigError when `eval_dirs` is empty.
void cmd_report(std::span<const std::filesystem::path> eval_dirs,
                const std::filesystem::path& out_dir);

}  // namespace dcmin
