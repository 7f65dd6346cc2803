#include "dcmin/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "dcmin/data_io.hpp"
#include "dcmin/errors.hpp"

namespace dcmin {

double EvaluationReport::average(double (DayEvaluation::*metric)() const) const {
    if (days.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& d : days) sum += (d.*metric)();
    return sum / static_cast<double>(days.size());
}

double EvaluationReport::average(double DayEvaluation::*field) const {
    if (days.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& d : days) sum += d.*field;
    return sum / static_cast<double>(days.size());
}

std::vector<HistogramRow> EvaluationReport::histogram() const {
    std::map<int, HistogramRow> bins;
    auto add = [&](double meter, std::size_t HistogramRow::*column) {
        const int bin = static_cast<int>(std::floor(positive_part(meter)));
        auto& row = bins[bin];
        row.bin_kw = bin;
        ++(row.*column);
    };
    for (const auto& d : days) {
        for (double m : d.meter_no_battery) add(m, &HistogramRow::no_battery);
        for (double m : d.meter_agent) add(m, &HistogramRow::agent);
    }
    if (bins.empty()) return {};
    std::vector<HistogramRow> out;
    for (int b = 0; b <= bins.rbegin()->first; ++b) {
        const auto it = bins.find(b);
        out.push_back(it == bins.end() ? HistogramRow{b, 0, 0} : it->second);
    }
    return out;
}

namespace {

double max_positive(std::span<const double> meter) {
    double peak = 0.0;
    for (double m : meter) peak = std::max(peak, positive_part(m));
    return peak;
}

RolloutRule agent_rule(const Agent& agent, const DayTrace& day, const DispatchModel& model) {
    return [&agent, &day, &model](const DiscreteState& s, double soc, double peak) {
        const ControllerContext ctx =
            make_context(s.tau, soc, peak, day, model.tariff, model.battery, model.grid);
        double a = 0.0;
        if (agent.policy) {
            const Observation obs{s.tau, s.soc_idx, s.peak_idx, day.delta(s.tau)};
            a = policy_action(*agent.policy, obs, ctx, model);
        } else {
            a = controller_action(agent.controller, ctx);
        }
        if (agent.recouple) a = recouple(a, ctx, model.grid.action);
        return a;
    };
}

}  // namespace

EvaluationReport evaluate_agent(std::span<const DayTrace> days, const DispatchModel& model,
                                Problem problem, int bp_length, const Agent& agent) {
    if (days.empty()) throw EmptyInput("evaluation needs at least one test day");
    if (agent.policy) {
        const auto& g = model.grid;
        if (agent.policy->n_soc() != g.soc.count ||
            (uses_peak(agent.policy->variant()) && agent.policy->n_peak() != g.peak.count)) {
            throw ArtifactMismatch("policy dimensions do not match the grid");
        }
    }
    const auto periods = billing_periods(days.size(), bp_length);
    const bool monthly = problem == Problem::MDM;

    EvaluationReport report;
    report.problem = problem;
    report.days.resize(days.size());

    double soc = 0.0;
    for (const auto& bp : periods) {
        double peak = 0.0;
        for (std::size_t i = bp.first; i < bp.first + bp.count; ++i) {
            const DayTrace& day = days[i];
            if (!monthly) peak = 0.0;
            if (!agent.recouple) soc = 0.0;

            const double start_peak = peak;
            const RolloutResult r =
                rollout(day, model, soc, peak, agent_rule(agent, day, model), RolloutMode::Physical);
            soc = r.final_soc;
            peak = r.final_peak_kw;

            DayEvaluation& e = report.days[i];
            e.day_id = day.day_id;
            e.period = bp.index;
            e.start_peak_kw = start_peak;
            e.meter_agent = r.meter_kw;
            e.meter_no_battery.resize(static_cast<std::size_t>(day.size()));
            for (int t = 0; t < day.size(); ++t) {
                e.meter_no_battery[static_cast<std::size_t>(t)] = day.delta(t);
            }
            e.energy_agent = day_energy_charge(e.meter_agent, model.tariff);
            e.energy_no_battery = day_energy_charge(e.meter_no_battery, model.tariff);
            e.peak_agent_kw = max_positive(e.meter_agent);
            e.peak_no_battery_kw = max_positive(e.meter_no_battery);
            if (problem == Problem::DDM) {
                e.demand_agent = demand_charge(e.peak_agent_kw, model.tariff.mu_daily);
                e.demand_no_battery = demand_charge(e.peak_no_battery_kw, model.tariff.mu_daily);
            }
        }

        if (monthly) {
            PeriodEvaluation pe;
            pe.index = bp.index;
            pe.n_days = bp.count;
            pe.partial = bp.partial;
            for (std::size_t i = bp.first; i < bp.first + bp.count; ++i) {
                pe.peak_agent_kw = std::max(pe.peak_agent_kw, report.days[i].peak_agent_kw);
                pe.peak_no_battery_kw =
                    std::max(pe.peak_no_battery_kw, report.days[i].peak_no_battery_kw);
            }
            pe.demand_agent = demand_charge(pe.peak_agent_kw, model.tariff.mu_monthly);
            pe.demand_no_battery = demand_charge(pe.peak_no_battery_kw, model.tariff.mu_monthly);
            const double n = static_cast<double>(bp.count);
            for (std::size_t i = bp.first; i < bp.first + bp.count; ++i) {
                report.days[i].demand_agent = pe.demand_agent / n;
                report.days[i].demand_no_battery = pe.demand_no_battery / n;
            }
            report.periods.push_back(pe);
        }
    }
    return report;
}

void write_per_day_csv(std::ostream& out, const EvaluationReport& r) {
    const auto n = [](double v) { return format_number(v); };
    out << "day_id,month,bill_no_battery,bill_agent,energy_no_battery,energy_agent,"
           "demand_no_battery,demand_agent,reduction_total,reduction_energy,reduction_demand,"
           "peak_no_battery_kw,peak_agent_kw\n";
    for (const auto& d : r.days) {
        out << d.day_id << ',' << d.period << ',' << n(d.bill_no_battery()) << ','
            << n(d.bill_agent()) << ',' << n(d.energy_no_battery) << ',' << n(d.energy_agent) << ','
            << n(d.demand_no_battery) << ',' << n(d.demand_agent) << ',' << n(d.reduction_total())
            << ',' << n(d.reduction_energy()) << ',' << n(d.reduction_demand()) << ','
            << n(d.peak_no_battery_kw) << ',' << n(d.peak_agent_kw) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const EvaluationReport& r) {
    const auto n = [](double v) { return format_number(v); };
    double max_nb = 0.0;
    double max_agent = 0.0;
    for (const auto& d : r.days) {
        max_nb = std::max(max_nb, d.peak_no_battery_kw);
        max_agent = std::max(max_agent, d.peak_agent_kw);
    }
    out << "metric,value\n"
        << "label," << r.label << '\n'
        << "problem," << to_string(r.problem) << '\n'
        << "days," << r.days.size() << '\n'
        << "avg_bill_no_battery," << n(r.average(&DayEvaluation::bill_no_battery)) << '\n'
        << "avg_bill_agent," << n(r.average(&DayEvaluation::bill_agent)) << '\n'
        << "avg_energy_no_battery," << n(r.average(&DayEvaluation::energy_no_battery)) << '\n'
        << "avg_energy_agent," << n(r.average(&DayEvaluation::energy_agent)) << '\n'
        << "avg_demand_no_battery," << n(r.average(&DayEvaluation::demand_no_battery)) << '\n'
        << "avg_demand_agent," << n(r.average(&DayEvaluation::demand_agent)) << '\n'
        << "avg_reduction_total," << n(r.average(&DayEvaluation::reduction_total)) << '\n'
        << "avg_reduction_energy," << n(r.average(&DayEvaluation::reduction_energy)) << '\n'
        << "avg_reduction_demand," << n(r.average(&DayEvaluation::reduction_demand)) << '\n'
        << "max_peak_no_battery_kw," << n(max_nb) << '\n'
        << "max_peak_agent_kw," << n(max_agent) << '\n';
}

void write_histogram_csv(std::ostream& out, const EvaluationReport& r) {
    out << "bin_kw,no_battery,agent\n";
    for (const auto& row : r.histogram()) {
        out << row.bin_kw << ',' << row.no_battery << ',' << row.agent << '\n';
    }
}

void write_periods_csv(std::ostream& out, const EvaluationReport& r) {
    const auto n = [](double v) { return format_number(v); };
    out << "bp,n_days,partial,peak_no_battery_kw,peak_agent_kw,demand_no_battery,demand_agent\n";
    for (const auto& p : r.periods) {
        out << p.index << ',' << p.n_days << ',' << (p.partial ? 1 : 0) << ','
            << n(p.peak_no_battery_kw) << ',' << n(p.peak_agent_kw) << ','
            << n(p.demand_no_battery) << ',' << n(p.demand_agent) << '\n';
    }
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write write) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write(out);
    if (!out) throw DataError("failed writing " + path.string());
}

ArtifactMeta training_meta(const ExperimentConfig& c, const DispatchModel& training) {
    return {{"problem", to_string(c.problem)},
            {"grid", grid_signature(training.grid)},
            {"seed", std::to_string(c.seed)}};
}

}  // namespace

std::size_t cmd_generate(const ExperimentConfig& c) {
    c.validate();
    const SynthProfile profile = c.synth_profile();
    const auto train = synth_days(c.n_train, c.seed, profile, 0);
    const auto test = synth_days(c.n_test, c.seed, profile, c.n_train);
    ensure_dir(c.paths.data_dir);
    save_csv(c.paths.data_dir / "train.csv", train);
    save_csv(c.paths.data_dir / "test.csv", test);
    return train.size() + test.size();
}

TrainArtifacts cmd_train(const ExperimentConfig& c, std::ostream& log) {
    c.validate();
    const auto days = load_csv(c.paths.data_dir / "train.csv", c.grid.horizon);
    if (days.empty()) throw EmptyTrainingSet("train.csv holds no days");
    const DispatchModel model = c.model();
    const StateVariant variant = c.effective_variant();
    log << "training " << to_string(c.problem) << '/' << to_string(variant) << " on "
        << days.size() << " days\n";

    TrainOptions options;
    options.variant = variant;
    options.fallback = c.fallback;
    options.max_iters = c.max_iters;
    options.jobs = c.jobs;

    TrainArtifacts out;
    out.result = train(days, model, options);
    const TrainReport& rep = out.result.report;
    for (int i = 0; i < rep.iterations; ++i) {
        const auto k = static_cast<std::size_t>(i);
        log << "  iteration " << i + 1 << ": average return " << format_number(rep.average_return[k])
            << ", policy changes " << rep.policy_changes[k] << '\n';
    }
    log << (rep.converged ? "converged" : "stopped at max_iters") << " after " << rep.iterations
        << " iterations in " << rep.wall_seconds << " s\n";

    const ArtifactMeta meta = training_meta(c, training_model(model, variant));
    ensure_dir(c.paths.artifacts_dir);
    out.q_table = c.paths.artifacts_dir / "q_table.csv";
    out.policy = c.paths.artifacts_dir / "policy.csv";
    out.report = c.paths.artifacts_dir / "train_report.csv";
    save_q_table(out.q_table, out.result.q, meta);
    save_policy(out.policy, out.result.policy, meta);
    write_file(out.report, [&](std::ostream& f) {
        f << "iteration,average_return,policy_changes\n";
        for (int i = 0; i < rep.iterations; ++i) {
            const auto k = static_cast<std::size_t>(i);
            f << i + 1 << ',' << format_number(rep.average_return[k]) << ','
              << rep.policy_changes[k] << '\n';
        }
    });
    return out;
}

EvaluationReport cmd_evaluate(const ExperimentConfig& c, std::ostream& log, AgentSource source) {
    c.validate();
    const auto days = load_csv(c.paths.data_dir / "test.csv", c.grid.horizon);
    const DispatchModel model = c.model();

    Policy policy;
    Agent agent;
    std::string label = to_string(c.problem) + '-';
    switch (source) {
        case AgentSource::Trained: {
            ArtifactMeta meta;
            policy = load_policy(c.paths.artifacts_dir / "policy.csv", &meta);
            const StateVariant variant = c.effective_variant();
            require_meta(meta, "problem", to_string(c.problem));
            require_meta(meta, "variant", to_string(variant));
            require_meta(meta, "grid", grid_signature(training_model(model, variant).grid));
            policy.set_fallback(c.fallback);
            agent = Agent::trained(policy, c.recouple);
            label += to_string(variant) + '-' + to_string(c.fallback);
            break;
        }
        case AgentSource::Lazy:
            agent = Agent::bare(ControllerKind::Lazy, c.recouple);
            label += "lazy";
            break;
        case AgentSource::Heuristic:
            agent = Agent::bare(ControllerKind::Heuristic, c.recouple);
            label += "heuristic";
            break;
    }
    if (c.recouple) label += "-recouple";

    EvaluationReport report = evaluate_agent(days, model, c.problem, c.bp_length, agent);
    report.label = label;

    const auto& dir = c.paths.eval_dir;
    ensure_dir(dir);
    write_file(dir / "per_day.csv", [&](std::ostream& f) { write_per_day_csv(f, report); });
    write_file(dir / "summary.csv", [&](std::ostream& f) { write_summary_csv(f, report); });
    write_file(dir / "histogram.csv", [&](std::ostream& f) { write_histogram_csv(f, report); });
    if (c.problem == Problem::MDM) {
        write_file(dir / "bp.csv", [&](std::ostream& f) { write_periods_csv(f, report); });
    }
    log << label << ": " << report.days.size() << " test days, average bill "
        << format_number(report.average(&DayEvaluation::bill_no_battery)) << " -> "
        << format_number(report.average(&DayEvaluation::bill_agent)) << " $/day\n";
    return report;
}

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs(const std::filesystem::path& path,
                                                           std::string_view header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw ParseError(path.string() + ": expected header '" + std::string(header) + "'", 1);
    }
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path.string() + ": expected 2 fields", line_no);
        rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return rows;
}

}  // namespace

void cmd_report(std::span<const std::filesystem::path> eval_dirs,
                const std::filesystem::path& out_dir) {
    if (eval_dirs.empty()) throw ConfigError("report needs at least one evaluation directory");

    std::vector<std::string> labels;
    std::vector<std::string> metrics;
    std::vector<std::map<std::string, std::string>> summaries;
    std::vector<std::map<int, std::string>> histograms;
    int max_bin = -1;

    for (const auto& dir : eval_dirs) {
        std::map<std::string, std::string> summary;
        for (auto& [k, v] : read_pairs(dir / "summary.csv", "metric,value")) {
            if (k == "label") continue;
            if (std::find(metrics.begin(), metrics.end(), k) == metrics.end()) metrics.push_back(k);
            summary[k] = v;
        }
        std::string label = dir.filename().string();
        for (auto& [k, v] : read_pairs(dir / "summary.csv", "metric,value")) {
            if (k == "label") label = v;
        }
        std::string unique = label;
        for (int n = 2; std::find(labels.begin(), labels.end(), unique) != labels.end(); ++n) {
            unique = label + '#' + std::to_string(n);
        }
        labels.push_back(unique);
        summaries.push_back(std::move(summary));

        std::map<int, std::string> hist;
        std::size_t line_no = 1;
        for (auto& [bin, rest] : read_pairs(dir / "histogram.csv", "bin_kw,no_battery,agent")) {
            ++line_no;
            const auto comma = rest.find(',');
            if (comma == std::string::npos) throw ParseError("histogram row needs 3 fields", line_no);
            const int b = static_cast<int>(parse_number(bin, line_no));
            hist[b] = rest.substr(comma + 1);
            max_bin = std::max(max_bin, b);
        }
        histograms.push_back(std::move(hist));
    }

    ensure_dir(out_dir);
    write_file(out_dir / "report_summary.csv", [&](std::ostream& f) {
        f << "metric";
        for (const auto& l : labels) f << ',' << l;
        f << '\n';
        for (const auto& m : metrics) {
            f << m;
            for (const auto& s : summaries) {
                const auto it = s.find(m);
                f << ',' << (it == s.end() ? "" : it->second);
            }
            f << '\n';
        }
    });
    write_file(out_dir / "report_histogram.csv", [&](std::ostream& f) {
        f << "bin_kw";
        for (const auto& l : labels) f << ',' << l;
        f << '\n';
        for (int b = 0; b <= max_bin; ++b) {
            f << b;
            for (const auto& h : histograms) {
                const auto it = h.find(b);
                f << ',' << (it == h.end() ? "0" : it->second);
            }
            f << '\n';
        }
    });
}

}  // namespace dcmin
