#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dcmin/config.hpp"
#include "dcmin/errors.hpp"
#include "dcmin/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Overrides {
    std::string config;
    std::string preset;
    std::string problem;
    std::string variant;
    std::string fallback;
    std::string data_dir;
    std::string artifacts_dir;
    std::string eval_dir;
    bool recouple = false;
    std::optional<int> jobs;
    std::optional<int> max_iters;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "INI configuration file");
    cmd->add_option("--preset", o.preset, "desk | full");
    cmd->add_option("--data", o.data_dir, "Directory holding train.csv and test.csv");
    cmd->add_option("--seed", o.seed, "Seed of the synthetic data");
}

void add_model(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--problem", o.problem, "dem | ddm | mdm");
    cmd->add_option("--variant", o.variant, "State variant s1 | s2 | s3 | s4");
    cmd->add_option("--fallback", o.fallback, "Controller for unseen states: lazy | heuristic");
    cmd->add_option("--artifacts", o.artifacts_dir, "Directory of trained artifacts");
    cmd->add_option("--jobs", o.jobs, "Concurrent per-day DP solves");
}

dcmin::ExperimentConfig resolve(const Overrides& o) {
    std::optional<dcmin::Preset> preset;
    if (!o.preset.empty()) preset = dcmin::parse_preset(o.preset);
    dcmin::ExperimentConfig c = o.config.empty()
                                    ? dcmin::ExperimentConfig::for_preset(
                                          preset.value_or(dcmin::Preset::Desk))
                                    : dcmin::load_config(o.config, preset);
    if (!o.problem.empty()) c.problem = dcmin::parse_problem(o.problem);
    if (!o.variant.empty()) c.variant = dcmin::parse_variant(o.variant);
    if (!o.fallback.empty()) c.fallback = dcmin::parse_controller(o.fallback);
    if (!o.data_dir.empty()) c.paths.data_dir = o.data_dir;
    if (!o.artifacts_dir.empty()) c.paths.artifacts_dir = o.artifacts_dir;
    if (!o.eval_dir.empty()) c.paths.eval_dir = o.eval_dir;
    if (o.recouple) c.recouple = true;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.max_iters) c.max_iters = *o.max_iters;
    if (o.seed) c.seed = *o.seed;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Battery dispatch for electricity bills with energy and demand charges"};
    app.require_subcommand(1);

    Overrides o;
    std::string agent = "trained";
    std::vector<std::string> eval_dirs;
    std::string report_out = "report";
    bool print_config = false;

    auto* gen = app.add_subcommand("generate", "Write synthetic train.csv and test.csv");
    add_common(gen, o);
    gen->add_flag("--print-config", print_config, "Print the resolved configuration");

    auto* tr = app.add_subcommand("train", "Train an agent and write q_table.csv and policy.csv");
    add_common(tr, o);
    add_model(tr, o);
    tr->add_option("--max-iters", o.max_iters, "Policy iteration limit");

    auto* ev = app.add_subcommand("evaluate", "Simulate an agent on the test days");
    add_common(ev, o);
    add_model(ev, o);
    ev->add_flag("--recouple", o.recouple, "Charge after the last on-peak window");
    ev->add_option("--agent", agent, "trained | lazy | heuristic")
        ->check(CLI::IsMember({"trained", "lazy", "heuristic"}));
    ev->add_option("--out", o.eval_dir, "Directory for the evaluation CSVs");

    auto* rep = app.add_subcommand("report", "Compare evaluation directories side by side");
    rep->add_option("eval_dirs", eval_dirs, "Evaluation output directories");
    rep->add_option("--out", report_out, "Directory for the comparison CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) {
            const auto c = resolve(o);
            if (print_config) dcmin::write_config(std::cout, c);
            const auto n = dcmin::cmd_generate(c);
            std::cout << "wrote " << n << " days to " << c.paths.data_dir.string() << '\n';
        } else if (*tr) {
            dcmin::cmd_train(resolve(o), std::cout);
        } else if (*ev) {
            const auto source = agent == "lazy"        ? dcmin::AgentSource::Lazy
                                : agent == "heuristic" ? dcmin::AgentSource::Heuristic
                                                       : dcmin::AgentSource::Trained;
            dcmin::cmd_evaluate(resolve(o), std::cout, source);
        } else if (*rep) {
            std::vector<std::filesystem::path> dirs(eval_dirs.begin(), eval_dirs.end());
            dcmin::cmd_report(dirs, report_out);
            std::cout << "wrote report for " << dirs.size() << " evaluations to " << report_out
                      << '\n';
        }
    } catch (const dcmin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dcmin::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
