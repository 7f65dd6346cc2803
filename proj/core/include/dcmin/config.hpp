#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcmin/battery.hpp"
#include "dcmin/controllers.hpp"
#include "dcmin/data_io.hpp"
#include "dcmin/day_dp.hpp"
#include "dcmin/grid_mdp.hpp"
#include "dcmin/q_table.hpp"
#include "dcmin/tariff.hpp"

namespace dcmin {

/// Energy charge only, daily demand charge, or monthly demand charge.
enum class Problem { DEM, DDM, MDM };
enum class Preset { Desk, Full };

std::string to_string(Problem p);
std::string to_string(Preset p);
std::string to_string(StateVariant v);
std::string to_string(ControllerKind k);

// All parsers are case-insensitive and throw ConfigError.
Problem parse_problem(std::string_view text);
Preset parse_preset(std::string_view text);
StateVariant parse_variant(std::string_view text);
ControllerKind parse_controller(std::string_view text);

/// "0:340,1:400" -> knots. Throws ConfigError.
Curve parse_curve(std::string_view text);
std::string format_curve(const Curve& curve);

struct TariffSettings {
    std::vector<OnPeakWindow> on_peak{{6 * 60, 9 * 60}, {18 * 60, 21 * 60}};
    double purchase_on_peak = 0.1936;
    double purchase_off_peak = 0.1330;
    double sell = 0.098;
    double mu_daily = 0.5;
    double mu_monthly = 10.0;
    double fees = 0.0;

    TariffSchedule schedule(int horizon, double dt_hours) const;
};

struct ExperimentConfig {
    struct Paths {
        std::filesystem::path data_dir = "data";
        std::filesystem::path artifacts_dir = "artifacts";
        std::filesystem::path eval_dir = "eval";
    };

    Preset preset = Preset::Desk;
    Paths paths;
    StateGrid grid = StateGrid::desk();
    TariffSettings tariff;
    BatteryParams battery = BatteryParams::defaults();
    SynthProfile synth;

    Problem problem = Problem::DEM;
    /// Unset: S3 for DEM, S4 for the demand-charge problems.
    std::optional<StateVariant> variant;
    ControllerKind fallback = ControllerKind::Lazy;
    bool recouple = false;

    std::uint64_t seed = 1;
    int n_train = 10;
    int n_test = 4;
    int bp_length = 20;
    int max_iters = 20;
    int jobs = 1;

    /// Desk: coarse grid, 10 train / 4 test days. Full: fine grid, 300 / 100.
    static ExperimentConfig for_preset(Preset preset);

    StateVariant effective_variant() const;
    TariffSchedule tariff_schedule() const;
    CostKind cost_kind() const;
    PeakResetMode peak_reset() const;
    SynthProfile synth_profile() const;
    DispatchModel model() const;

    /// Throws ConfigError.
    void validate() const;
};

/// INI text with sections [paths] [experiment] [grid] [tariff] [battery]
/// [synth]. The preset comes from `preset_override`, else the file's
/// experiment.preset, else desk; its defaults are then overridden key by
/// key. Unknown sections or keys are errors.
ExperimentConfig parse_config(std::istream& in, std::optional<Preset> preset_override = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<Preset> preset_override = {});

/// Every key with its current value, in the format parse_config reads.
void write_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace dcmin
