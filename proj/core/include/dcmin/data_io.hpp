#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcmin/day_trace.hpp"

namespace dcmin {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
/// Strict decimal parse of the whole field. Throws ParseError.
double parse_number(std::string_view text, std::size_t line);
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

inline constexpr std::string_view kTraceHeader = "day_id,step,p_cons_kw,p_pv_kw";

/// Reads `day_id,step,p_cons_kw,p_pv_kw` rows. Days appear in file order,
/// each as a contiguous block holding steps 0..horizon-1 exactly once.
/// Throws ParseError (with the line number), MissingStep, NegativePower.
std::vector<DayTrace> read_csv(std::istream& in, int horizon = 144);
std::vector<DayTrace> load_csv(const std::filesystem::path& path, int horizon = 144);

void write_csv(std::ostream& out, std::span<const DayTrace> days);
void save_csv(const std::filesystem::path& path, std::span<const DayTrace> days);

/// Shape of the synthetic office-building days.
struct SynthProfile {
    int horizon = 144;
    double dt_hours = 1.0 / 6.0;
    double pv_peak_kw = 30.0;         // clear-sky peak at full scale
    double pv_min_scale = 0.3;        // per-day scale drawn from [min, 1]
    double dip_probability = 0.35;    // chance of a mid-day production drop
    double base_load_kw = 8.0;
    double business_min_kw = 12.0;    // business-hours plateau height range
    double business_max_kw = 22.0;
    double noise_kw = 2.0;            // uniform +/- noise on consumption
};

/// Day `index` of the stream identified by `seed`. Each day derives its own
/// generator from (seed, index), so output does not depend on call order.
DayTrace synth_day(std::uint64_t seed, int index, const SynthProfile& profile = {});

/// Days first_index .. first_index + n - 1. Throws ConfigError when n < 1.
std::vector<DayTrace> synth_days(int n, std::uint64_t seed, const SynthProfile& profile = {},
                                 int first_index = 0);

struct DataBounds {
    double delta_min;
    double delta_max;
    double peak_max;
};

/// Range of consumption minus production rounded outward to delta_step, and
/// a peak-axis suggestion max(delta)+ + a_max rounded up to peak_step.
/// Throws EmptyInput.
DataBounds data_bounds(std::span<const DayTrace> days, double delta_step, double peak_step,
                       double a_max);

struct BillingPeriod {
    int index = 0;
    std::size_t first = 0;  // position in the test list
    std::size_t count = 0;
    bool partial = false;   // shorter than the nominal length
};

/// Consecutive groups of `length` days; the last one may be partial.
std::vector<BillingPeriod> billing_periods(std::size_t n_days, int length);

struct Dataset {
    std::vector<DayTrace> train;
    std::vector<DayTrace> test;
    std::vector<BillingPeriod> periods;
};

/// Loads `train.csv` and `test.csv` from a directory.
Dataset load_dataset(const std::filesystem::path& dir, int horizon, int bp_length);

}  // namespace dcmin
