#include "dcmin/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <unordered_set>

#include "dcmin/errors.hpp"

namespace dcmin {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_number(std::string_view text, std::size_t line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ParseError("cannot parse number '" + std::string(text) + "'", line);
    }
    if (!std::isfinite(v)) throw ParseError("non-finite number '" + std::string(text) + "'", line);
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

namespace {

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

void finish_day(DayTrace& day, const std::vector<bool>& seen, std::size_t line) {
    for (std::size_t step = 0; step < seen.size(); ++step) {
        if (!seen[step]) {
            throw MissingStep("day '" + day.day_id + "' is missing step " + std::to_string(step) +
                              " (block ending before line " + std::to_string(line) + ")");
        }
    }
}

}  // namespace

std::vector<DayTrace> read_csv(std::istream& in, int horizon) {
    std::string raw;
    std::size_t line_no = 0;
    if (!std::getline(in, raw)) throw ParseError("empty file, expected a header", 1);
    ++line_no;
    if (strip_cr(raw) != kTraceHeader) {
        throw ParseError("expected header '" + std::string(kTraceHeader) + "'", line_no);
    }

    const auto h = static_cast<std::size_t>(horizon);
    std::vector<DayTrace> days;
    std::vector<bool> seen;
    std::unordered_set<std::string> finished;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = strip_cr(raw);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 4) throw ParseError("expected 4 fields", line_no);

        const std::string id(f[0]);
        if (id.empty()) throw ParseError("empty day_id", line_no);
        if (days.empty() || days.back().day_id != id) {
            if (!days.empty()) {
                finish_day(days.back(), seen, line_no);
                finished.insert(days.back().day_id);
            }
            if (finished.contains(id)) {
                throw ParseError("rows of day '" + id + "' are not contiguous", line_no);
            }
            days.push_back(DayTrace{id, std::vector<double>(h, 0.0), std::vector<double>(h, 0.0)});
            seen.assign(h, false);
        }

        int step = -1;
        auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), step);
        if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) {
            throw ParseError("bad step '" + std::string(f[1]) + "'", line_no);
        }
        if (step < 0 || step >= horizon) {
            throw ParseError("step " + std::to_string(step) + " outside 0.." +
                                 std::to_string(horizon - 1),
                             line_no);
        }
        const auto s = static_cast<std::size_t>(step);
        if (seen[s]) throw ParseError("duplicate step " + std::to_string(step), line_no);

        const double cons = parse_number(f[2], line_no);
        const double pv = parse_number(f[3], line_no);
        if (cons < 0.0 || pv < 0.0) {
            throw NegativePower("line " + std::to_string(line_no) + ": negative power in day '" +
                                id + "'");
        }
        days.back().p_cons[s] = cons;
        days.back().p_pv[s] = pv;
        seen[s] = true;
    }
    if (!days.empty()) finish_day(days.back(), seen, line_no + 1);
    return days;
}

std::vector<DayTrace> load_csv(const std::filesystem::path& path, int horizon) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_csv(in, horizon);
}

void write_csv(std::ostream& out, std::span<const DayTrace> days) {
    out << kTraceHeader << '\n';
    for (const auto& d : days) {
        for (int step = 0; step < d.size(); ++step) {
            const auto s = static_cast<std::size_t>(step);
            out << d.day_id << ',' << step << ',' << format_number(d.p_cons[s]) << ','
                << format_number(d.p_pv[s]) << '\n';
        }
    }
}

void save_csv(const std::filesystem::path& path, std::span<const DayTrace> days) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(out, days);
    if (!out) throw DataError("failed writing " + path.string());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

double smoothstep(double edge0, double edge1, double x) {
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double round_milli(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

DayTrace synth_day(std::uint64_t seed, int index, const SynthProfile& profile) {
    Uniform rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));

    const double pv_scale = rng(profile.pv_min_scale, 1.0);
    const bool dip = rng(0.0, 1.0) < profile.dip_probability;
    const double dip_center = rng(10.0, 16.0);
    const double dip_width = rng(0.5, 1.5);
    const double dip_depth = rng(0.3, 0.9);
    const double plateau = rng(profile.business_min_kw, profile.business_max_kw);

    char id[32];
    std::snprintf(id, sizeof id, "day%04d", index);
    DayTrace d{id, {}, {}};
    d.p_cons.resize(static_cast<std::size_t>(profile.horizon));
    d.p_pv.resize(d.p_cons.size());

    constexpr double sunrise = 6.5;
    constexpr double sunset = 19.5;
    for (int step = 0; step < profile.horizon; ++step) {
        const double hour = (step + 0.5) * profile.dt_hours;

        double pv = 0.0;
        if (hour > sunrise && hour < sunset) {
            const double bell = std::sin(std::numbers::pi * (hour - sunrise) / (sunset - sunrise));
            pv = profile.pv_peak_kw * pv_scale * std::pow(bell, 1.5);
            if (dip) {
                pv *= 1.0 - dip_depth * std::max(0.0, 1.0 - std::abs(hour - dip_center) / dip_width);
            }
            pv *= rng(0.9, 1.0);
        } else {
            (void)rng(0.9, 1.0);
        }

        const double business = smoothstep(7.0, 8.0, hour) * (1.0 - smoothstep(18.0, 19.0, hour));
        const double cons = profile.base_load_kw + plateau * business +
                            rng(-profile.noise_kw, profile.noise_kw);

        const auto s = static_cast<std::size_t>(step);
        d.p_cons[s] = round_milli(std::max(0.0, cons));
        d.p_pv[s] = round_milli(std::max(0.0, pv));
    }
    return d;
}

std::vector<DayTrace> synth_days(int n, std::uint64_t seed, const SynthProfile& profile,
                                 int first_index) {
    if (n < 1) throw ConfigError("synthetic day count must be at least 1");
    std::vector<DayTrace> days;
    days.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) days.push_back(synth_day(seed, first_index + i, profile));
    return days;
}

DataBounds data_bounds(std::span<const DayTrace> days, double delta_step, double peak_step,
                       double a_max) {
    if (days.empty()) throw EmptyInput("data_bounds needs at least one day");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& d : days) {
        for (int s = 0; s < d.size(); ++s) {
            lo = std::min(lo, d.delta(s));
            hi = std::max(hi, d.delta(s));
        }
    }
    DataBounds b;
    b.delta_min = std::floor(lo / delta_step) * delta_step;
    b.delta_max = std::ceil(hi / delta_step) * delta_step;
    b.peak_max = std::ceil((std::max(0.0, hi) + a_max) / peak_step) * peak_step;
    if (b.delta_min == 0.0) b.delta_min = 0.0;  // no -0
    return b;
}

std::vector<BillingPeriod> billing_periods(std::size_t n_days, int length) {
    if (length < 1) throw ConfigError("billing period length must be at least 1");
    const auto len = static_cast<std::size_t>(length);
    std::vector<BillingPeriod> out;
    for (std::size_t first = 0; first < n_days; first += len) {
        const std::size_t count = std::min(len, n_days - first);
        out.push_back({static_cast<int>(out.size()), first, count, count < len});
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path& dir, int horizon, int bp_length) {
    Dataset ds;
    ds.train = load_csv(dir / "train.csv", horizon);
    ds.test = load_csv(dir / "test.csv", horizon);
    std::unordered_set<std::string> train_ids;
    for (const auto& d : ds.train) train_ids.insert(d.day_id);
    for (const auto& d : ds.test) {
        if (train_ids.contains(d.day_id)) {
            throw DataError("day '" + d.day_id + "' appears in both train and test sets");
        }
    }
    ds.periods = billing_periods(ds.test.size(), bp_length);
    return ds;
}

}  // namespace dcmin
