#include "dcmin/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dcmin/errors.hpp"

namespace dcmin {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) +
                          "'");
    }
    return v;
}

long long to_integer(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(text) +
                          "'");
    }
    return v;
}

int to_int(std::string_view text, std::string_view what) {
    const long long v = to_integer(text, what);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string(what) + ": out of range");
    }
    return static_cast<int>(v);
}

bool to_bool(std::string_view text, std::string_view what) {
    const auto t = lower(trim(text));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(std::string(what) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::string format_clock(int minute) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

}  // namespace

std::string to_string(Problem p) {
    switch (p) {
        case Problem::DEM: return "dem";
        case Problem::DDM: return "ddm";
        case Problem::MDM: return "mdm";
    }
    return "?";
}

std::string to_string(Preset p) { return p == Preset::Desk ? "desk" : "full"; }

std::string to_string(StateVariant v) {
    switch (v) {
        case StateVariant::S1: return "s1";
        case StateVariant::S2: return "s2";
        case StateVariant::S3: return "s3";
        case StateVariant::S4: return "s4";
    }
    return "?";
}

std::string to_string(ControllerKind k) { return k == ControllerKind::Lazy ? "lazy" : "heuristic"; }

Problem parse_problem(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "dem") return Problem::DEM;
    if (t == "ddm") return Problem::DDM;
    if (t == "mdm") return Problem::MDM;
    throw ConfigError("unknown problem '" + std::string(text) + "' (dem|ddm|mdm)");
}

Preset parse_preset(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "desk") return Preset::Desk;
    if (t == "full") return Preset::Full;
    throw ConfigError("unknown preset '" + std::string(text) + "' (desk|full)");
}

StateVariant parse_variant(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "s1") return StateVariant::S1;
    if (t == "s2") return StateVariant::S2;
    if (t == "s3") return StateVariant::S3;
    if (t == "s4") return StateVariant::S4;
    throw ConfigError("unknown state variant '" + std::string(text) + "' (s1|s2|s3|s4)");
}

ControllerKind parse_controller(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "lazy") return ControllerKind::Lazy;
    if (t == "heuristic") return ControllerKind::Heuristic;
    throw ConfigError("unknown controller '" + std::string(text) + "' (lazy|heuristic)");
}

Curve parse_curve(std::string_view text) {
    std::vector<Knot> knots;
    for (auto item : split_fields(text, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
            throw ConfigError("curve knot '" + std::string(item) + "' is not x:value");
        }
        knots.push_back({to_double(item.substr(0, colon), "curve x"),
                         to_double(item.substr(colon + 1), "curve value")});
    }
    try {
        return Curve(std::move(knots));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string format_curve(const Curve& curve) {
    std::string out;
    for (const auto& k : curve.knots()) {
        if (!out.empty()) out += ',';
        out += format_number(k.x) + ':' + format_number(k.value);
    }
    return out;
}

TariffSchedule TariffSettings::schedule(int horizon, double dt_hours) const {
    return TariffSchedule::time_of_use(on_peak, purchase_on_peak, purchase_off_peak, sell,
                                       mu_daily, mu_monthly, fees, horizon, dt_hours);
}

ExperimentConfig ExperimentConfig::for_preset(Preset preset) {
    ExperimentConfig c;
    c.preset = preset;
    if (preset == Preset::Full) {
        c.grid = StateGrid::full();
        c.n_train = 300;
        c.n_test = 100;
    }
    return c;
}

StateVariant ExperimentConfig::effective_variant() const {
    if (variant) return *variant;
    return problem == Problem::DEM ? StateVariant::S3 : StateVariant::S4;
}

TariffSchedule ExperimentConfig::tariff_schedule() const {
    return tariff.schedule(grid.horizon, grid.dt_hours());
}

CostKind ExperimentConfig::cost_kind() const {
    switch (problem) {
        case Problem::DEM: return CostKind::c1();
        case Problem::DDM: return CostKind::c2(tariff.mu_daily);
        case Problem::MDM: return CostKind::c3(tariff.mu_monthly);
    }
    return CostKind::c1();
}

PeakResetMode ExperimentConfig::peak_reset() const {
    return problem == Problem::MDM ? PeakResetMode::Monthly : PeakResetMode::Daily;
}

SynthProfile ExperimentConfig::synth_profile() const {
    SynthProfile p = synth;
    p.horizon = grid.horizon;
    p.dt_hours = grid.dt_hours();
    return p;
}

DispatchModel ExperimentConfig::model() const {
    return DispatchModel(grid, battery, tariff_schedule(), cost_kind());
}

void ExperimentConfig::validate() const {
    grid.validate();
    battery.validate();
    tariff_schedule().validate();
    if (problem != Problem::DEM && !uses_peak(effective_variant())) {
        throw ConfigError("problem " + to_string(problem) + " needs the s4 state variant");
    }
    if (n_train < 1 || n_test < 1) throw ConfigError("n_train and n_test must be at least 1");
    if (bp_length < 1) throw ConfigError("bp_len must be at least 1");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (synth.pv_min_scale < 0.0 || synth.pv_min_scale > 1.0) {
        throw ConfigError("synth.pv_min_scale must lie in [0, 1]");
    }
    if (synth.dip_probability < 0.0 || synth.dip_probability > 1.0) {
        throw ConfigError("synth.dip_probability must lie in [0, 1]");
    }
    if (synth.business_min_kw > synth.business_max_kw) {
        throw ConfigError("synth.business_min_kw exceeds business_max_kw");
    }
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"paths", {"data_dir", "artifacts_dir", "eval_dir"}},
        {"experiment",
         {"preset", "problem", "variant", "fallback", "recouple", "seed", "n_train", "n_test",
          "bp_len", "max_iters", "jobs"}},
        {"grid",
         {"horizon", "dt_seconds", "soc_step", "delta_min", "delta_max", "delta_step",
          "peak_max", "peak_step", "action_min", "action_max", "action_step"}},
        {"tariff",
         {"on_peak", "purchase_on_peak", "purchase_off_peak", "sell", "mu_daily", "mu_monthly",
          "fees"}},
        {"battery",
         {"u_ocv", "r_charge", "r_discharge", "p_charge_max", "p_discharge_max", "capacity_kwh",
          "q_nominal", "rho_d"}},
        {"synth",
         {"pv_peak_kw", "pv_min_scale", "dip_probability", "base_load_kw", "business_min_kw",
          "business_max_kw", "noise_kw"}},
    };
    return keys;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, std::optional<Preset> preset_override) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError("config: unknown key " + section + "." + key);
            }
        }
    }

    auto get = [&](const char* path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
            return std::string(trim(*v));
        }
        return std::nullopt;
    };

    Preset preset = Preset::Desk;
    if (preset_override) {
        preset = *preset_override;
    } else if (auto v = get("experiment.preset")) {
        preset = parse_preset(*v);
    }
    ExperimentConfig c = ExperimentConfig::for_preset(preset);

    if (auto v = get("paths.data_dir")) c.paths.data_dir = *v;
    if (auto v = get("paths.artifacts_dir")) c.paths.artifacts_dir = *v;
    if (auto v = get("paths.eval_dir")) c.paths.eval_dir = *v;

    if (auto v = get("experiment.problem")) c.problem = parse_problem(*v);
    if (auto v = get("experiment.variant")) c.variant = parse_variant(*v);
    if (auto v = get("experiment.fallback")) c.fallback = parse_controller(*v);
    if (auto v = get("experiment.recouple")) c.recouple = to_bool(*v, "experiment.recouple");
    if (auto v = get("experiment.seed")) {
        const long long s = to_integer(*v, "experiment.seed");
        if (s < 0) throw ConfigError("experiment.seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = get("experiment.n_train")) c.n_train = to_int(*v, "experiment.n_train");
    if (auto v = get("experiment.n_test")) c.n_test = to_int(*v, "experiment.n_test");
    if (auto v = get("experiment.bp_len")) c.bp_length = to_int(*v, "experiment.bp_len");
    if (auto v = get("experiment.max_iters")) c.max_iters = to_int(*v, "experiment.max_iters");
    if (auto v = get("experiment.jobs")) c.jobs = to_int(*v, "experiment.jobs");

    StateGrid& g = c.grid;
    if (auto v = get("grid.horizon")) g.horizon = to_int(*v, "grid.horizon");
    if (auto v = get("grid.dt_seconds")) g.dt_seconds = to_double(*v, "grid.dt_seconds");
    auto value_or = [&](const char* key, double fallback) {
        auto v = get(key);
        return v ? to_double(*v, key) : fallback;
    };
    g.soc = Axis::range(0.0, 1.0, value_or("grid.soc_step", g.soc.step));
    g.delta = Axis::range(value_or("grid.delta_min", g.delta.min),
                          value_or("grid.delta_max", g.delta.max()),
                          value_or("grid.delta_step", g.delta.step));
    g.peak = Axis::range(0.0, value_or("grid.peak_max", g.peak.max()),
                         value_or("grid.peak_step", g.peak.step));
    g.action = Axis::range(value_or("grid.action_min", g.action.min),
                           value_or("grid.action_max", g.action.max()),
                           value_or("grid.action_step", g.action.step));

    TariffSettings& t = c.tariff;
    if (auto v = get("tariff.on_peak")) t.on_peak = v->empty() ? std::vector<OnPeakWindow>{}
                                                                : parse_on_peak_windows(*v);
    if (auto v = get("tariff.purchase_on_peak")) t.purchase_on_peak = to_double(*v, "tariff.purchase_on_peak");
    if (auto v = get("tariff.purchase_off_peak")) t.purchase_off_peak = to_double(*v, "tariff.purchase_off_peak");
    if (auto v = get("tariff.sell")) t.sell = to_double(*v, "tariff.sell");
    if (auto v = get("tariff.mu_daily")) t.mu_daily = to_double(*v, "tariff.mu_daily");
    if (auto v = get("tariff.mu_monthly")) t.mu_monthly = to_double(*v, "tariff.mu_monthly");
    if (auto v = get("tariff.fees")) t.fees = to_double(*v, "tariff.fees");

    BatteryParams& b = c.battery;
    if (auto v = get("battery.u_ocv")) b.u_ocv = parse_curve(*v);
    if (auto v = get("battery.r_charge")) b.r_charge = parse_curve(*v);
    if (auto v = get("battery.r_discharge")) b.r_discharge = parse_curve(*v);
    if (auto v = get("battery.p_charge_max")) b.p_charge_max = parse_curve(*v);
    if (auto v = get("battery.p_discharge_max")) b.p_discharge_max = parse_curve(*v);
    if (auto v = get("battery.capacity_kwh")) b.capacity_kwh = to_double(*v, "battery.capacity_kwh");
    if (auto v = get("battery.rho_d")) b.rho_d = to_double(*v, "battery.rho_d");
    if (auto v = get("battery.q_nominal")) {
        b.q_nominal = to_double(*v, "battery.q_nominal");
    } else {
        b.q_nominal = nominal_charge(b.capacity_kwh, b.u_ocv);
    }

    SynthProfile& s = c.synth;
    if (auto v = get("synth.pv_peak_kw")) s.pv_peak_kw = to_double(*v, "synth.pv_peak_kw");
    if (auto v = get("synth.pv_min_scale")) s.pv_min_scale = to_double(*v, "synth.pv_min_scale");
    if (auto v = get("synth.dip_probability")) s.dip_probability = to_double(*v, "synth.dip_probability");
    if (auto v = get("synth.base_load_kw")) s.base_load_kw = to_double(*v, "synth.base_load_kw");
    if (auto v = get("synth.business_min_kw")) s.business_min_kw = to_double(*v, "synth.business_min_kw");
    if (auto v = get("synth.business_max_kw")) s.business_max_kw = to_double(*v, "synth.business_max_kw");
    if (auto v = get("synth.noise_kw")) s.noise_kw = to_double(*v, "synth.noise_kw");

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<Preset> preset_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, preset_override);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
    const auto n = [](double v) { return format_number(v); };
    out << "[paths]\n"
        << "data_dir = " << c.paths.data_dir.string() << '\n'
        << "artifacts_dir = " << c.paths.artifacts_dir.string() << '\n'
        << "eval_dir = " << c.paths.eval_dir.string() << "\n\n";

    out << "[experiment]\n"
        << "preset = " << to_string(c.preset) << '\n'
        << "problem = " << to_string(c.problem) << '\n'
        << "variant = " << to_string(c.effective_variant()) << '\n'
        << "fallback = " << to_string(c.fallback) << '\n'
        << "recouple = " << (c.recouple ? "true" : "false") << '\n'
        << "seed = " << c.seed << '\n'
        << "n_train = " << c.n_train << '\n'
        << "n_test = " << c.n_test << '\n'
        << "bp_len = " << c.bp_length << '\n'
        << "max_iters = " << c.max_iters << '\n'
        << "jobs = " << c.jobs << "\n\n";

    const StateGrid& g = c.grid;
    out << "[grid]\n"
        << "horizon = " << g.horizon << '\n'
        << "dt_seconds = " << n(g.dt_seconds) << '\n'
        << "soc_step = " << n(g.soc.step) << '\n'
        << "delta_min = " << n(g.delta.min) << '\n'
        << "delta_max = " << n(g.delta.max()) << '\n'
        << "delta_step = " << n(g.delta.step) << '\n'
        << "peak_max = " << n(g.peak.max()) << '\n'
        << "peak_step = " << n(g.peak.step) << '\n'
        << "action_min = " << n(g.action.min) << '\n'
        << "action_max = " << n(g.action.max()) << '\n'
        << "action_step = " << n(g.action.step) << "\n\n";

    std::string windows;
    for (const auto& w : c.tariff.on_peak) {
        if (!windows.empty()) windows += ',';
        windows += format_clock(w.start_minute) + '-' + format_clock(w.end_minute);
    }
    out << "[tariff]\n"
        << "on_peak = " << windows << '\n'
        << "purchase_on_peak = " << n(c.tariff.purchase_on_peak) << '\n'
        << "purchase_off_peak = " << n(c.tariff.purchase_off_peak) << '\n'
        << "sell = " << n(c.tariff.sell) << '\n'
        << "mu_daily = " << n(c.tariff.mu_daily) << '\n'
        << "mu_monthly = " << n(c.tariff.mu_monthly) << '\n'
        << "fees = " << n(c.tariff.fees) << "\n\n";

    const BatteryParams& b = c.battery;
    out << "[battery]\n"
        << "u_ocv = " << format_curve(b.u_ocv) << '\n'
        << "r_charge = " << format_curve(b.r_charge) << '\n'
        << "r_discharge = " << format_curve(b.r_discharge) << '\n'
        << "p_charge_max = " << format_curve(b.p_charge_max) << '\n'
        << "p_discharge_max = " << format_curve(b.p_discharge_max) << '\n'
        << "capacity_kwh = " << n(b.capacity_kwh) << '\n'
        << "q_nominal = " << n(b.q_nominal) << '\n'
        << "rho_d = " << n(b.rho_d) << "\n\n";

    const SynthProfile& s = c.synth;
    out << "[synth]\n"
        << "pv_peak_kw = " << n(s.pv_peak_kw) << '\n'
        << "pv_min_scale = " << n(s.pv_min_scale) << '\n'
        << "dip_probability = " << n(s.dip_probability) << '\n'
        << "base_load_kw = " << n(s.base_load_kw) << '\n'
        << "business_min_kw = " << n(s.business_min_kw) << '\n'
        << "business_max_kw = " << n(s.business_max_kw) << '\n'
        << "noise_kw = " << n(s.noise_kw) << '\n';
}

}  // namespace dcmin
