#include "dcmin/tariff.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "dcmin/errors.hpp"

namespace dcmin {
namespace {

int parse_clock(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("bad clock time '" + std::string(text) + "', expected HH:MM");
    }
    int hours = 0;
    int minutes = 0;
    const auto h = text.substr(0, colon);
    const auto m = text.substr(colon + 1);
    auto [ph, eh] = std::from_chars(h.data(), h.data() + h.size(), hours);
    auto [pm, em] = std::from_chars(m.data(), m.data() + m.size(), minutes);
    if (eh != std::errc{} || em != std::errc{} || ph != h.data() + h.size() ||
        pm != m.data() + m.size() || hours < 0 || hours > 24 || minutes < 0 || minutes > 59 ||
        (hours == 24 && minutes != 0)) {
        throw ConfigError("bad clock time '" + std::string(text) + "', expected HH:MM");
    }
    return hours * 60 + minutes;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<OnPeakWindow> parse_on_peak_windows(std::string_view text) {
    std::vector<OnPeakWindow> windows;
    text = trim(text);
    if (text.empty()) return windows;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            throw ConfigError("bad on-peak window '" + std::string(item) +
                              "', expected HH:MM-HH:MM");
        }
        OnPeakWindow w{parse_clock(trim(item.substr(0, dash))),
                       parse_clock(trim(item.substr(dash + 1)))};
        if (w.end_minute <= w.start_minute) {
            throw ConfigError("on-peak window '" + std::string(item) + "' is empty");
        }
        windows.push_back(w);
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return windows;
}

TariffSchedule TariffSchedule::time_of_use(std::span<const OnPeakWindow> windows, double pp_on,
                                           double pp_off, double sp, double mu_daily,
                                           double mu_monthly, double fees, int horizon,
                                           double dt_hours) {
    TariffSchedule t;
    t.purchase_price.assign(static_cast<std::size_t>(horizon), pp_off);
    t.sell_price.assign(static_cast<std::size_t>(horizon), sp);
    t.mu_daily = mu_daily;
    t.mu_monthly = mu_monthly;
    t.fees = fees;
    t.dt_hours = dt_hours;
    for (int step = 0; step < horizon; ++step) {
        const double start_minute = step * dt_hours * 60.0;
        for (const auto& w : windows) {
            if (start_minute >= w.start_minute - 1e-9 && start_minute < w.end_minute - 1e-9) {
                t.on_peak_steps.push_back(step);
                t.purchase_price[static_cast<std::size_t>(step)] = pp_on;
                break;
            }
        }
    }
    return t;
}

TariffSchedule TariffSchedule::defaults(int horizon, double dt_hours) {
    const OnPeakWindow windows[] = {{6 * 60, 9 * 60}, {18 * 60, 21 * 60}};
    return time_of_use(windows, 0.1936, 0.1330, 0.098, 0.5, 10.0, 0.0, horizon, dt_hours);
}

bool TariffSchedule::is_on_peak(int step) const {
    return std::binary_search(on_peak_steps.begin(), on_peak_steps.end(), step);
}

int TariffSchedule::last_on_peak_step() const {
    return on_peak_steps.empty() ? -1 : on_peak_steps.back();
}

void TariffSchedule::validate() const {
    if (purchase_price.size() != sell_price.size()) {
        throw ConfigError("purchase and sell price arrays differ in length");
    }
    if (purchase_price.empty()) throw ConfigError("tariff horizon is empty");
    for (std::size_t i = 0; i < purchase_price.size(); ++i) {
        if (!(purchase_price[i] >= 0.0) || !(sell_price[i] >= 0.0)) {
            throw ConfigError("prices must be non-negative");
        }
    }
    if (!(mu_daily >= 0.0) || !(mu_monthly >= 0.0)) {
        throw ConfigError("demand-charge rates must be non-negative");
    }
    if (!(dt_hours > 0.0)) throw ConfigError("dt_hours must be positive");
    if (!std::is_sorted(on_peak_steps.begin(), on_peak_steps.end())) {
        throw ConfigError("on-peak steps must be sorted");
    }
}

double p_meter(double p_cons, double p_pv, double action_kw, double rho_d) {
    return p_cons - p_pv + positive_part(action_kw) - rho_d * negative_part(action_kw);
}

double step_energy_cost(double meter_kw, double purchase_price, double sell_price,
                        double dt_hours) {
    return purchase_price * positive_part(meter_kw) * dt_hours -
           sell_price * negative_part(meter_kw) * dt_hours;
}

double day_energy_charge(std::span<const double> meter_kw, const TariffSchedule& tariff) {
    if (static_cast<int>(meter_kw.size()) != tariff.horizon()) {
        throw LengthMismatch("meter trace has " + std::to_string(meter_kw.size()) +
                             " steps, tariff has " + std::to_string(tariff.horizon()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < meter_kw.size(); ++i) {
        total += step_energy_cost(meter_kw[i], tariff.purchase_price[i], tariff.sell_price[i],
                                  tariff.dt_hours);
    }
    return total;
}

double demand_charge(double peak_kw, double mu) {
    if (peak_kw < 0.0) throw NegativePeak("demand peak must be non-negative");
    return mu * peak_kw;
}

BillBreakdown bill(std::span<const std::vector<double>> day_meter_traces,
                   const TariffSchedule& tariff, BillingMode mode) {
    if (day_meter_traces.empty()) throw EmptyInput("bill needs at least one day");

    BillBreakdown b;
    b.fees = tariff.fees;
    double overall_peak = 0.0;
    for (const auto& day : day_meter_traces) {
        b.energy_charge += day_energy_charge(day, tariff);
        double peak = 0.0;
        for (double m : day) peak = std::max(peak, positive_part(m));
        overall_peak = std::max(overall_peak, peak);
        if (mode == BillingMode::Daily) b.demand_charge += demand_charge(peak, tariff.mu_daily);
    }
    if (mode == BillingMode::Monthly) b.demand_charge = demand_charge(overall_peak, tariff.mu_monthly);
    b.total = b.fees + b.energy_charge + b.demand_charge;
    return b;
}

}  // namespace dcmin
