#include "dcmin/battery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcmin/errors.hpp"

namespace dcmin {

Curve::Curve(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
        throw ConfigError("curve needs at least two knots");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i].x) || !std::isfinite(knots_[i].value)) {
            throw ConfigError("curve knots must be finite");
        }
        if (i > 0 && !(knots_[i].x > knots_[i - 1].x)) {
            throw ConfigError("curve knot x-coordinates must be strictly increasing");
        }
    }
}

Curve Curve::constant(double value) { return Curve({{0.0, value}, {1.0, value}}); }

Curve Curve::linear(double at_empty, double at_full) {
    return Curve({{0.0, at_empty}, {1.0, at_full}});
}

double Curve::operator()(double x) const {
    if (x <= knots_.front().x) return knots_.front().value;
    if (x >= knots_.back().x) return knots_.back().value;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const Knot& k) { return v < k.x; });
    auto lo = hi - 1;
    const double t = (x - lo->x) / (hi->x - lo->x);
    return lo->value + t * (hi->value - lo->value);
}

double Curve::min_value() const {
    return std::min_element(knots_.begin(), knots_.end(),
                            [](const Knot& a, const Knot& b) { return a.value < b.value; })
        ->value;
}

double Curve::max_value() const {
    return std::max_element(knots_.begin(), knots_.end(),
                            [](const Knot& a, const Knot& b) { return a.value < b.value; })
        ->value;
}

double Curve::mean_on_unit_interval() const {
    std::vector<double> xs{0.0};
    for (const auto& k : knots_) {
        if (k.x > 0.0 && k.x < 1.0) xs.push_back(k.x);
    }
    xs.push_back(1.0);
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        area += 0.5 * ((*this)(xs[i - 1]) + (*this)(xs[i])) * (xs[i] - xs[i - 1]);
    }
    return area;
}

double nominal_charge(double capacity_kwh, const Curve& u_ocv) {
    return capacity_kwh * 3.6e6 / u_ocv.mean_on_unit_interval();
}

BatteryParams BatteryParams::defaults() {
    const Curve u_ocv = Curve::linear(340.0, 400.0);
    const double capacity = 27.3;
    return BatteryParams{
        .u_ocv = u_ocv,
        .r_charge = Curve::linear(0.08, 0.12),
        .r_discharge = Curve::linear(0.08, 0.12),
        .p_charge_max = Curve::constant(20.0),
        .p_discharge_max = Curve::constant(20.0),
        .q_nominal = nominal_charge(capacity, u_ocv),
        .rho_d = 0.95,
        .capacity_kwh = capacity,
    };
}

void BatteryParams::validate() const {
    if (!(q_nominal > 0.0) || !std::isfinite(q_nominal)) {
        throw ConfigError("battery q_nominal must be positive");
    }
    if (!(rho_d > 0.0 && rho_d <= 1.0)) {
        throw ConfigError("battery rho_d must lie in (0, 1]");
    }
    if (!(r_charge.min_value() > 0.0) || !(r_discharge.min_value() > 0.0)) {
        throw ConfigError("battery resistances must be positive");
    }
    if (p_charge_max.min_value() < 0.0 || p_discharge_max.min_value() < 0.0) {
        throw ConfigError("battery power limits must be non-negative");
    }
    if (!(u_ocv.min_value() > 0.0)) {
        throw ConfigError("battery open-circuit voltage must be positive");
    }
}

double battery_current(const BatteryParams& battery, double soc, double power_kw) {
    if (!(soc >= 0.0 && soc <= 1.0)) {
        throw InvalidSoc("state of charge " + std::to_string(soc) + " outside [0, 1]");
    }
    if (power_kw == 0.0) return 0.0;

    const double u = battery.u_ocv(soc);
    if (power_kw > 0.0) {
        const double r = battery.r_charge(soc);
        const double p_w = power_kw * 1000.0;
        return (-u + std::sqrt(u * u + 4.0 * r * p_w)) / (2.0 * r);
    }
    const double r = battery.r_discharge(soc);
    const double p_w = -power_kw * 1000.0;
    const double disc = u * u - 4.0 * r * p_w;
    if (disc < 0.0) {
        throw DischargeDomainError("discharge power " + std::to_string(-power_kw) +
                                   " kW exceeds the cell limit at soc " + std::to_string(soc));
    }
    return (-u + std::sqrt(disc)) / (2.0 * r);
}

double soc_derivative(const BatteryParams& battery, double soc, double power_kw) {
    return battery_current(battery, soc, power_kw) / battery.q_nominal;
}

SocStep step_soc(const BatteryParams& battery, double soc, double power_kw, double dt_seconds) {
    if (!(soc >= 0.0 && soc <= 1.0)) {
        throw InvalidSoc("state of charge " + std::to_string(soc) + " outside [0, 1]");
    }
    SocStep out{soc, false};
    if (power_kw == 0.0 || dt_seconds <= 0.0) return out;

    const int substeps =
        std::max(1, static_cast<int>(std::ceil(dt_seconds / kEulerSubstepSeconds - 1e-9)));
    const double h = dt_seconds / substeps;
    for (int i = 0; i < substeps; ++i) {
        out.soc += h * soc_derivative(battery, out.soc, power_kw);
        if (out.soc > 1.0) {
            out.soc = 1.0;
            out.saturated = true;
        } else if (out.soc < 0.0) {
            out.soc = 0.0;
            out.saturated = true;
        }
    }
    return out;
}

ActionBounds action_bounds(const BatteryParams& battery, double soc_step) {
    double charge = battery.p_charge_max.min_value();
    double discharge = battery.p_discharge_max.min_value();
    if (soc_step > 0.0) {
        const int n = static_cast<int>(std::lround(1.0 / soc_step));
        for (int i = 0; i <= n; ++i) {
            const double x = std::min(1.0, i * soc_step);
            charge = std::min(charge, battery.p_charge_max(x));
            discharge = std::min(discharge, battery.p_discharge_max(x));
        }
    }
    return {-discharge, charge};
}

bool is_feasible(const BatteryParams& battery, double soc, double power_kw, double dt_seconds) {
    if (!(soc >= 0.0 && soc <= 1.0)) return false;
    if ((power_kw > 0.0 && soc >= 1.0) || (power_kw < 0.0 && soc <= 0.0)) return false;
    try {
        return !step_soc(battery, soc, power_kw, dt_seconds).saturated;
    } catch (const Error&) {
        return false;
    }
}

double clip_to_feasible(const BatteryParams& battery, double soc, double power_kw,
                        double dt_seconds) {
    if (is_feasible(battery, soc, power_kw, dt_seconds)) return power_kw;
    if (!(soc >= 0.0 && soc <= 1.0)) return 0.0;
    // Feasibility is monotone in |power| for a fixed sign.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (is_feasible(battery, soc, mid * power_kw, dt_seconds)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo * power_kw;
}

}  // namespace dcmin
