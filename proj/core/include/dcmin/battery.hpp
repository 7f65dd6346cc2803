#pragma once

#include <span>
#include <vector>

namespace dcmin {

struct Knot {
    double x;
    double value;

    bool operator==(const Knot&) const = default;
};

/// Piecewise-linear function of the state of charge, clamped outside the
/// first and last knot. Holds the experimentally measured battery curves.
class Curve {
public:
    /// Requires at least two knots with strictly increasing, finite x.
    explicit Curve(std::vector<Knot> knots);

    static Curve constant(double value);
    static Curve linear(double at_empty, double at_full);

    double operator()(double x) const;

    std::span<const Knot> knots() const { return knots_; }
    double min_value() const;
    double max_value() const;

    /// Mean of the curve over x in [0, 1] (exact for piecewise-linear).
    double mean_on_unit_interval() const;

    bool operator==(const Curve&) const = default;

private:
    std::vector<Knot> knots_;
};

/// Equivalent-circuit battery. Powers are in kW at this interface and only
/// converted to W inside battery_current().
struct BatteryParams {
    Curve u_ocv;            // [V]
    Curve r_charge;         // [Ohm]
    Curve r_discharge;      // [Ohm]
    Curve p_charge_max;     // [kW]
    Curve p_discharge_max;  // [kW]
    double q_nominal;       // [A s]
    double rho_d;           // discharge efficiency, (0, 1]
    double capacity_kwh;

    /// Synthetic stand-in for the measured curves: U_ocv 340 -> 400 V,
    /// R_c = R_d 0.08 -> 0.12 Ohm, 20 kW power limits, 27.3 kWh, rho_d 0.95.
    static BatteryParams defaults();

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool operator==(const BatteryParams&) const = default;
};

/// capacity [kWh] * 3.6e6 / mean(U_ocv) -> [A s].
double nominal_charge(double capacity_kwh, const Curve& u_ocv);

/// Battery current [A] for signed power `power_kw` (> 0 charges).
/// Throws InvalidSoc for soc outside [0, 1] and DischargeDomainError when
/// the discharge power exceeds what the cell can physically deliver.
double battery_current(const BatteryParams& battery, double soc, double power_kw);

/// dx/dt [1/s].
double soc_derivative(const BatteryParams& battery, double soc, double power_kw);

struct SocStep {
    double soc;
    bool saturated;  // the [0, 1] clamp engaged during integration
};

/// Length of one explicit-Euler sub-step; a 600 s step uses 60 of them.
inline constexpr double kEulerSubstepSeconds = 10.0;

/// Integrates the SOC dynamics over dt_seconds at constant power with
/// explicit Euler sub-steps, clamping to [0, 1].
SocStep step_soc(const BatteryParams& battery, double soc, double power_kw, double dt_seconds);

struct ActionBounds {
    double min_kw;
    double max_kw;
};

/// a_max = min_x P_c^max(x), a_min = -min_x P_d^max(x); the minimum runs
/// over the curve knots and an SOC grid of the given step.
ActionBounds action_bounds(const BatteryParams& battery, double soc_step = 0.01);

/// True iff step_soc runs without a domain error and without saturating.
bool is_feasible(const BatteryParams& battery, double soc, double power_kw, double dt_seconds);

/// Largest-magnitude power with the sign of `power_kw`, no larger in
/// magnitude, that is feasible from `soc`. Returns 0 when nothing is.
double clip_to_feasible(const BatteryParams& battery, double soc, double power_kw,
                        double dt_seconds);

}  // namespace dcmin
