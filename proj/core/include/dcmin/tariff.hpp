#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace dcmin {

/// Half-open clock interval [start, end) in minutes after midnight.
struct OnPeakWindow {
    int start_minute;
    int end_minute;

    bool operator==(const OnPeakWindow&) const = default;
};

/// Parses "HH:MM-HH:MM[,HH:MM-HH:MM...]". Throws ConfigError.
std::vector<OnPeakWindow> parse_on_peak_windows(std::string_view text);

/// Time-of-use tariff stored per step so arbitrary price shapes can be loaded.
struct TariffSchedule {
    std::vector<double> purchase_price;  // [$/kWh], one per step
    std::vector<double> sell_price;      // [$/kWh], one per step
    std::vector<int> on_peak_steps;      // sorted step indices
    double mu_daily = 0.0;               // [$/kW]
    double mu_monthly = 0.0;             // [$/kW]
    double fees = 0.0;                   // [$] per bill
    double dt_hours = 1.0 / 6.0;

    /// Builds per-step prices from clock windows. A step is on-peak when its
    /// start time falls inside a window.
    static TariffSchedule time_of_use(std::span<const OnPeakWindow> windows, double pp_on,
                                      double pp_off, double sp, double mu_daily,
                                      double mu_monthly, double fees, int horizon,
                                      double dt_hours);

    /// 6-9 am and 6-9 pm on-peak at 0.1936 $/kWh, 0.1330 off-peak, selling at
    /// 0.098; mu_d = 0.5 $/kW, mu_m = 10 $/kW; 144 ten-minute steps.
    static TariffSchedule defaults(int horizon = 144, double dt_hours = 1.0 / 6.0);

    int horizon() const { return static_cast<int>(purchase_price.size()); }
    bool is_on_peak(int step) const;
    /// -1 when the tariff has no on-peak step.
    int last_on_peak_step() const;

    void validate() const;

    bool operator==(const TariffSchedule&) const = default;
};

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }
inline double negative_part(double v) { return v < 0.0 ? -v : 0.0; }

/// Net power at the meter [kW]: p_cons - p_pv + a+ - rho_d a-.
double p_meter(double p_cons, double p_pv, double action_kw, double rho_d);

/// Energy charge of one step with the meter power held constant over it.
double step_energy_cost(double meter_kw, double purchase_price, double sell_price,
                        double dt_hours);

/// Throws LengthMismatch when the trace length differs from the tariff horizon.
double day_energy_charge(std::span<const double> meter_kw, const TariffSchedule& tariff);

/// mu * peak. Throws NegativePeak.
double demand_charge(double peak_kw, double mu);

enum class BillingMode { EnergyOnly, Daily, Monthly };

struct BillBreakdown {
    double energy_charge = 0.0;
    double demand_charge = 0.0;
    double fees = 0.0;
    double total = 0.0;
};

/// Bill for a set of day meter traces. Daily mode charges mu_daily on each
/// day's own peak; Monthly mode charges mu_monthly once on the overall peak
/// (pass the whole billing period). Throws EmptyInput for an empty set.
BillBreakdown bill(std::span<const std::vector<double>> day_meter_traces,
                   const TariffSchedule& tariff, BillingMode mode);

}  // namespace dcmin
