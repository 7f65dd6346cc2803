#pragma once

#include <string>
#include <vector>

namespace dcmin {

/// One day of step-averaged consumption and PV production [kW].
struct DayTrace {
    std::string day_id;
    std::vector<double> p_cons;
    std::vector<double> p_pv;

    int size() const { return static_cast<int>(p_cons.size()); }
    /// Consumption minus production at `step`.
    double delta(int step) const {
        return p_cons[static_cast<std::size_t>(step)] - p_pv[static_cast<std::size_t>(step)];
    }

    bool operator==(const DayTrace&) const = default;
};

}  // namespace dcmin
