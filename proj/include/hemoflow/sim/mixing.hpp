#pragma once

#include <stdexcept>

namespace hemoflow::sim {

// Concentration in a fully mixed beaker that accumulates infused volume.
// With infused volume v(t) = Q * t (Q in mL/min, t in seconds):
//
//   c(t) = c_stock * v(t) / (V0 + v(t))
//
// Outflow is ignored, so c(t) climbs monotonically toward c_stock without
// reaching it.
inline double concentration_at(double t_s, double rate_ml_min, double initial_volume_ml,
                               double stock_g_per_l) {
    if (!(t_s >= 0.0)) throw std::invalid_argument("concentration_at: time must be >= 0");
    if (!(rate_ml_min >= 0.0)) throw std::invalid_argument("concentration_at: flow rate must be >= 0");
    if (!(initial_volume_ml > 0.0)) throw std::invalid_argument("concentration_at: V0 must be > 0");
    if (!(stock_g_per_l >= 0.0)) throw std::invalid_argument("concentration_at: stock concentration must be >= 0");
    const double infused_ml = rate_ml_min * t_s / 60.0;
    return stock_g_per_l * infused_ml / (initial_volume_ml + infused_ml);
}

}  // namespace hemoflow::sim
