#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "hemoflow/spectral/channels.hpp"

namespace hemoflow::spectral {

// Attenuation model for transmission measurements through an absorbing,
// well-mixed medium:
//
//   I = I0 * exp(-mu * c * L)
//
// with I0 the incident intensity (detector counts), mu the per-substance
// absorption coefficient in 1/((g/L)*mm), c the concentration in g/L and L
// the optical path length in mm. The two-wavelength ratio of such
// transmissions collapses to
//
//   I(ch_i) / I(ch_j) = C * exp(-(mu_i - mu_j) * c * L),  C = I0_i / I0_j
//
// which is what the ratio analysis below evaluates.

// Geometry plus per-frame-channel incident baselines of one capsule build.
struct OpticalPath {
    double path_length_mm = 3.0;
    std::array<double, kFrameChannels> incident{};  // baseline I0, detector counts

    void validate() const {
        if (!(path_length_mm > 0.0)) throw std::invalid_argument("OpticalPath: path length must be > 0");
        for (std::size_t k = 0; k < incident.size(); ++k) {
            if (!(incident[k] > 0.0) || !std::isfinite(incident[k]))
                throw std::invalid_argument("OpticalPath: baseline intensity missing for channel " +
                                            std::to_string(k + 1));
        }
    }
};

// Parameters of the collapsed two-wavelength ratio model.
struct RatioModelParams {
    double intensity_ratio_c;  // C = I0(ch_i) / I0(ch_j), dimensionless
    double delta_mu;           // mu_i - mu_j, 1/((g/L)*mm)
    double path_length_mm;

    void validate() const {
        if (!(intensity_ratio_c > 0.0)) throw std::invalid_argument("RatioModelParams: C must be > 0");
        if (!(path_length_mm > 0.0)) throw std::invalid_argument("RatioModelParams: L must be > 0");
        if (!std::isfinite(delta_mu)) throw std::invalid_argument("RatioModelParams: delta_mu must be finite");
    }
};

// Transmitted intensity for one channel.
inline double transmit(double incident, double mu, double concentration_g_per_l, double path_length_mm) {
    if (!(incident > 0.0)) throw std::invalid_argument("transmit: incident intensity must be > 0");
    if (!(mu >= 0.0)) throw std::invalid_argument("transmit: absorption coefficient must be >= 0");
    if (!(concentration_g_per_l >= 0.0)) throw std::invalid_argument("transmit: concentration must be >= 0");
    if (!(path_length_mm > 0.0)) throw std::invalid_argument("transmit: path length must be > 0");
    return incident * std::exp(-mu * concentration_g_per_l * path_length_mm);
}

// Ratio of two channels of one 24-channel frame. Both channels must come
// from the same illumination state; a cross-state ratio would fold the
// emitter difference into the result and is rejected.
inline double intensity_ratio(const std::array<double, kFrameChannels>& values, int channel_i, int channel_j) {
    if (channel_i < 1 || channel_i > kFrameChannels || channel_j < 1 || channel_j > kFrameChannels)
        throw std::out_of_range("intensity_ratio: channel index out of range");
    if (!ChannelBank::same_illumination_state(channel_i, channel_j))
        throw std::invalid_argument("intensity_ratio: channels belong to different illumination states");
    const double denom = values[static_cast<std::size_t>(channel_j - 1)];
    if (!(denom > 0.0)) throw std::domain_error("intensity_ratio: zero or negative channel reading in denominator");
    return values[static_cast<std::size_t>(channel_i - 1)] / denom;
}

// Closed-form ratio prediction C * exp(-delta_mu * c * L).
inline double ratio_predict(const RatioModelParams& params, double concentration_g_per_l) {
    params.validate();
    if (!(concentration_g_per_l >= 0.0)) throw std::invalid_argument("ratio_predict: concentration must be >= 0");
    return params.intensity_ratio_c *
           std::exp(-params.delta_mu * concentration_g_per_l * params.path_length_mm);
}

struct MonotoneResult {
    bool ok = true;
    std::size_t first_violation = 0;  // index of the first non-decreasing element when !ok
};

// True iff each successive element decreases, allowing `tolerance` of upward
// slack: v[k+1] < v[k] + tolerance. Zero tolerance means strictly
// decreasing; noisy series pass a small positive tolerance instead.
inline MonotoneResult check_monotone_decreasing(std::span<const double> series, double tolerance) {
    if (series.size() < 2)
        throw std::invalid_argument("check_monotone_decreasing: need at least 2 elements");
    if (!(tolerance >= 0.0))
        throw std::invalid_argument("check_monotone_decreasing: tolerance must be >= 0");
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        if (!(series[k + 1] < series[k] + tolerance)) return {false, k + 1};
    }
    return {true, 0};
}

}  // namespace hemoflow::spectral
