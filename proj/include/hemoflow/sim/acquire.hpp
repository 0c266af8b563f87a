#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/sim/frame.hpp"
#include "hemoflow/sim/mixing.hpp"
#include "hemoflow/sim/scenario.hpp"
#include "hemoflow/spectral/beer_lambert.hpp"
#include "hemoflow/spectral/spectrum.hpp"
#include "hemoflow/util/rng.hpp"

namespace hemoflow::sim {

// All absorption tables a simulation run may touch: hemoglobin plus the
// interference mixtures.
struct SpectraLibrary {
    spectral::AbsorptionSpectrum hemoglobin;
    std::map<std::string, spectral::AbsorptionSpectrum> interference;

    const spectral::AbsorptionSpectrum& interference_spectrum(const std::string& id) const {
        auto it = interference.find(id);
        if (it == interference.end())
            throw std::invalid_argument("SpectraLibrary: unknown interference mixture '" + id + "'");
        return it->second;
    }
};

// One acquisition cycle at time t. Per frame channel k:
//
//   value = adc( I0(k) * bg(k) * exp(-mu_total(k) * L) * (1 + e_mult) + e_add )
//
// where mu_total combines the hemoglobin and interference contributions at
// their current mixed concentrations, e_* are the noise draws, and adc() is
// rounding plus clamping to the converter range. A noise-free NoiseModel
// yields the ideal real-valued detector response with no quantization.
inline SpectralFrame acquire_frame(double t_s, const InfusionScenario& scenario,
                                   const SpectraLibrary& spectra, const spectral::OpticalPath& path,
                                   const NoiseModel& noise, util::Rng& rng) {
    scenario.validate();
    path.validate();
    noise.validate();
    if (!(t_s >= 0.0)) throw std::invalid_argument("acquire_frame: time must be >= 0");

    const double hb_conc = concentration_at(t_s, scenario.flow_rate_ml_min, scenario.initial_volume_ml,
                                            scenario.blood_hb_g_per_l);
    double interference_conc = 0.0;
    const spectral::AbsorptionSpectrum* mixture = nullptr;
    if (!scenario.interference_id.empty()) {
        mixture = &spectra.interference_spectrum(scenario.interference_id);
        // premixed mixture is present from t=0; an infused mixture ramps
        interference_conc = scenario.interference_premixed_g_per_l +
                            concentration_at(t_s, scenario.interference_rate_ml_min,
                                             scenario.initial_volume_ml, scenario.interference_stock_g_per_l);
    }

    SpectralFrame frame;
    frame.timestamp_s = t_s;
    const double full_scale = noise.adc_full_scale();
    for (int k = 1; k <= spectral::kFrameChannels; ++k) {
        const int sensor = spectral::ChannelBank::sensor_channel_of(k);
        double exponent = spectra.hemoglobin.mu_at(sensor) * hb_conc;
        if (mixture != nullptr) exponent += mixture->mu_at(sensor) * interference_conc;

        const std::size_t idx = static_cast<std::size_t>(k - 1);
        double value = path.incident[idx] * scenario.background_transmission[idx] *
                       std::exp(-exponent * path.path_length_mm);

        if (!noise.noise_free()) {
            const double gain_noise = noise.multiplicative_sigma * rng.normal();
            const double read_noise = noise.additive_sigma * rng.normal();
            value = value * (1.0 + gain_noise) + read_noise;
            value = static_cast<double>(std::llround(value));
            if (value < 0.0) value = 0.0;
            if (value > full_scale) value = full_scale;
        }
        frame.values[idx] = value;
    }
    return frame;
}

// Full experiment run on the sample grid t = 0, dt, 2*dt, ...
// floor(duration / dt) frames. Deterministic in scenario.rng_seed.
inline Recording run_recording(const InfusionScenario& scenario, const SpectraLibrary& spectra,
                               const spectral::OpticalPath& path, const NoiseModel& noise,
                               const std::string& id = "") {
    scenario.validate();
    const auto frame_count = static_cast<std::size_t>(scenario.duration_s / scenario.sample_period_s);
    if (frame_count < static_cast<std::size_t>(kMinRecordingFrames))
        throw std::invalid_argument("run_recording: scenario shorter than " +
                                    std::to_string(kMinRecordingFrames) + " samples");

    util::Rng rng(scenario.rng_seed);
    Recording rec;
    rec.id = id;
    rec.scenario = scenario;
    rec.frames.reserve(frame_count);
    for (std::size_t k = 0; k < frame_count; ++k) {
        const double t = static_cast<double>(k) * scenario.sample_period_s;
        rec.frames.push_back(acquire_frame(t, scenario, spectra, path, noise, rng));
    }
    return rec;
}

// Default capsule baselines, detector counts per frame channel. State A
// (ch1-12) is lit by the violet, green and near-infrared emitters, so those
// bands carry the signal; state B (ch13-24) is the white emitter with its
// blue peak and phosphor hump and almost no near-infrared output.
inline spectral::OpticalPath default_optical_path() {
    spectral::OpticalPath path;
    path.path_length_mm = 3.0;
    path.incident = {
        // state A: violet + green + NIR
        32000.0, 9000.0, 2500.0, 1800.0, 14000.0, 21000.0, 21500.0, 4000.0, 1500.0, 900.0, 1200.0, 26000.0,
        // state B: white
        1600.0, 4500.0, 23000.0, 12000.0, 16000.0, 19000.0, 19200.0, 15000.0, 11000.0, 6000.0, 2500.0, 400.0};
    return path;
}

// Static per-channel transmission of the background medium. Simulated
// gastric fluid absorbs mildly at the blue end; water is flat.
inline std::array<double, spectral::kFrameChannels> medium_background(const std::string& medium) {
    if (medium == "water") return InfusionScenario::clear_background();
    if (medium == "sgf") {
        const std::array<double, spectral::kSensorChannels> per_sensor{
            0.93, 0.95, 0.96, 0.97, 0.985, 0.99, 0.99, 0.995, 1.0, 1.0, 1.0, 1.0};
        std::array<double, spectral::kFrameChannels> bg{};
        for (int k = 0; k < spectral::kFrameChannels; ++k)
            bg[static_cast<std::size_t>(k)] = per_sensor[static_cast<std::size_t>(k % spectral::kSensorChannels)];
        return bg;
    }
    throw std::invalid_argument("medium_background: unknown medium '" + medium + "'");
}

}  // namespace hemoflow::sim
