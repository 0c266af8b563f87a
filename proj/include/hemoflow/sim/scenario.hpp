#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hemoflow/spectral/channels.hpp"

namespace hemoflow::sim {

// The six ordered flow classes: one non-bleeding interference class plus
// five bleeding flow-rate levels evenly spanning 0.1-0.9 mL/min.
enum class FlowClass : int {
    interference = 0,  // 0.0 mL/min equivalent bleeding
    flow_0_1 = 1,
    flow_0_3 = 2,
    flow_0_5 = 3,
    flow_0_7 = 4,
    flow_0_9 = 5,
};

inline constexpr int kNumClasses = 6;
inline constexpr std::array<double, kNumClasses> kFlowRatesMlMin{0.0, 0.1, 0.3, 0.5, 0.7, 0.9};

inline double flow_ml_min(FlowClass c) { return kFlowRatesMlMin[static_cast<std::size_t>(c)]; }

inline FlowClass flow_class_from_index(int index) {
    if (index < 0 || index >= kNumClasses) throw std::out_of_range("FlowClass index out of range");
    return static_cast<FlowClass>(index);
}

inline bool is_bleeding(FlowClass c) { return c != FlowClass::interference; }

// Adjacency between consecutive bleeding levels. The interference class has
// no neighbors.
inline bool adjacent(FlowClass a, FlowClass b) {
    if (!is_bleeding(a) || !is_bleeding(b)) return false;
    const int d = static_cast<int>(a) - static_cast<int>(b);
    return d == 1 || d == -1;
}

inline const char* to_string(FlowClass c) {
    switch (c) {
        case FlowClass::interference: return "0.0";
        case FlowClass::flow_0_1: return "0.1";
        case FlowClass::flow_0_3: return "0.3";
        case FlowClass::flow_0_5: return "0.5";
        case FlowClass::flow_0_7: return "0.7";
        case FlowClass::flow_0_9: return "0.9";
    }
    return "?";
}

// Detector noise surrogate: multiplicative gain noise, additive read noise,
// then quantization to the ADC grid. Both sigmas at zero switch the model
// into an ideal-detector mode that also skips quantization, which is what
// the physics validation paths rely on.
struct NoiseModel {
    double multiplicative_sigma = 0.01;  // fraction of signal
    double additive_sigma = 5.0;         // counts
    int adc_bits = 16;

    static NoiseModel none() { return NoiseModel{0.0, 0.0, 16}; }

    bool noise_free() const { return multiplicative_sigma == 0.0 && additive_sigma == 0.0; }

    double adc_full_scale() const { return static_cast<double>((1u << adc_bits) - 1u); }

    void validate() const {
        if (!(multiplicative_sigma >= 0.0) || !(additive_sigma >= 0.0))
            throw std::invalid_argument("NoiseModel: sigmas must be >= 0");
        if (adc_bits < 8 || adc_bits > 16)
            throw std::invalid_argument("NoiseModel: adc_bits must be in 8..16");
    }
};

// One simulated beaker experiment: a stirred initial volume, a syringe-pump
// infusion of either blood or a single interference mixture, and the static
// transmission fingerprint of the background medium.
struct InfusionScenario {
    FlowClass label = FlowClass::interference;

    // Blood infusion. Zero for the interference class.
    double flow_rate_ml_min = 0.0;
    double blood_hb_g_per_l = 150.0;

    // Interference mixture. Empty id means nothing but the medium. The
    // mixture is either premixed into the tank before the run, infused by a
    // second pump during the run, or both.
    std::string interference_id;
    double interference_premixed_g_per_l = 0.0;
    double interference_rate_ml_min = 0.0;
    double interference_stock_g_per_l = 0.0;

    double initial_volume_ml = 250.0;
    double duration_s = 120.0;
    double sample_period_s = 1.0;

    std::string medium = "water";
    std::array<double, spectral::kFrameChannels> background_transmission{};  // factor in (0,1]

    std::uint64_t rng_seed = 0;

    static std::array<double, spectral::kFrameChannels> clear_background() {
        std::array<double, spectral::kFrameChannels> bg{};
        bg.fill(1.0);
        return bg;
    }

    void validate() const {
        if (!(initial_volume_ml > 0.0)) throw std::invalid_argument("InfusionScenario: V0 must be > 0");
        if (!(duration_s > 0.0)) throw std::invalid_argument("InfusionScenario: duration must be > 0");
        if (!(sample_period_s > 0.0)) throw std::invalid_argument("InfusionScenario: sample period must be > 0");
        if (!(flow_rate_ml_min >= 0.0)) throw std::invalid_argument("InfusionScenario: flow rate must be >= 0");
        if (!(interference_rate_ml_min >= 0.0))
            throw std::invalid_argument("InfusionScenario: interference rate must be >= 0");
        if (!(interference_premixed_g_per_l >= 0.0))
            throw std::invalid_argument("InfusionScenario: premixed concentration must be >= 0");
        if (!(blood_hb_g_per_l >= 0.0))
            throw std::invalid_argument("InfusionScenario: blood hemoglobin concentration must be >= 0");
        for (double f : background_transmission) {
            if (!(f > 0.0) || !(f <= 1.0))
                throw std::invalid_argument("InfusionScenario: background transmission factors must be in (0,1]");
        }
        // Label/infusate consistency: interference label means zero hemoglobin
        // inflow; bleeding labels mean the class flow rate with no mixture.
        if (label == FlowClass::interference) {
            if (flow_rate_ml_min != 0.0)
                throw std::invalid_argument("InfusionScenario: interference label requires zero blood flow");
        } else {
            if (std::abs(flow_rate_ml_min - flow_ml_min(label)) > 1e-12)
                throw std::invalid_argument("InfusionScenario: blood flow rate must match the label");
            if (!interference_id.empty())
                throw std::invalid_argument("InfusionScenario: bleeding runs must not infuse a mixture");
        }
    }
};

}  // namespace hemoflow::sim
