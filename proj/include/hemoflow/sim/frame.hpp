#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/sim/scenario.hpp"
#include "hemoflow/spectral/channels.hpp"

namespace hemoflow::sim {

inline constexpr int kRecordingSchemaVersion = 1;
inline constexpr int kWindowLength = 6;
inline constexpr int kMinRecordingFrames = kWindowLength;

// One acquisition cycle: ch1-ch12 from illumination state A, ch13-ch24 from
// state B, in detector counts.
struct SpectralFrame {
    double timestamp_s = 0.0;
    std::array<double, spectral::kFrameChannels> values{};

    double channel(int frame_channel) const {
        if (frame_channel < 1 || frame_channel > spectral::kFrameChannels)
            throw std::out_of_range("SpectralFrame: channel out of range");
        return values[static_cast<std::size_t>(frame_channel - 1)];
    }
};

// Labeled time series from one simulated experiment.
struct Recording {
    std::string id;
    InfusionScenario scenario;
    std::vector<SpectralFrame> frames;
    int schema_version = kRecordingSchemaVersion;

    void validate() const {
        scenario.validate();
        if (frames.size() < static_cast<std::size_t>(kMinRecordingFrames))
            throw std::invalid_argument("Recording: needs at least " + std::to_string(kMinRecordingFrames) +
                                        " frames");
        const double dt = scenario.sample_period_s;
        for (std::size_t k = 0; k < frames.size(); ++k) {
            const double expected = static_cast<double>(k) * dt;
            if (std::abs(frames[k].timestamp_s - expected) > 1e-9)
                throw std::invalid_argument("Recording: timestamps must lie on the sample grid");
            for (double v : frames[k].values) {
                if (!(v >= 0.0) || !(v <= 65535.0))
                    throw std::invalid_argument("Recording: channel values must be within [0, 65535]");
            }
        }
    }
};

// The classifier input unit: 6 consecutive frames by 24 channels,
// row-major [time][channel].
struct Window {
    std::array<double, kWindowLength * spectral::kFrameChannels> values{};
    FlowClass label = FlowClass::interference;
    std::string recording_id;
    std::size_t start_index = 0;

    double& at(int t, int ch) { return values[index_of(t, ch)]; }
    double at(int t, int ch) const { return values[index_of(t, ch)]; }

private:
    static std::size_t index_of(int t, int ch) {
        if (t < 0 || t >= kWindowLength || ch < 0 || ch >= spectral::kFrameChannels)
            throw std::out_of_range("Window: index out of range");
        return static_cast<std::size_t>(t) * spectral::kFrameChannels + static_cast<std::size_t>(ch);
    }
};

}  // namespace hemoflow::sim
