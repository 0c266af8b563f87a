#pragma once

#include <array>
#include <stdexcept>

namespace hemoflow::spectral {

inline constexpr int kSensorChannels = 12;  // physical sensor channels
inline constexpr int kFrameChannels = 24;   // two illumination states concatenated

// Illumination states of one acquisition cycle. State A drives the violet,
// green and near-infrared emitters and fills ch1-ch12; state B drives the
// white emitter and fills ch13-ch24.
enum class IlluminationState { a = 0, b = 1 };

struct ChannelDef {
    int index;         // 1-based sensor channel
    double center_nm;  // center wavelength
};

// Fixed channel map of the 12-channel sensor, in acquisition order.
class ChannelBank {
public:
    ChannelBank() = default;

    const std::array<ChannelDef, kSensorChannels>& channels() const { return kChannels; }

    double center_nm(int sensor_channel) const {
        if (sensor_channel < 1 || sensor_channel > kSensorChannels)
            throw std::out_of_range("ChannelBank: sensor channel out of range");
        return kChannels[static_cast<std::size_t>(sensor_channel - 1)].center_nm;
    }

    // 1..24 -> 1..12; the two states share the physical channel list.
    static int sensor_channel_of(int frame_channel) {
        require_frame_channel(frame_channel);
        return (frame_channel - 1) % kSensorChannels + 1;
    }

    static IlluminationState illumination_state_of(int frame_channel) {
        require_frame_channel(frame_channel);
        return frame_channel <= kSensorChannels ? IlluminationState::a : IlluminationState::b;
    }

    static bool same_illumination_state(int frame_channel_a, int frame_channel_b) {
        return illumination_state_of(frame_channel_a) == illumination_state_of(frame_channel_b);
    }

private:
    static void require_frame_channel(int frame_channel) {
        if (frame_channel < 1 || frame_channel > kFrameChannels)
            throw std::out_of_range("ChannelBank: frame channel out of range");
    }

    static constexpr std::array<ChannelDef, kSensorChannels> kChannels{{
        {1, 405.0},
        {2, 425.0},
        {3, 450.0},
        {4, 475.0},
        {5, 515.0},
        {6, 550.0},
        {7, 555.0},
        {8, 600.0},
        {9, 640.0},
        {10, 690.0},
        {11, 745.0},
        {12, 855.0},
    }};
};

}  // namespace hemoflow::spectral
