#pragma once

#include <stdexcept>
#include <vector>

#include "hemoflow/sim/frame.hpp"

namespace hemoflow::sim {

// Slices a recording into fixed-length windows: floor((N - length) / stride) + 1
// of them, each carrying the recording's label and its source position so
// splits can stay leakage-free at the recording level.
inline std::vector<Window> windowize(const Recording& rec, int length = kWindowLength, int stride = kWindowLength) {
    if (length != kWindowLength)
        throw std::invalid_argument("windowize: window length is fixed at " + std::to_string(kWindowLength));
    if (stride < 1) throw std::invalid_argument("windowize: stride must be >= 1");
    const std::size_t n = rec.frames.size();
    if (n < static_cast<std::size_t>(length))
        throw std::invalid_argument("windowize: recording shorter than one window");

    const std::size_t count = (n - static_cast<std::size_t>(length)) / static_cast<std::size_t>(stride) + 1;
    std::vector<Window> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const std::size_t start = w * static_cast<std::size_t>(stride);
        Window win;
        win.label = rec.scenario.label;
        win.recording_id = rec.id;
        win.start_index = start;
        for (int t = 0; t < length; ++t)
            for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
                win.at(t, ch) = rec.frames[start + static_cast<std::size_t>(t)].values[static_cast<std::size_t>(ch)];
        windows.push_back(std::move(win));
    }
    return windows;
}

}  // namespace hemoflow::sim
