#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/tensor.hpp"
#include "hemoflow/sim/frame.hpp"

namespace hemoflow::nn {

// Per-channel Z-score standardization. Statistics are fit once on the
// training corpus and frozen: a deployed classifier cannot see future data,
// so nothing here is per-window. Standardizing (x - mean) / std makes the
// pipeline invariant to any per-channel rescaling a*x + b (a > 0) applied
// consistently to calibration data and inputs, which is what lets one model
// serve media with different static transmission fingerprints.
struct Normalizer {
    std::array<double, spectral::kFrameChannels> mean{};
    std::array<double, spectral::kFrameChannels> std{};
    std::string source;

    void validate() const {
        for (int k = 0; k < spectral::kFrameChannels; ++k) {
            if (!(std[static_cast<std::size_t>(k)] > 0.0) || !std::isfinite(std[static_cast<std::size_t>(k)]))
                throw std::invalid_argument("Normalizer: std must be positive and finite (channel " +
                                            std::to_string(k + 1) + ")");
            if (!std::isfinite(mean[static_cast<std::size_t>(k)]))
                throw std::invalid_argument("Normalizer: non-finite mean (channel " + std::to_string(k + 1) + ")");
        }
    }

    // Population statistics, two-pass for accuracy.
    static Normalizer fit(const std::vector<sim::Window>& windows, std::string source) {
        if (windows.empty()) throw std::invalid_argument("Normalizer::fit: empty calibration corpus");
        Normalizer n;
        n.source = std::move(source);
        const double count = static_cast<double>(windows.size()) * sim::kWindowLength;
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch) {
            double sum = 0.0;
            for (const auto& w : windows)
                for (int t = 0; t < sim::kWindowLength; ++t) sum += w.at(t, ch);
            const double mean = sum / count;
            double ss = 0.0;
            for (const auto& w : windows)
                for (int t = 0; t < sim::kWindowLength; ++t) {
                    const double d = w.at(t, ch) - mean;
                    ss += d * d;
                }
            const double var = ss / count;
            if (!(var > 0.0))
                throw std::runtime_error("Normalizer::fit: channel " + std::to_string(ch + 1) +
                                         " is constant across the calibration corpus");
            n.mean[static_cast<std::size_t>(ch)] = mean;
            n.std[static_cast<std::size_t>(ch)] = std::sqrt(var);
        }
        n.validate();
        return n;
    }

    // raw 6x24 window -> standardized 1x6x24 tensor
    Tensor apply(const sim::Window& w) const {
        Tensor out({1, sim::kWindowLength, spectral::kFrameChannels});
        for (int t = 0; t < sim::kWindowLength; ++t)
            for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
                out.at3(0, static_cast<std::size_t>(t), static_cast<std::size_t>(ch)) =
                    (w.at(t, ch) - mean[static_cast<std::size_t>(ch)]) / std[static_cast<std::size_t>(ch)];
        return out;
    }
};

}  // namespace hemoflow::nn
