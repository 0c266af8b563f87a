#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>

#include "hemoflow/nn/model.hpp"

namespace hemoflow::edge {

struct FootprintReport {
    std::size_t param_count = 0;
    std::size_t float_weight_bytes = 0;  // 4 bytes per parameter
    std::size_t int8_weight_bytes = 0;   // 1 byte per parameter, metadata excluded
    std::size_t peak_activation_bytes = 0;
    std::size_t mac_count = 0;

    std::size_t conv1_macs = 0, conv2_macs = 0, fc1_macs = 0, fc2_macs = 0;

    std::string to_text() const {
        std::ostringstream out;
        out << "parameters = " << param_count << "\n";
        out << "weight_bytes_float32 = " << float_weight_bytes << "\n";
        out << "weight_bytes_int8 = " << int8_weight_bytes << "\n";
        out << "peak_activation_bytes_int8 = " << peak_activation_bytes << "\n";
        out << "macs_conv1 = " << conv1_macs << "\n";
        out << "macs_conv2 = " << conv2_macs << "\n";
        out << "macs_fc1 = " << fc1_macs << "\n";
        out << "macs_fc2 = " << fc2_macs << "\n";
        out << "macs_total = " << mac_count << "\n";
        return out.str();
    }
};

// Exact counts from the fixed shapes. Independent of weight values, so a
// float model and its quantized form report the same numbers.
inline FootprintReport footprint_report() {
    FootprintReport r;
    r.param_count = nn::kParamCount;
    r.float_weight_bytes = r.param_count * 4;
    r.int8_weight_bytes = r.param_count;

    r.conv1_macs = nn::kConv1Out * nn::kInputH * nn::kInputW * 9 * 1;
    r.conv2_macs = nn::kConv2Out * 3 * 12 * 9 * nn::kConv1Out;
    r.fc1_macs = nn::kHidden * nn::kFlatLen;
    r.fc2_macs = nn::kNumLogits * nn::kHidden;
    r.mac_count = r.conv1_macs + r.conv2_macs + r.fc1_macs + r.fc2_macs;

    // live int8 buffers per stage: input+output of the widest stage
    const std::size_t input = 1 * nn::kInputH * nn::kInputW;
    const std::size_t conv1 = nn::kConv1Out * nn::kInputH * nn::kInputW;
    const std::size_t pool1 = nn::kConv1Out * 3 * 12;
    const std::size_t conv2 = nn::kConv2Out * 3 * 12;
    const std::size_t pool2 = nn::kFlatLen;
    const std::size_t fc1 = nn::kHidden;
    const std::size_t logits = nn::kNumLogits;
    r.peak_activation_bytes = std::max({input + conv1, conv1 + pool1, pool1 + conv2, conv2 + pool2,
                                        pool2 + fc1, fc1 + logits});
    return r;
}

}  // namespace hemoflow::edge
