#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/layers.hpp"
#include "hemoflow/nn/tensor.hpp"
#include "hemoflow/util/rng.hpp"

namespace hemoflow::nn {

inline constexpr std::size_t kInputH = 6;
inline constexpr std::size_t kInputW = 24;
inline constexpr std::size_t kConv1Out = 4;
inline constexpr std::size_t kConv2Out = 8;
inline constexpr std::size_t kFlatLen = 48;   // 8 * 1 * 6
inline constexpr std::size_t kHidden = 64;
inline constexpr std::size_t kNumLogits = 6;
inline constexpr std::size_t kParamCount = 3862;
inline constexpr std::size_t kMacCount = 19008;

// The fixed classifier: conv(1->4) / pool / conv(4->8) / pool / fc48->64 /
// fc64->6. Pooling uses floor semantics, so the 3-row map pools to 1 row.
struct ModelParams {
    Tensor conv1_w{{kConv1Out, 1, 3, 3}};
    Tensor conv1_b{{kConv1Out}};
    Tensor conv2_w{{kConv2Out, kConv1Out, 3, 3}};
    Tensor conv2_b{{kConv2Out}};
    Tensor fc1_w{{kHidden, kFlatLen}};
    Tensor fc1_b{{kHidden}};
    Tensor fc2_w{{kNumLogits, kHidden}};
    Tensor fc2_b{{kNumLogits}};

    struct Named {
        const char* name;
        Tensor* tensor;
    };
    std::vector<Named> tensors() {
        return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b}, {"conv2_w", &conv2_w}, {"conv2_b", &conv2_b},
                {"fc1_w", &fc1_w},     {"fc1_b", &fc1_b},     {"fc2_w", &fc2_w},     {"fc2_b", &fc2_b}};
    }
    std::vector<Named> tensors() const {
        auto* self = const_cast<ModelParams*>(this);
        return self->tensors();
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& t : tensors()) n += t.tensor->size();
        return n;
    }

    // flat index across tensors in declaration order
    double& param(std::size_t flat) {
        for (auto& t : tensors()) {
            if (flat < t.tensor->size()) return (*t.tensor)[flat];
            flat -= t.tensor->size();
        }
        throw std::out_of_range("ModelParams::param: index past end");
    }

    void fill(double v) {
        for (auto& t : tensors()) t.tensor->fill(v);
    }

    void check_finite() const {
        for (const auto& t : tensors())
            for (std::size_t i = 0; i < t.tensor->size(); ++i)
                if (!std::isfinite((*t.tensor)[i]))
                    throw std::runtime_error(std::string("ModelParams: non-finite value in ") + t.name);
    }

    // Kaiming-style uniform init, bound sqrt(6 / fan_in), zero biases.
    static ModelParams init(util::Rng& rng) {
        ModelParams m;
        auto init_tensor = [&rng](Tensor& t, std::size_t fan_in) {
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
        };
        init_tensor(m.conv1_w, 1 * 3 * 3);
        init_tensor(m.conv2_w, kConv1Out * 3 * 3);
        init_tensor(m.fc1_w, kFlatLen);
        init_tensor(m.fc2_w, kHidden);
        return m;  // biases stay zero
    }
};

static_assert(kFlatLen == kConv2Out * 1 * 6);

// Activations kept alive for backprop and for inspection/export.
struct ForwardTrace {
    Tensor conv1_pre{{kConv1Out, kInputH, kInputW}};
    Tensor conv1_act{{kConv1Out, kInputH, kInputW}};
    Tensor pool1{{kConv1Out, kInputH / 2, kInputW / 2}};
    std::vector<std::size_t> pool1_argmax;
    Tensor conv2_pre{{kConv2Out, kInputH / 2, kInputW / 2}};
    Tensor conv2_act{{kConv2Out, kInputH / 2, kInputW / 2}};
    Tensor pool2{{kConv2Out, 1, kInputW / 4}};
    std::vector<std::size_t> pool2_argmax;
    Tensor flat{{kFlatLen}};
    Tensor fc1_pre{{kHidden}};
    Tensor fc1_act{{kHidden}};
    Tensor logits{{kNumLogits}};
};

// window must be a normalized 1x6x24 tensor
inline std::vector<double> forward(const ModelParams& model, const Tensor& window,
                                   ForwardTrace* trace = nullptr) {
    window.require_shape({1, kInputH, kInputW}, "forward input");
    ForwardTrace local;
    ForwardTrace& t = trace ? *trace : local;

    conv2d_3x3_pad1_forward(window, model.conv1_w, model.conv1_b, t.conv1_pre);
    relu_forward(t.conv1_pre, t.conv1_act);
    maxpool2x2_forward(t.conv1_act, t.pool1, t.pool1_argmax);
    t.pool1.require_shape({kConv1Out, 3, 12}, "pool1");

    conv2d_3x3_pad1_forward(t.pool1, model.conv2_w, model.conv2_b, t.conv2_pre);
    relu_forward(t.conv2_pre, t.conv2_act);
    maxpool2x2_forward(t.conv2_act, t.pool2, t.pool2_argmax);
    t.pool2.require_shape({kConv2Out, 1, 6}, "pool2");

    // flatten in [c][h][w] order
    for (std::size_t i = 0; i < kFlatLen; ++i) t.flat[i] = t.pool2[i];

    linear_forward(t.flat, model.fc1_w, model.fc1_b, t.fc1_pre);
    relu_forward(t.fc1_pre, t.fc1_act);
    linear_forward(t.fc1_act, model.fc2_w, model.fc2_b, t.logits);

    std::vector<double> logits(kNumLogits);
    for (std::size_t i = 0; i < kNumLogits; ++i) logits[i] = t.logits[i];
    return logits;
}

// argmax with ties broken toward the lower class index
inline int predict_class(const std::vector<double>& logits) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(logits.size()); ++i)
        if (logits[static_cast<std::size_t>(i)] > logits[static_cast<std::size_t>(best)]) best = i;
    return best;
}

}  // namespace hemoflow::nn
