#pragma once

#include <stdexcept>
#include <vector>

#include "hemoflow/nn/model.hpp"

namespace hemoflow::nn {

struct Sample {
    Tensor input{{1, kInputH, kInputW}};  // already normalized
    int label = 0;
};

// One forward+backward for a single sample; gradients are accumulated into
// `grad` (caller zeroes it). Returns the sample loss.
inline double backprop_sample(const ModelParams& model, const Sample& sample, ModelParams& grad) {
    if (sample.label < 0 || sample.label >= static_cast<int>(kNumLogits))
        throw std::out_of_range("backprop: label out of range");

    ForwardTrace t;
    forward(model, sample.input, &t);

    std::vector<double> logits(kNumLogits);
    for (std::size_t i = 0; i < kNumLogits; ++i) logits[i] = t.logits[i];
    std::vector<double> dlogits;
    const double loss = cross_entropy_from_logits(logits, sample.label, &dlogits);

    Tensor g_logits({kNumLogits});
    for (std::size_t i = 0; i < kNumLogits; ++i) g_logits[i] = dlogits[i];

    // fc2
    Tensor g_fc1_act({kHidden}), g_fc2_w({kNumLogits, kHidden}), g_fc2_b({kNumLogits});
    linear_backward(t.fc1_act, model.fc2_w, g_logits, g_fc1_act, g_fc2_w, g_fc2_b);

    // fc1
    Tensor g_fc1_pre({kHidden});
    relu_backward(t.fc1_pre, g_fc1_act, g_fc1_pre);
    Tensor g_flat({kFlatLen}), g_fc1_w({kHidden, kFlatLen}), g_fc1_b({kHidden});
    linear_backward(t.flat, model.fc1_w, g_fc1_pre, g_flat, g_fc1_w, g_fc1_b);

    // unflatten + pool2 + conv2
    Tensor g_pool2({kConv2Out, 1, 6});
    for (std::size_t i = 0; i < kFlatLen; ++i) g_pool2[i] = g_flat[i];
    Tensor g_conv2_act({kConv2Out, 3, 12});
    maxpool2x2_backward(g_pool2, t.pool2_argmax, g_conv2_act);
    Tensor g_conv2_pre({kConv2Out, 3, 12});
    relu_backward(t.conv2_pre, g_conv2_act, g_conv2_pre);
    Tensor g_pool1({kConv1Out, 3, 12}), g_conv2_w({kConv2Out, kConv1Out, 3, 3}), g_conv2_b({kConv2Out});
    conv2d_3x3_pad1_backward(t.pool1, model.conv2_w, g_conv2_pre, g_pool1, g_conv2_w, g_conv2_b);

    // pool1 + conv1
    Tensor g_conv1_act({kConv1Out, kInputH, kInputW});
    maxpool2x2_backward(g_pool1, t.pool1_argmax, g_conv1_act);
    Tensor g_conv1_pre({kConv1Out, kInputH, kInputW});
    relu_backward(t.conv1_pre, g_conv1_act, g_conv1_pre);
    Tensor g_input({1, kInputH, kInputW}), g_conv1_w({kConv1Out, 1, 3, 3}), g_conv1_b({kConv1Out});
    conv2d_3x3_pad1_backward(sample.input, model.conv1_w, g_conv1_pre, g_input, g_conv1_w, g_conv1_b);

    auto add_into = [](Tensor& dst, const Tensor& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    };
    add_into(grad.conv1_w, g_conv1_w);
    add_into(grad.conv1_b, g_conv1_b);
    add_into(grad.conv2_w, g_conv2_w);
    add_into(grad.conv2_b, g_conv2_b);
    add_into(grad.fc1_w, g_fc1_w);
    add_into(grad.fc1_b, g_fc1_b);
    add_into(grad.fc2_w, g_fc2_w);
    add_into(grad.fc2_b, g_fc2_b);
    return loss;
}

// Mean loss over the batch; `grad` receives the mean gradient.
inline double loss_and_grad(const ModelParams& model, const std::vector<Sample>& batch, ModelParams& grad) {
    if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
    grad.fill(0.0);
    double total = 0.0;
    for (const auto& s : batch) total += backprop_sample(model, s, grad);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& t : grad.tensors())
        for (std::size_t i = 0; i < t.tensor->size(); ++i) (*t.tensor)[i] *= inv;
    return total * inv;
}

inline double loss_only(const ModelParams& model, const std::vector<Sample>& batch) {
    if (batch.empty()) throw std::invalid_argument("loss_only: empty batch");
    double total = 0.0;
    for (const auto& s : batch) {
        const auto logits = forward(model, s.input);
        total += cross_entropy_from_logits(logits, s.label);
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace hemoflow::nn
