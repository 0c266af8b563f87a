#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hemoflow/edge/qforward.hpp"
#include "hemoflow/edge/quantized_model.hpp"
#include "hemoflow/nn/eval.hpp"
#include "hemoflow/nn/model.hpp"
#include "hemoflow/nn/normalizer.hpp"
#include "hemoflow/sim/frame.hpp"

namespace hemoflow::edge {

struct QuantizeResult {
    QuantizedModel qmodel;
    QuantizationReport report;
};

namespace detail {

inline double snr_db(const nn::Tensor& w, const QuantParams& qp) {
    double signal = 0.0, noise = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double deq = qp.dequantize(qp.quantize(w[i]));
        signal += w[i] * w[i];
        const double e = w[i] - deq;
        noise += e * e;
    }
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

inline std::vector<std::int32_t> quantize_bias(const nn::Tensor& bias, double in_scale, double w_scale) {
    std::vector<std::int32_t> out(bias.size());
    const double s = in_scale * w_scale;
    for (std::size_t i = 0; i < bias.size(); ++i) {
        const long long q = std::llround(bias[i] / s);
        if (q < std::numeric_limits<std::int32_t>::min() || q > std::numeric_limits<std::int32_t>::max())
            throw std::runtime_error("quantize: bias does not fit int32");
        out[i] = static_cast<std::int32_t>(q);
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void take(const nn::Tensor& t) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            lo = std::min(lo, t[i]);
            hi = std::max(hi, t[i]);
        }
    }
};

}  // namespace detail

// Post-training quantization. Weights are per-tensor symmetric; activation
// ranges come from float forward passes over the calibration windows
// (plain min/max, no clipping). The report carries per-tensor SNR, the
// worst float-vs-int8 logit deviation seen during calibration, and a
// deviation bound for fresh inputs derived from it.
inline QuantizeResult quantize(const nn::ModelParams& model, const nn::Normalizer& norm,
                               const std::vector<sim::Window>& calibration) {
    if (calibration.empty()) throw std::invalid_argument("quantize: empty calibration set");
    model.check_finite();
    norm.validate();

    QuantizeResult result;
    QuantizedModel& qm = result.qmodel;
    QuantizationReport& rep = result.report;
    qm.normalizer = norm;

    // activation ranges via float traces
    detail::Range r_input, r_conv1, r_conv2, r_fc1, r_logits;
    std::vector<nn::Tensor> inputs;
    inputs.reserve(calibration.size());
    for (const auto& w : calibration) {
        inputs.push_back(norm.apply(w));
        nn::ForwardTrace trace;
        nn::forward(model, inputs.back(), &trace);
        r_input.take(inputs.back());
        r_conv1.take(trace.conv1_act);
        r_conv2.take(trace.conv2_act);
        r_fc1.take(trace.fc1_act);
        r_logits.take(trace.logits);
    }
    qm.input_qp = QuantParams::asymmetric_for(r_input.lo, r_input.hi, &rep.warnings, "input");
    qm.conv1_out_qp = QuantParams::asymmetric_for(r_conv1.lo, r_conv1.hi, &rep.warnings, "conv1_out");
    qm.conv2_out_qp = QuantParams::asymmetric_for(r_conv2.lo, r_conv2.hi, &rep.warnings, "conv2_out");
    qm.fc1_out_qp = QuantParams::asymmetric_for(r_fc1.lo, r_fc1.hi, &rep.warnings, "fc1_out");
    qm.logits_qp = QuantParams::asymmetric_for(r_logits.lo, r_logits.hi, &rep.warnings, "logits");

    auto quantize_weights = [&rep](const nn::Tensor& w, const char* name) {
        const QuantParams qp = QuantParams::symmetric_for(w.data(), w.size(), &rep.warnings, name);
        QuantizedTensor qt = QuantizedTensor::from(w, qp);
        rep.weight_snr_db[name] = detail::snr_db(w, qp);
        return qt;
    };
    qm.conv1_w = quantize_weights(model.conv1_w, "conv1_w");
    qm.conv2_w = quantize_weights(model.conv2_w, "conv2_w");
    qm.fc1_w = quantize_weights(model.fc1_w, "fc1_w");
    qm.fc2_w = quantize_weights(model.fc2_w, "fc2_w");

    qm.conv1_b = detail::quantize_bias(model.conv1_b, qm.input_qp.scale, qm.conv1_w.qp.scale);
    qm.conv2_b = detail::quantize_bias(model.conv2_b, qm.conv1_out_qp.scale, qm.conv2_w.qp.scale);
    qm.fc1_b = detail::quantize_bias(model.fc1_b, qm.conv2_out_qp.scale, qm.fc1_w.qp.scale);
    qm.fc2_b = detail::quantize_bias(model.fc2_b, qm.fc1_out_qp.scale, qm.fc2_w.qp.scale);

    qm.validate();

    // calibrated deviation: worst logit disagreement over the calibration set
    double max_dev = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto float_logits = nn::forward(model, inputs[k]);
        const auto q = qforward(qm, inputs[k]);
        for (std::size_t i = 0; i < nn::kNumLogits; ++i)
            max_dev = std::max(max_dev, std::abs(float_logits[i] - q.logits[i]));
    }
    rep.max_calibration_logit_dev = max_dev;
    rep.logit_deviation_bound = 2.0 * max_dev + 1e-3;
    return result;
}

}  // namespace hemoflow::edge
