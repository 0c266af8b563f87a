#pragma once

#include <cstdint>
#include <vector>

#include "hemoflow/edge/quantized_model.hpp"
#include "hemoflow/nn/model.hpp"

namespace hemoflow::edge {

// Int8 activations captured after every stage. Identical inputs always give
// identical traces: the path is pure integer arithmetic.
struct QForwardResult {
    std::vector<std::int8_t> input;      // 1x6x24
    std::vector<std::int8_t> conv1_out;  // 4x6x24, post-ReLU
    std::vector<std::int8_t> pool1;      // 4x3x12
    std::vector<std::int8_t> conv2_out;  // 8x3x12, post-ReLU
    std::vector<std::int8_t> pool2;      // 8x1x6
    std::vector<std::int8_t> fc1_out;    // 64, post-ReLU
    std::vector<std::int8_t> logits_q;   // 6
    std::vector<double> logits;          // dequantized
};

namespace detail {

inline std::int8_t requantize(std::int32_t acc, const FixedPointMultiplier& m, int out_zp) {
    const std::int32_t scaled = m.apply(acc) + out_zp;
    return static_cast<std::int8_t>(std::clamp(scaled, kQMin, kQMax));
}

// conv 3x3 pad 1 over int8 data; ReLU is realized by the output clamp since
// post-ReLU quantization puts real 0 at the bottom of the int8 range.
inline void qconv_3x3_pad1(const std::vector<std::int8_t>& in, std::size_t c_in, std::size_t h, std::size_t w,
                           const QuantizedTensor& weight, const std::vector<std::int32_t>& bias, int in_zp,
                           const FixedPointMultiplier& m, int out_zp, std::vector<std::int8_t>& out) {
    const std::size_t c_out = weight.shape[0];
    out.resize(c_out * h * w);
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                std::int32_t acc = bias[o];
                for (std::size_t i = 0; i < c_in; ++i) {
                    for (int ky = -1; ky <= 1; ++ky) {
                        const long long sy = static_cast<long long>(y) + ky;
                        if (sy < 0 || sy >= static_cast<long long>(h)) continue;
                        for (int kx = -1; kx <= 1; ++kx) {
                            const long long sx = static_cast<long long>(x) + kx;
                            if (sx < 0 || sx >= static_cast<long long>(w)) continue;
                            const std::int32_t xv =
                                in[(i * h + static_cast<std::size_t>(sy)) * w + static_cast<std::size_t>(sx)] -
                                in_zp;
                            const std::int32_t wv =
                                weight.data[((o * c_in + i) * 3 + static_cast<std::size_t>(ky + 1)) * 3 +
                                            static_cast<std::size_t>(kx + 1)];
                            acc += xv * wv;
                        }
                    }
                }
                out[(o * h + y) * w + x] = requantize(acc, m, out_zp);
            }
        }
    }
}

inline void qmaxpool2x2(const std::vector<std::int8_t>& in, std::size_t c, std::size_t h, std::size_t w,
                        std::vector<std::int8_t>& out) {
    const std::size_t oh = h / 2, ow = w / 2;
    out.resize(c * oh * ow);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::int8_t best = in[(ch * h + oy * 2) * w + ox * 2];
                for (std::size_t dy = 0; dy < 2; ++dy)
                    for (std::size_t dx = 0; dx < 2; ++dx) {
                        const std::int8_t v = in[(ch * h + oy * 2 + dy) * w + ox * 2 + dx];
                        if (v > best) best = v;
                    }
                out[(ch * oh + oy) * ow + ox] = best;
            }
}

inline void qlinear(const std::vector<std::int8_t>& in, const QuantizedTensor& weight,
                    const std::vector<std::int32_t>& bias, int in_zp, const FixedPointMultiplier& m,
                    int out_zp, std::vector<std::int8_t>& out) {
    const std::size_t n_out = weight.shape[0];
    const std::size_t n_in = weight.shape[1];
    out.resize(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
        std::int32_t acc = bias[o];
        for (std::size_t i = 0; i < n_in; ++i)
            acc += (in[i] - in_zp) * static_cast<std::int32_t>(weight.data[o * n_in + i]);
        out[o] = requantize(acc, m, out_zp);
    }
}

}  // namespace detail

// Precomputed requantization multipliers; building them is cheap but pulling
// it out keeps repeated inference allocation-light and obviously identical.
struct QPipeline {
    FixedPointMultiplier conv1_m, conv2_m, fc1_m, fc2_m;

    static QPipeline from(const QuantizedModel& qm) {
        QPipeline p;
        p.conv1_m = FixedPointMultiplier::from_double(qm.input_qp.scale * qm.conv1_w.qp.scale /
                                                      qm.conv1_out_qp.scale);
        p.conv2_m = FixedPointMultiplier::from_double(qm.conv1_out_qp.scale * qm.conv2_w.qp.scale /
                                                      qm.conv2_out_qp.scale);
        p.fc1_m = FixedPointMultiplier::from_double(qm.conv2_out_qp.scale * qm.fc1_w.qp.scale /
                                                    qm.fc1_out_qp.scale);
        p.fc2_m = FixedPointMultiplier::from_double(qm.fc1_out_qp.scale * qm.fc2_w.qp.scale /
                                                    qm.logits_qp.scale);
        return p;
    }
};

// window must already be normalized (same Normalizer as the float path)
inline QForwardResult qforward(const QuantizedModel& qm, const nn::Tensor& window) {
    window.require_shape({1, nn::kInputH, nn::kInputW}, "qforward input");
    const QPipeline pipe = QPipeline::from(qm);

    QForwardResult r;
    r.input.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i)
        r.input[i] = static_cast<std::int8_t>(qm.input_qp.quantize(window[i]));

    detail::qconv_3x3_pad1(r.input, 1, nn::kInputH, nn::kInputW, qm.conv1_w, qm.conv1_b,
                           qm.input_qp.zero_point, pipe.conv1_m, qm.conv1_out_qp.zero_point, r.conv1_out);
    detail::qmaxpool2x2(r.conv1_out, nn::kConv1Out, nn::kInputH, nn::kInputW, r.pool1);
    detail::qconv_3x3_pad1(r.pool1, nn::kConv1Out, 3, 12, qm.conv2_w, qm.conv2_b,
                           qm.conv1_out_qp.zero_point, pipe.conv2_m, qm.conv2_out_qp.zero_point, r.conv2_out);
    detail::qmaxpool2x2(r.conv2_out, nn::kConv2Out, 3, 12, r.pool2);

    // pool2 is already flat in [c][h][w] order, matching fc1's input layout
    detail::qlinear(r.pool2, qm.fc1_w, qm.fc1_b, qm.conv2_out_qp.zero_point, pipe.fc1_m,
                    qm.fc1_out_qp.zero_point, r.fc1_out);
    detail::qlinear(r.fc1_out, qm.fc2_w, qm.fc2_b, qm.fc1_out_qp.zero_point, pipe.fc2_m,
                    qm.logits_qp.zero_point, r.logits_q);

    r.logits.resize(nn::kNumLogits);
    for (std::size_t i = 0; i < nn::kNumLogits; ++i)
        r.logits[i] = qm.logits_qp.dequantize(r.logits_q[i]);
    return r;
}

}  // namespace hemoflow::edge
