#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hemoflow/nn/tensor.hpp"

namespace hemoflow::nn {

// 3x3 convolution, stride 1, zero padding 1: output spatial size equals
// input spatial size. Weight layout [out][in][kh][kw].
inline void conv2d_3x3_pad1_forward(const Tensor& input, const Tensor& weight, const Tensor& bias,
                                    Tensor& output) {
    const std::size_t c_in = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
    const std::size_t c_out = weight.shape()[0];
    weight.require_shape({c_out, c_in, 3, 3}, "conv weight");
    bias.require_shape({c_out}, "conv bias");
    output.require_shape({c_out, h, w}, "conv output");

    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                double acc = bias[o];
                for (std::size_t i = 0; i < c_in; ++i) {
                    for (int ky = -1; ky <= 1; ++ky) {
                        const long long sy = static_cast<long long>(y) + ky;
                        if (sy < 0 || sy >= static_cast<long long>(h)) continue;
                        for (int kx = -1; kx <= 1; ++kx) {
                            const long long sx = static_cast<long long>(x) + kx;
                            if (sx < 0 || sx >= static_cast<long long>(w)) continue;
                            acc += input.at3(i, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx)) *
                                   weight.at4(o, i, static_cast<std::size_t>(ky + 1),
                                              static_cast<std::size_t>(kx + 1));
                        }
                    }
                }
                output.at3(o, y, x) = acc;
            }
        }
    }
}

inline void conv2d_3x3_pad1_backward(const Tensor& input, const Tensor& weight, const Tensor& grad_out,
                                     Tensor& grad_input, Tensor& grad_weight, Tensor& grad_bias) {
    const std::size_t c_in = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
    const std::size_t c_out = weight.shape()[0];
    grad_out.require_shape({c_out, h, w}, "conv grad_out");
    grad_input.require_shape(input.shape(), "conv grad_input");
    grad_weight.require_shape(weight.shape(), "conv grad_weight");
    grad_bias.require_shape({c_out}, "conv grad_bias");
    grad_input.fill(0.0);
    grad_weight.fill(0.0);
    grad_bias.fill(0.0);

    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double g = grad_out.at3(o, y, x);
                grad_bias[o] += g;
                for (std::size_t i = 0; i < c_in; ++i) {
                    for (int ky = -1; ky <= 1; ++ky) {
                        const long long sy = static_cast<long long>(y) + ky;
                        if (sy < 0 || sy >= static_cast<long long>(h)) continue;
                        for (int kx = -1; kx <= 1; ++kx) {
                            const long long sx = static_cast<long long>(x) + kx;
                            if (sx < 0 || sx >= static_cast<long long>(w)) continue;
                            const std::size_t uy = static_cast<std::size_t>(sy);
                            const std::size_t ux = static_cast<std::size_t>(sx);
                            const std::size_t ky1 = static_cast<std::size_t>(ky + 1);
                            const std::size_t kx1 = static_cast<std::size_t>(kx + 1);
                            grad_weight.at4(o, i, ky1, kx1) += g * input.at3(i, uy, ux);
                            grad_input.at3(i, uy, ux) += g * weight.at4(o, i, ky1, kx1);
                        }
                    }
                }
            }
        }
    }
}

inline void relu_forward(const Tensor& x, Tensor& y) {
    y.require_shape(x.shape(), "relu output");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

// subgradient 0 at exactly 0
inline void relu_backward(const Tensor& pre, const Tensor& grad_out, Tensor& grad_in) {
    grad_in.require_shape(pre.shape(), "relu grad_in");
    for (std::size_t i = 0; i < pre.size(); ++i) grad_in[i] = pre[i] > 0.0 ? grad_out[i] : 0.0;
}

// 2x2 max pooling, stride 2, floor semantics: trailing odd rows/columns are
// dropped. Argmax (flat input index, first occurrence wins ties) is kept for
// the backward pass.
inline void maxpool2x2_forward(const Tensor& x, Tensor& y, std::vector<std::size_t>& argmax) {
    const std::size_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    const std::size_t oh = h / 2, ow = w / 2;
    if (oh == 0 || ow == 0) throw std::invalid_argument("maxpool: input too small");
    y.require_shape({c, oh, ow}, "maxpool output");
    argmax.assign(y.size(), 0);

    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t best_idx = (ch * h + oy * 2) * w + ox * 2;
                double best = x[best_idx];
                for (std::size_t dy = 0; dy < 2; ++dy) {
                    for (std::size_t dx = 0; dx < 2; ++dx) {
                        const std::size_t idx = (ch * h + oy * 2 + dy) * w + ox * 2 + dx;
                        if (x[idx] > best) {
                            best = x[idx];
                            best_idx = idx;
                        }
                    }
                }
                const std::size_t out_idx = (ch * oh + oy) * ow + ox;
                y[out_idx] = best;
                argmax[out_idx] = best_idx;
            }
        }
    }
}

inline void maxpool2x2_backward(const Tensor& grad_out, const std::vector<std::size_t>& argmax,
                                Tensor& grad_in) {
    grad_in.fill(0.0);
    for (std::size_t i = 0; i < grad_out.size(); ++i) grad_in[argmax[i]] += grad_out[i];
}

// y = W x + b with W laid out [out][in]
inline void linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias, Tensor& y) {
    const std::size_t n_in = x.size();
    const std::size_t n_out = weight.shape()[0];
    weight.require_shape({n_out, n_in}, "linear weight");
    bias.require_shape({n_out}, "linear bias");
    if (y.size() != n_out) throw std::invalid_argument("linear output size mismatch");
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = bias[o];
        for (std::size_t i = 0; i < n_in; ++i) acc += weight.at2(o, i) * x[i];
        y[o] = acc;
    }
}

inline void linear_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                            Tensor& grad_x, Tensor& grad_weight, Tensor& grad_bias) {
    const std::size_t n_in = x.size();
    const std::size_t n_out = weight.shape()[0];
    grad_x.fill(0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
        const double g = grad_out[o];
        grad_bias[o] = g;
        for (std::size_t i = 0; i < n_in; ++i) {
            grad_weight.at2(o, i) = g * x[i];
            grad_x[i] += g * weight.at2(o, i);
        }
    }
}

// numerically stable softmax
inline std::vector<double> softmax(const std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// loss = -log softmax(logits)[label]; grad = softmax - onehot
inline double cross_entropy_from_logits(const std::vector<double>& logits, int label,
                                        std::vector<double>* grad_logits = nullptr) {
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw std::out_of_range("cross_entropy: label out of range");
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - m);
    const double log_sum = std::log(sum) + m;
    const double loss = log_sum - logits[static_cast<std::size_t>(label)];
    if (grad_logits) {
        grad_logits->resize(logits.size());
        for (std::size_t i = 0; i < logits.size(); ++i)
            (*grad_logits)[i] = std::exp(logits[i] - log_sum) - (static_cast<int>(i) == label ? 1.0 : 0.0);
    }
    return loss;
}

}  // namespace hemoflow::nn
