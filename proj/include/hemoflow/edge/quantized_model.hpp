#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/model.hpp"
#include "hemoflow/nn/normalizer.hpp"

namespace hemoflow::edge {

inline constexpr int kQMin = -128;
inline constexpr int kQMax = 127;
inline constexpr double kScaleFloor = 1e-8;

// Affine int8 mapping: real = (q - zero_point) * scale.
struct QuantParams {
    double scale = 1.0;
    int zero_point = 0;

    void validate() const {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("QuantParams: scale must be positive and finite");
        if (zero_point < kQMin || zero_point > kQMax)
            throw std::invalid_argument("QuantParams: zero_point outside int8 range");
    }

    // round half away from zero, then clamp
    int quantize(double x) const {
        const long long q = std::llround(x / scale) + zero_point;
        return static_cast<int>(std::clamp<long long>(q, kQMin, kQMax));
    }
    double dequantize(int q) const { return (q - zero_point) * scale; }

    // symmetric scheme for weights: zero_point 0, range [-127, 127]
    static QuantParams symmetric_for(const double* data, std::size_t n, std::vector<std::string>* warnings,
                                     const std::string& name) {
        double max_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_abs = std::max(max_abs, std::abs(data[i]));
        QuantParams qp;
        qp.zero_point = 0;
        qp.scale = max_abs / 127.0;
        if (!(qp.scale >= kScaleFloor)) {
            qp.scale = kScaleFloor;
            if (warnings) warnings->push_back("tensor " + name + " is all-constant; scale floored");
        }
        return qp;
    }

    // asymmetric scheme for activations; the observed range is widened to
    // include 0 so that zero is exactly representable (post-ReLU tensors get
    // zero_point = -128 and the ReLU becomes a free saturation)
    static QuantParams asymmetric_for(double observed_min, double observed_max,
                                      std::vector<std::string>* warnings, const std::string& name) {
        const double lo = std::min(0.0, observed_min);
        const double hi = std::max(0.0, observed_max);
        QuantParams qp;
        qp.scale = (hi - lo) / 255.0;
        if (!(qp.scale >= kScaleFloor)) {
            qp.scale = kScaleFloor;
            if (warnings) warnings->push_back("activation " + name + " is constant; scale floored");
        }
        qp.zero_point = static_cast<int>(
            std::clamp<long long>(kQMin - std::llround(lo / qp.scale), kQMin, kQMax));
        return qp;
    }
};

// Requantization multiplier M (0 < M) as an (int32 mantissa, right shift)
// pair: M = mantissa * 2^(-shift), mantissa in [2^30, 2^31). Fixed so that
// independent implementations agree bit-for-bit.
struct FixedPointMultiplier {
    std::int32_t mantissa = 0;
    int shift = 0;  // total right shift applied to acc * mantissa

    static FixedPointMultiplier from_double(double m) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("FixedPointMultiplier: multiplier must be positive and finite");
        int exp = 0;
        const double frac = std::frexp(m, &exp);  // m = frac * 2^exp, frac in [0.5, 1)
        long long mant = std::llround(frac * 2147483648.0);  // frac * 2^31
        if (mant == 2147483648LL) {  // frac rounded up to 1.0
            mant >>= 1;
            ++exp;
        }
        FixedPointMultiplier fpm;
        fpm.mantissa = static_cast<std::int32_t>(mant);
        fpm.shift = 31 - exp;
        if (fpm.shift < 0) throw std::invalid_argument("FixedPointMultiplier: multiplier too large");
        return fpm;
    }

    double as_double() const { return static_cast<double>(mantissa) * std::ldexp(1.0, -shift); }

    // round-half-away-from-zero fixed-point product
    std::int32_t apply(std::int32_t acc) const {
        if (shift > 62) return 0;
        std::int64_t prod = static_cast<std::int64_t>(acc) * mantissa;
        if (shift == 0) return static_cast<std::int32_t>(prod);
        const std::int64_t half = static_cast<std::int64_t>(1) << (shift - 1);
        prod += prod >= 0 ? half : -half;
        return static_cast<std::int32_t>(prod >> shift);
    }
};

struct QuantizedTensor {
    std::vector<std::int8_t> data;
    std::vector<std::size_t> shape;
    QuantParams qp;

    static QuantizedTensor from(const nn::Tensor& t, const QuantParams& qp) {
        QuantizedTensor q;
        q.shape = t.shape();
        q.qp = qp;
        q.data.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            q.data[i] = static_cast<std::int8_t>(qp.quantize(t[i]));
        return q;
    }
};

struct QuantizedModel {
    nn::Normalizer normalizer;

    QuantizedTensor conv1_w, conv2_w, fc1_w, fc2_w;
    std::vector<std::int32_t> conv1_b, conv2_b, fc1_b, fc2_b;

    QuantParams input_qp;      // normalized window
    QuantParams conv1_out_qp;  // post-ReLU
    QuantParams conv2_out_qp;  // post-ReLU
    QuantParams fc1_out_qp;    // post-ReLU
    QuantParams logits_qp;

    // Worst-case |acc| per layer: taps * max|q_x - zp_x| * max|q_w| + |bias|.
    // Must fit an int32 with room to spare; the shapes make this automatic,
    // but the claim is checked, not assumed.
    void check_accumulators() const {
        auto check = [](const char* name, std::size_t taps, const std::vector<std::int32_t>& bias) {
            std::int64_t worst = static_cast<std::int64_t>(taps) * 255 * 127;
            std::int64_t bias_max = 0;
            for (std::int32_t b : bias)
                bias_max = std::max(bias_max, std::abs(static_cast<std::int64_t>(b)));
            if (worst + bias_max >= (static_cast<std::int64_t>(1) << 31))
                throw std::runtime_error(std::string("quantized model: ") + name +
                                         " accumulator could overflow int32");
        };
        check("conv1", 1 * 3 * 3, conv1_b);
        check("conv2", nn::kConv1Out * 3 * 3, conv2_b);
        check("fc1", nn::kFlatLen, fc1_b);
        check("fc2", nn::kHidden, fc2_b);
    }

    void validate() const {
        normalizer.validate();
        for (const auto* qp : {&input_qp, &conv1_out_qp, &conv2_out_qp, &fc1_out_qp, &logits_qp})
            qp->validate();
        for (const auto* t : {&conv1_w, &conv2_w, &fc1_w, &fc2_w}) t->qp.validate();
        check_accumulators();
    }
};

struct QuantizationReport {
    std::map<std::string, double> weight_snr_db;
    std::vector<std::string> warnings;
    double max_calibration_logit_dev = 0.0;  // max |float - int8| logit over calibration set
    double logit_deviation_bound = 0.0;      // published bound for fresh inputs

    std::string to_text() const {
        std::string out;
        for (const auto& [name, snr] : weight_snr_db)
            out += name + " snr_db = " + std::to_string(snr) + "\n";
        out += "max_calibration_logit_dev = " + std::to_string(max_calibration_logit_dev) + "\n";
        out += "logit_deviation_bound = " + std::to_string(logit_deviation_bound) + "\n";
        for (const auto& w : warnings) out += "warning: " + w + "\n";
        return out;
    }
};

}  // namespace hemoflow::edge
