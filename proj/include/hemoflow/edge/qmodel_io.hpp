#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/edge/quantized_model.hpp"
#include "hemoflow/util/bytes.hpp"

namespace hemoflow::edge {

class QModelIoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kQModelMagic[4] = {'H', 'F', 'Q', '1'};
inline constexpr std::uint32_t kQModelSchemaVersion = 1;

// Quantized model container, little-endian throughout:
//   magic "HFQ1", u32 schema,
//   normalizer: f64 mean[24], f64 std[24], u16 source length, source,
//   5 activation params (input, conv1_out, conv2_out, fc1_out, logits):
//     f64 scale, i32 zero_point,
//   4 weight tensors (conv1_w, conv2_w, fc1_w, fc2_w):
//     u8 name length, name, u8 ndim, u32 dims..., f64 scale, i32 zero_point,
//     int8 values,
//   4 bias arrays (conv1_b, conv2_b, fc1_b, fc2_b):
//     u8 name length, name, u32 count, i32 values,
//   u64 source-config hash.
inline std::vector<std::uint8_t> serialize_qmodel(const QuantizedModel& qm, std::uint64_t config_hash) {
    qm.validate();
    util::ByteWriter w;
    w.put_bytes(kQModelMagic, 4);
    w.put_u32(kQModelSchemaVersion);

    for (double v : qm.normalizer.mean) w.put_f64(v);
    for (double v : qm.normalizer.std) w.put_f64(v);
    w.put_u16(static_cast<std::uint16_t>(qm.normalizer.source.size()));
    w.put_string(qm.normalizer.source);

    auto put_qp = [&w](const QuantParams& qp) {
        w.put_f64(qp.scale);
        w.put_i32(qp.zero_point);
    };
    put_qp(qm.input_qp);
    put_qp(qm.conv1_out_qp);
    put_qp(qm.conv2_out_qp);
    put_qp(qm.fc1_out_qp);
    put_qp(qm.logits_qp);

    auto put_weights = [&](const QuantizedTensor& t, const char* name) {
        const std::string n = name;
        w.put_u8(static_cast<std::uint8_t>(n.size()));
        w.put_string(n);
        w.put_u8(static_cast<std::uint8_t>(t.shape.size()));
        for (std::size_t d : t.shape) w.put_u32(static_cast<std::uint32_t>(d));
        put_qp(t.qp);
        w.put_bytes(t.data.data(), t.data.size());
    };
    put_weights(qm.conv1_w, "conv1_w");
    put_weights(qm.conv2_w, "conv2_w");
    put_weights(qm.fc1_w, "fc1_w");
    put_weights(qm.fc2_w, "fc2_w");

    auto put_bias = [&](const std::vector<std::int32_t>& b, const char* name) {
        const std::string n = name;
        w.put_u8(static_cast<std::uint8_t>(n.size()));
        w.put_string(n);
        w.put_u32(static_cast<std::uint32_t>(b.size()));
        for (std::int32_t v : b) w.put_i32(v);
    };
    put_bias(qm.conv1_b, "conv1_b");
    put_bias(qm.conv2_b, "conv2_b");
    put_bias(qm.fc1_b, "fc1_b");
    put_bias(qm.fc2_b, "fc2_b");

    w.put_u64(config_hash);
    return w.take();
}

struct LoadedQModel {
    QuantizedModel qmodel;
    std::uint64_t config_hash = 0;
};

inline LoadedQModel deserialize_qmodel(const std::vector<std::uint8_t>& bytes) {
    try {
        util::ByteReader r(bytes);
        char magic[4];
        r.get_bytes(magic, 4);
        if (std::memcmp(magic, kQModelMagic, 4) != 0) throw QModelIoError("quantized model file: bad magic");
        const std::uint32_t schema = r.get_u32();
        if (schema != kQModelSchemaVersion)
            throw QModelIoError("quantized model file: unsupported schema version " + std::to_string(schema));

        LoadedQModel loaded;
        QuantizedModel& qm = loaded.qmodel;
        for (double& v : qm.normalizer.mean) v = r.get_f64();
        for (double& v : qm.normalizer.std) v = r.get_f64();
        qm.normalizer.source = r.get_string(r.get_u16());

        auto get_qp = [&r]() {
            QuantParams qp;
            qp.scale = r.get_f64();
            qp.zero_point = r.get_i32();
            return qp;
        };
        qm.input_qp = get_qp();
        qm.conv1_out_qp = get_qp();
        qm.conv2_out_qp = get_qp();
        qm.fc1_out_qp = get_qp();
        qm.logits_qp = get_qp();

        auto get_weights = [&](QuantizedTensor& t, const char* name, std::vector<std::size_t> expect_shape) {
            const std::string found = r.get_string(r.get_u8());
            if (found != name)
                throw QModelIoError("quantized model file: expected tensor " + std::string(name) + ", found " +
                                    found);
            const std::uint8_t ndim = r.get_u8();
            if (ndim != expect_shape.size()) throw QModelIoError("quantized model file: rank mismatch for " + found);
            std::size_t total = 1;
            t.shape.clear();
            for (std::size_t d : expect_shape) {
                const std::uint32_t dim = r.get_u32();
                if (dim != d) throw QModelIoError("quantized model file: shape mismatch for " + found);
                t.shape.push_back(d);
                total *= d;
            }
            t.qp = get_qp();
            t.data.resize(total);
            r.get_bytes(t.data.data(), total);
        };
        get_weights(qm.conv1_w, "conv1_w", {nn::kConv1Out, 1, 3, 3});
        get_weights(qm.conv2_w, "conv2_w", {nn::kConv2Out, nn::kConv1Out, 3, 3});
        get_weights(qm.fc1_w, "fc1_w", {nn::kHidden, nn::kFlatLen});
        get_weights(qm.fc2_w, "fc2_w", {nn::kNumLogits, nn::kHidden});

        auto get_bias = [&](std::vector<std::int32_t>& b, const char* name, std::size_t expect) {
            const std::string found = r.get_string(r.get_u8());
            if (found != name)
                throw QModelIoError("quantized model file: expected bias " + std::string(name) + ", found " +
                                    found);
            const std::uint32_t count = r.get_u32();
            if (count != expect) throw QModelIoError("quantized model file: bias count mismatch for " + found);
            b.resize(count);
            for (auto& v : b) v = r.get_i32();
        };
        get_bias(qm.conv1_b, "conv1_b", nn::kConv1Out);
        get_bias(qm.conv2_b, "conv2_b", nn::kConv2Out);
        get_bias(qm.fc1_b, "fc1_b", nn::kHidden);
        get_bias(qm.fc2_b, "fc2_b", nn::kNumLogits);

        loaded.config_hash = r.get_u64();
        if (r.remaining() != 0) throw QModelIoError("quantized model file: trailing bytes");
        qm.validate();
        return loaded;
    } catch (const util::ByteReaderError& e) {
        throw QModelIoError(std::string("quantized model file: ") + e.what());
    }
}

inline void save_qmodel(const std::string& path, const QuantizedModel& qm, std::uint64_t config_hash) {
    util::write_binary_file(path, serialize_qmodel(qm, config_hash));
}

inline LoadedQModel load_qmodel(const std::string& path) {
    return deserialize_qmodel(util::read_binary_file(path));
}

}  // namespace hemoflow::edge
