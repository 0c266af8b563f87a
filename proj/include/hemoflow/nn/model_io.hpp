#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/model.hpp"
#include "hemoflow/nn/normalizer.hpp"
#include "hemoflow/util/bytes.hpp"

namespace hemoflow::nn {

class ModelIoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kModelMagic[4] = {'H', 'F', 'M', '1'};
inline constexpr std::uint32_t kModelSchemaVersion = 1;

// Binary model container, little-endian throughout:
//   magic "HFM1", u32 schema, u32 tensor count,
//   per tensor: u8 name length, name, u8 ndim, u32 dims..., f32 values,
//   normalizer: f64 mean[24], f64 std[24], u16 source length, source,
//   u64 training-config hash.
inline std::vector<std::uint8_t> serialize_model(const ModelParams& model, const Normalizer& norm,
                                                 std::uint64_t config_hash) {
    model.check_finite();
    norm.validate();
    util::ByteWriter w;
    w.put_bytes(kModelMagic, 4);
    w.put_u32(kModelSchemaVersion);
    const auto tensors = model.tensors();
    w.put_u32(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        const std::string name = t.name;
        w.put_u8(static_cast<std::uint8_t>(name.size()));
        w.put_string(name);
        w.put_u8(static_cast<std::uint8_t>(t.tensor->rank()));
        for (std::size_t d : t.tensor->shape()) w.put_u32(static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i < t.tensor->size(); ++i)
            w.put_f32(static_cast<float>((*t.tensor)[i]));
    }
    for (double v : norm.mean) w.put_f64(v);
    for (double v : norm.std) w.put_f64(v);
    w.put_u16(static_cast<std::uint16_t>(norm.source.size()));
    w.put_string(norm.source);
    w.put_u64(config_hash);
    return w.take();
}

struct LoadedModel {
    ModelParams model;
    Normalizer normalizer;
    std::uint64_t config_hash = 0;
};

inline LoadedModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
    try {
        util::ByteReader r(bytes);
        char magic[4];
        r.get_bytes(magic, 4);
        if (std::memcmp(magic, kModelMagic, 4) != 0) throw ModelIoError("model file: bad magic");
        const std::uint32_t schema = r.get_u32();
        if (schema != kModelSchemaVersion)
            throw ModelIoError("model file: unsupported schema version " + std::to_string(schema));

        LoadedModel loaded;
        auto tensors = loaded.model.tensors();
        const std::uint32_t count = r.get_u32();
        if (count != tensors.size())
            throw ModelIoError("model file: expected " + std::to_string(tensors.size()) + " tensors, found " +
                               std::to_string(count));
        for (auto& t : tensors) {
            const std::uint8_t name_len = r.get_u8();
            const std::string name = r.get_string(name_len);
            if (name != t.name)
                throw ModelIoError("model file: tensor order mismatch, expected " + std::string(t.name) +
                                   ", found " + name);
            const std::uint8_t ndim = r.get_u8();
            if (ndim != t.tensor->rank())
                throw ModelIoError("model file: rank mismatch for " + name);
            for (std::size_t d : t.tensor->shape()) {
                const std::uint32_t dim = r.get_u32();
                if (dim != d) throw ModelIoError("model file: shape mismatch for " + name);
            }
            for (std::size_t i = 0; i < t.tensor->size(); ++i) {
                const float v = r.get_f32();
                if (!std::isfinite(v)) throw ModelIoError("model file: non-finite value in " + name);
                (*t.tensor)[i] = static_cast<double>(v);
            }
        }
        for (double& v : loaded.normalizer.mean) v = r.get_f64();
        for (double& v : loaded.normalizer.std) v = r.get_f64();
        const std::uint16_t source_len = r.get_u16();
        loaded.normalizer.source = r.get_string(source_len);
        loaded.config_hash = r.get_u64();
        if (r.remaining() != 0) throw ModelIoError("model file: trailing bytes");
        loaded.normalizer.validate();
        return loaded;
    } catch (const util::ByteReaderError& e) {
        throw ModelIoError(std::string("model file: ") + e.what());
    }
}

inline void save_model(const std::string& path, const ModelParams& model, const Normalizer& norm,
                       std::uint64_t config_hash) {
    util::write_binary_file(path, serialize_model(model, norm, config_hash));
}

inline LoadedModel load_model(const std::string& path) {
    return deserialize_model(util::read_binary_file(path));
}

}  // namespace hemoflow::nn
