#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/sim/frame.hpp"
#include "hemoflow/telemetry/frame.hpp"
#include "hemoflow/util/bytes.hpp"

namespace hemoflow::telemetry {

class PackedIoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kPackedMagic[4] = {'H', 'F', 'P', 'K'};
inline constexpr std::uint8_t kPackedVersion = 1;
inline constexpr std::size_t kPackedHeaderSize = 16;

// Packed recording file: 16-byte header (magic "HFPK", u8 version,
// u8 + u16 reserved, u32 frame count, u32 reserved), then `frame count`
// concatenated kind-0 telemetry frames of 60 bytes each.
inline std::vector<std::uint8_t> pack_recording(const sim::Recording& rec) {
    util::ByteWriter w;
    w.put_bytes(kPackedMagic, 4);
    w.put_u8(kPackedVersion);
    w.put_u8(0);
    w.put_u16(0);
    w.put_u32(static_cast<std::uint32_t>(rec.frames.size()));
    w.put_u32(0);

    std::uint16_t seq = 0;
    for (const auto& frame : rec.frames) {
        TelemetryFrame tf;
        tf.seq = seq++;
        tf.timestamp_ms = static_cast<std::uint32_t>(std::llround(frame.timestamp_s * 1000.0));
        RawPayload p;
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch) {
            const double v = frame.values[static_cast<std::size_t>(ch)];
            if (v < 0.0 || v > 65535.0)
                throw PackedIoError("pack_recording: channel value out of uint16 range");
            p.channels[static_cast<std::size_t>(ch)] = static_cast<std::uint16_t>(std::llround(v));
        }
        tf.payload = p;
        const auto bytes = encode(tf);
        w.put_bytes(bytes.data(), bytes.size());
    }
    return w.take();
}

struct UnpackedRecording {
    std::vector<TelemetryFrame> frames;
};

inline UnpackedRecording unpack_recording(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kPackedHeaderSize) throw PackedIoError("packed recording: truncated header");
    if (std::memcmp(bytes.data(), kPackedMagic, 4) != 0) throw PackedIoError("packed recording: bad magic");
    util::ByteReader r(bytes.data() + 4, bytes.size() - 4);
    const std::uint8_t version = r.get_u8();
    if (version != kPackedVersion)
        throw PackedIoError("packed recording: unsupported version " + std::to_string(version));
    r.get_u8();
    r.get_u16();
    const std::uint32_t count = r.get_u32();
    r.get_u32();

    const std::size_t body = bytes.size() - kPackedHeaderSize;
    if (body != static_cast<std::size_t>(count) * kRawFrameSize)
        throw PackedIoError("packed recording: body size does not match frame count");

    UnpackedRecording out;
    out.frames.reserve(count);
    StreamParseResult parsed = parse_stream(bytes.data() + kPackedHeaderSize, body);
    if (!parsed.complete)
        throw PackedIoError(std::string("packed recording: frame ") +
                            std::to_string(parsed.frames.size()) + " invalid: " + to_string(parsed.error));
    for (const auto& f : parsed.frames)
        if (f.kind() != 0)
            throw PackedIoError("packed recording: only kind-0 frames are allowed");
    out.frames = std::move(parsed.frames);
    return out;
}

inline void save_packed_recording(const std::string& path, const sim::Recording& rec) {
    util::write_binary_file(path, pack_recording(rec));
}

inline UnpackedRecording load_packed_recording(const std::string& path) {
    return unpack_recording(util::read_binary_file(path));
}

}  // namespace hemoflow::telemetry
