#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hemoflow/telemetry/crc16.hpp"
#include "hemoflow/util/bytes.hpp"

namespace hemoflow::telemetry {

inline constexpr std::uint8_t kMagic0 = 0xCA;
inline constexpr std::uint8_t kMagic1 = 0x75;
inline constexpr std::uint8_t kProtocolVersion = 1;

inline constexpr std::size_t kRawFrameSize = 60;     // 2+1+2+4+1+48+2
inline constexpr std::size_t kResultFrameSize = 14;  // 2+1+2+4+1+2+2
inline constexpr std::size_t kHeaderSize = 10;       // everything before the payload

struct RawPayload {
    std::array<std::uint16_t, 24> channels{};
};

struct ResultPayload {
    std::uint8_t flow_class = 0;      // FlowClass index
    std::uint8_t confidence_q8 = 0;   // round(255 * max softmax probability)
};

// Wire frame: magic, version, seq, timestamp, payload kind, payload, CRC-16
// over all preceding bytes. Kind 0 carries one 24-channel spectral frame;
// kind 1 carries a classification result.
struct TelemetryFrame {
    std::uint8_t version = kProtocolVersion;
    std::uint16_t seq = 0;
    std::uint32_t timestamp_ms = 0;
    std::variant<RawPayload, ResultPayload> payload = RawPayload{};

    std::uint8_t kind() const { return payload.index() == 0 ? 0 : 1; }

    bool operator==(const TelemetryFrame& o) const {
        if (version != o.version || seq != o.seq || timestamp_ms != o.timestamp_ms ||
            payload.index() != o.payload.index())
            return false;
        if (payload.index() == 0)
            return std::get<RawPayload>(payload).channels == std::get<RawPayload>(o.payload).channels;
        const auto& a = std::get<ResultPayload>(payload);
        const auto& b = std::get<ResultPayload>(o.payload);
        return a.flow_class == b.flow_class && a.confidence_q8 == b.confidence_q8;
    }
};

enum class DecodeError {
    truncated,
    bad_magic,
    unsupported_version,
    bad_kind,
    crc_mismatch,
};

inline const char* to_string(DecodeError e) {
    switch (e) {
        case DecodeError::truncated: return "truncated";
        case DecodeError::bad_magic: return "bad_magic";
        case DecodeError::unsupported_version: return "unsupported_version";
        case DecodeError::bad_kind: return "bad_kind";
        case DecodeError::crc_mismatch: return "crc_mismatch";
    }
    return "?";
}

inline std::vector<std::uint8_t> encode(const TelemetryFrame& f) {
    util::ByteWriter w;
    w.put_u8(kMagic0);
    w.put_u8(kMagic1);
    w.put_u8(f.version);
    w.put_u16(f.seq);
    w.put_u32(f.timestamp_ms);
    w.put_u8(f.kind());
    if (f.kind() == 0) {
        for (std::uint16_t v : std::get<RawPayload>(f.payload).channels) w.put_u16(v);
    } else {
        const auto& p = std::get<ResultPayload>(f.payload);
        w.put_u8(p.flow_class);
        w.put_u8(p.confidence_q8);
    }
    const std::uint16_t crc = crc16_ccitt_false(w.bytes().data(), w.size());
    w.put_u16(crc);
    return w.take();
}

struct DecodeResult {
    bool ok = false;
    TelemetryFrame frame;
    DecodeError error = DecodeError::truncated;
    std::size_t consumed = 0;  // bytes of input used by this frame on success
};

// Decodes one frame from the head of the buffer. Checks run cheapest-first:
// magic and version before the CRC, so garbage is rejected without hashing.
inline DecodeResult try_decode(const std::uint8_t* data, std::size_t size) {
    DecodeResult res;
    if (size < kHeaderSize) {
        res.error = DecodeError::truncated;
        return res;
    }
    if (data[0] != kMagic0 || data[1] != kMagic1) {
        res.error = DecodeError::bad_magic;
        return res;
    }
    if (data[2] != kProtocolVersion) {
        res.error = DecodeError::unsupported_version;
        return res;
    }
    const std::uint8_t kind = data[9];
    if (kind > 1) {
        res.error = DecodeError::bad_kind;
        return res;
    }
    const std::size_t frame_size = kind == 0 ? kRawFrameSize : kResultFrameSize;
    if (size < frame_size) {
        res.error = DecodeError::truncated;
        return res;
    }
    util::ByteReader r(data, frame_size);
    r.get_u8();
    r.get_u8();
    TelemetryFrame f;
    f.version = r.get_u8();
    f.seq = r.get_u16();
    f.timestamp_ms = r.get_u32();
    r.get_u8();  // kind, already inspected
    if (kind == 0) {
        RawPayload p;
        for (auto& v : p.channels) v = r.get_u16();
        f.payload = p;
    } else {
        ResultPayload p;
        p.flow_class = r.get_u8();
        p.confidence_q8 = r.get_u8();
        f.payload = p;
    }
    const std::uint16_t stored_crc = r.get_u16();
    const std::uint16_t computed_crc = crc16_ccitt_false(data, frame_size - 2);
    if (stored_crc != computed_crc) {
        res.error = DecodeError::crc_mismatch;
        return res;
    }
    res.ok = true;
    res.frame = f;
    res.consumed = frame_size;
    return res;
}

inline DecodeResult try_decode(const std::vector<std::uint8_t>& bytes) {
    return try_decode(bytes.data(), bytes.size());
}

class TelemetryError : public std::runtime_error {
  public:
    TelemetryError(DecodeError kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    DecodeError kind() const { return kind_; }

  private:
    DecodeError kind_;
};

inline TelemetryFrame decode(const std::vector<std::uint8_t>& bytes) {
    const DecodeResult res = try_decode(bytes);
    if (!res.ok) throw TelemetryError(res.error, std::string("decode failed: ") + to_string(res.error));
    if (res.consumed != bytes.size())
        throw TelemetryError(DecodeError::truncated, "decode: trailing bytes after frame");
    return res.frame;
}

// Splits a concatenated stream into frames; stops at the first error.
struct StreamParseResult {
    std::vector<TelemetryFrame> frames;
    std::size_t consumed = 0;
    bool complete = false;  // true when the whole buffer was consumed
    DecodeError error = DecodeError::truncated;
};

inline StreamParseResult parse_stream(const std::uint8_t* data, std::size_t size) {
    StreamParseResult out;
    std::size_t pos = 0;
    while (pos < size) {
        const DecodeResult res = try_decode(data + pos, size - pos);
        if (!res.ok) {
            out.error = res.error;
            out.consumed = pos;
            return out;
        }
        out.frames.push_back(res.frame);
        pos += res.consumed;
    }
    out.consumed = pos;
    out.complete = true;
    return out;
}

inline StreamParseResult parse_stream(const std::vector<std::uint8_t>& bytes) {
    return parse_stream(bytes.data(), bytes.size());
}

}  // namespace hemoflow::telemetry
