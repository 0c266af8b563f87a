#pragma once

#include <cstddef>
#include <cstdint>

namespace hemoflow::telemetry {

// CRC-16/CCITT-FALSE: polynomial 0x1021, init 0xFFFF, no reflection, no
// final XOR. check("123456789") = 0x29B1.
inline std::uint16_t crc16_ccitt_false(const std::uint8_t* data, std::size_t n,
                                       std::uint16_t crc = 0xFFFF) {
    for (std::size_t i = 0; i < n; ++i) {
        crc ^= static_cast<std::uint16_t>(data[i]) << 8;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

}  // namespace hemoflow::telemetry
