#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace dzip {

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320), table-driven.
class Crc32 {
 public:
  void update(const void* data, size_t len);
  void update(std::span<const uint8_t> bytes) { update(bytes.data(), bytes.size()); }
  void update_u32le(uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    update(b, 4);
  }
  uint32_t value() const { return state_ ^ 0xFFFFFFFFu; }

 private:
  uint32_t state_ = 0xFFFFFFFFu;
};

uint32_t crc32(std::span<const uint8_t> bytes);

}  // namespace dzip
