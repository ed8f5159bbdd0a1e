#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dzip {

// MSB-first bit packing. This layout is part of the container format.
class BitWriter {
 public:
  void put_bit(uint32_t bit) {
    if (fill_ == 0) bytes_.push_back(0);
    bytes_.back() = static_cast<uint8_t>(bytes_.back() | ((bit & 1u) << (7 - fill_)));
    fill_ = (fill_ + 1) & 7;
    ++bit_count_;
  }

  // Bits written so far, excluding byte padding.
  uint64_t bit_count() const { return bit_count_; }

  // Remaining bits of the last byte are already zero; this just closes it.
  void pad_to_byte() { fill_ = 0; }

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> take() {
    fill_ = 0;
    return std::move(bytes_);
  }

 private:
  std::vector<uint8_t> bytes_;
  uint32_t fill_ = 0;
  uint64_t bit_count_ = 0;
};

// Reads MSB-first; past the end it yields zero bits, which the coder's finish
// convention is designed around.
class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint32_t read_bit() {
    const uint64_t byte = pos_ >> 3;
    if (byte >= bytes_.size()) {
      ++pos_;
      return 0;
    }
    const uint32_t bit = (bytes_[byte] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return bit;
  }

  uint64_t bits_consumed() const { return pos_; }

 private:
  std::span<const uint8_t> bytes_;
  uint64_t pos_ = 0;
};

}  // namespace dzip
