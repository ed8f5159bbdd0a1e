#pragma once

#include <cstdint>

#include "dzip/bitstream.hpp"
#include "dzip/freq_table.hpp"

namespace dzip {

// 32-bit integer arithmetic coder. Range arithmetic uses 64-bit
// intermediates (range * cum stays below 2^48 for total = 2^16), the
// classic three-way renormalization, and a finish step that spends exactly
// 2 + pending bits; the decoder reads implicit zero bits past the end of
// the stream, which that finish convention makes sufficient.
class ArithmeticEncoder {
 public:
  explicit ArithmeticEncoder(BitWriter& out) : out_(&out) {}

  void encode(const FreqTable& table, uint32_t symbol);
  void finish();

 private:
  void emit(uint32_t bit) {
    out_->put_bit(bit);
    for (; pending_ > 0; --pending_) out_->put_bit(bit ^ 1u);
  }

  BitWriter* out_;
  uint32_t low_ = 0;
  uint32_t high_ = 0xFFFFFFFFu;
  uint64_t pending_ = 0;
};

class ArithmeticDecoder {
 public:
  explicit ArithmeticDecoder(BitReader& in) : in_(&in) {
    for (int i = 0; i < 32; ++i) code_ = (code_ << 1) | in_->read_bit();
  }

  uint32_t decode(const FreqTable& table);

 private:
  BitReader* in_;
  uint32_t low_ = 0;
  uint32_t high_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

}  // namespace dzip
