#include "dzip/arith.hpp"

#include "dzip/errors.hpp"

namespace dzip {
namespace {

constexpr uint32_t kHalf = 0x80000000u;
constexpr uint32_t kQuarter = 0x40000000u;
constexpr uint32_t kThreeQuarters = 0xC0000000u;

}  // namespace

void ArithmeticEncoder::encode(const FreqTable& table, uint32_t symbol) {
  if (symbol >= table.size()) throw DataError("encode: symbol outside table");
  uint64_t cum_lo = 0;
  for (uint32_t s = 0; s < symbol; ++s) cum_lo += table.freqs[s];
  const uint64_t cum_hi = cum_lo + table.freqs[symbol];

  const uint64_t range = static_cast<uint64_t>(high_) - low_ + 1;
  high_ = low_ + static_cast<uint32_t>(range * cum_hi / FreqTable::kTotal) - 1;
  low_ = low_ + static_cast<uint32_t>(range * cum_lo / FreqTable::kTotal);

  for (;;) {
    if (high_ < kHalf) {
      emit(0);
    } else if (low_ >= kHalf) {
      emit(1);
      low_ -= kHalf;
      high_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
      ++pending_;
      low_ -= kQuarter;
      high_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1u;
  }
}

void ArithmeticEncoder::finish() {
  ++pending_;
  emit(low_ < kQuarter ? 0 : 1);
}

uint32_t ArithmeticDecoder::decode(const FreqTable& table) {
  const uint64_t range = static_cast<uint64_t>(high_) - low_ + 1;
  const uint64_t target =
      ((static_cast<uint64_t>(code_ - low_) + 1) * FreqTable::kTotal - 1) / range;

  uint64_t cum_lo = 0;
  uint32_t symbol = 0;
  for (;; ++symbol) {
    if (symbol >= table.size()) throw FormatError("decode: scaled value outside table");
    const uint64_t next = cum_lo + table.freqs[symbol];
    if (target < next) break;
    cum_lo = next;
  }
  const uint64_t cum_hi = cum_lo + table.freqs[symbol];

  high_ = low_ + static_cast<uint32_t>(range * cum_hi / FreqTable::kTotal) - 1;
  low_ = low_ + static_cast<uint32_t>(range * cum_lo / FreqTable::kTotal);

  for (;;) {
    if (high_ < kHalf) {
      // nothing to subtract
    } else if (low_ >= kHalf) {
      low_ -= kHalf;
      high_ -= kHalf;
      code_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
      low_ -= kQuarter;
      high_ -= kQuarter;
      code_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1u;
    code_ = (code_ << 1) | in_->read_bit();
  }
  return symbol;
}

}  // namespace dzip
