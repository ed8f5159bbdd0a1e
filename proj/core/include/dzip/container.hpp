#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dzip/predictor.hpp"

namespace dzip {

// On-disk layout, all integers little-endian, in this order:
//
//   "DZIP"  magic
//   u8      format version (currently 1)
//   u64     symbol count N
//   u16     alphabet size, then that many bytes, strictly ascending
//   u32     context length K
//   u32     segment count B
//   u8      predictor kind
//   u64     weight init seed
//   u32     adaptive order
//   u16     hidden-size count, then u32 per entry
//   u64     weight byte length, then the weight bytes
//   B x     { u64 segment symbol count, u64 segment payload byte length }
//   -       payload blobs, in segment order
//   u32     CRC-32 of every byte before the payload blobs
//   [u32]   optional check word over the quantized coding tables
//
// The trailing CRC is positioned after the payloads but covers only the
// header + segment table + weights, so corrupt metadata is caught before any
// decoding starts; the optional check word is how table-level corruption
// (e.g. damaged weights) is detected.
struct SegmentEntry {
  uint64_t symbol_count = 0;
  std::vector<uint8_t> payload;
};

struct Container {
  uint8_t version = 1;
  uint64_t n = 0;
  std::vector<uint8_t> alphabet;
  uint32_t context_len = 0;
  PredictorKind kind = PredictorKind::Fc;
  uint64_t init_seed = 0;
  uint32_t order = 0;
  std::vector<uint32_t> hidden;
  std::vector<uint8_t> weights;
  std::vector<SegmentEntry> segments;
  std::optional<uint32_t> check_word;

  PredictorSpec predictor_spec() const;

  std::vector<uint8_t> serialize() const;
  static Container parse(std::span<const uint8_t> bytes);
};

}  // namespace dzip
