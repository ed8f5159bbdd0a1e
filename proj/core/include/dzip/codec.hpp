#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dzip/container.hpp"
#include "dzip/predictor.hpp"
#include "dzip/train.hpp"

namespace dzip {

struct CodecOptions {
  PredictorKind kind = PredictorKind::BiGru;
  uint32_t context_len = 64;
  std::vector<uint32_t> hidden;  // empty = per-kind defaults
  uint32_t order = 2;            // adaptive baseline only
  uint64_t init_seed = 0;
  uint32_t segments = 64;
  bool add_check_word = true;
  size_t predict_chunk = 1024;  // max rows per model call while encoding
  TrainConfig train;
};

struct DecodeOptions {
  size_t predict_chunk = 1024;  // max rows per model call while decoding
};

struct SizeReport {
  uint64_t symbol_count = 0;
  size_t container_bytes = 0;
  size_t header_bytes = 0;
  size_t weight_bytes = 0;
  size_t payload_bytes = 0;
  double payload_bits_per_symbol = 0.0;
  double total_bits_per_symbol = 0.0;
};

struct EncodeStats {
  std::vector<double> epoch_loss;  // empty when nothing was trained
  double best_epoch_loss = 0.0;
  double table_bits = 0.0;  // ideal payload size under the coding tables
  uint32_t check_word = 0;
  SizeReport size;
};

struct DecodeStats {
  double table_bits = 0.0;  // recomputed ideal payload size
  uint32_t check_word = 0;  // recomputed coding-table digest
  bool verified = false;    // container carried a check word and it matched
};

// Near-equal contiguous split: the first n % b parts get one extra symbol.
std::vector<size_t> segment_lengths(size_t n, size_t b);

// Models the input with the requested predictor (training it on the input
// itself when neural), then arithmetic-codes each segment under the model's
// per-position distributions. The returned bytes are a complete container;
// decompress() reverses it exactly.
std::vector<uint8_t> compress(std::span<const uint8_t> data, const CodecOptions& opt,
                              EncodeStats* stats = nullptr);

std::vector<uint8_t> decompress(std::span<const uint8_t> container_bytes,
                                const DecodeOptions& opt = {}, DecodeStats* stats = nullptr);

SizeReport size_report(const Container& c);

}  // namespace dzip
