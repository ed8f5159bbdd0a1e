#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dzip {

// A byte string re-expressed over its own alphabet: the sorted distinct byte
// values present, plus the sequence of alphabet positions.
struct SymbolSequence {
  std::vector<uint8_t> alphabet;  // ascending byte values
  std::vector<uint8_t> indices;   // each < alphabet.size()

  size_t size() const { return indices.size(); }

  static SymbolSequence from_bytes(std::span<const uint8_t> bytes);
  std::vector<uint8_t> to_bytes() const;
};

}  // namespace dzip
