#include "dzip/symbols.hpp"

#include <array>

namespace dzip {

SymbolSequence SymbolSequence::from_bytes(std::span<const uint8_t> bytes) {
  std::array<bool, 256> present{};
  for (uint8_t b : bytes) present[b] = true;
  SymbolSequence out;
  std::array<uint8_t, 256> index_of{};
  for (int v = 0; v < 256; ++v) {
    if (!present[v]) continue;
    index_of[v] = static_cast<uint8_t>(out.alphabet.size());
    out.alphabet.push_back(static_cast<uint8_t>(v));
  }
  out.indices.reserve(bytes.size());
  for (uint8_t b : bytes) out.indices.push_back(index_of[b]);
  return out;
}

std::vector<uint8_t> SymbolSequence::to_bytes() const {
  std::vector<uint8_t> out;
  out.reserve(indices.size());
  for (uint8_t idx : indices) out.push_back(alphabet[idx]);
  return out;
}

}  // namespace dzip
