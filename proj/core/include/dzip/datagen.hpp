#pragma once

#include <cstdint>

#include "dzip/symbols.hpp"

namespace dzip {

enum class SourceKind : uint8_t { Iid, Xor, Hmm };

struct SourceSpec {
  SourceKind kind = SourceKind::Iid;
  uint64_t length = 0;
  double p = 0.1;        // Iid/Hmm noise parameter
  uint32_t lag = 20;     // Xor/Hmm recursion lag
  uint32_t alphabet = 2; // symbol modulus M
  uint64_t seed = 0;
};

// Binary sequence, each symbol independently 1 with probability p.
SymbolSequence gen_iid(const SourceSpec& spec);

// Lagged additive recursion s[i] = (s[i-1] + s[i-1-lag]) mod M after an
// IID-uniform prefix of lag+1 symbols. Deterministic past the prefix, so the
// entropy rate is zero, yet match-based compressors miss the structure.
SymbolSequence gen_xor(const SourceSpec& spec);

// Hidden sequence from the same recursion (same seed discipline as gen_xor),
// observed through symbol noise: s[i] = (x[i] + z[i]) mod M, z ~ Bern(p).
SymbolSequence gen_hmm(const SourceSpec& spec);

SymbolSequence generate(const SourceSpec& spec);

// Reference bits/symbol: Iid/Hmm -> binary entropy of p, Xor -> 0.
double entropy_rate(const SourceSpec& spec);

}  // namespace dzip
