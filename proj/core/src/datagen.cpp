#include "dzip/datagen.hpp"

#include <cmath>

#include "dzip/errors.hpp"
#include "dzip/rng.hpp"

namespace dzip {
namespace {

void validate(const SourceSpec& spec) {
  if (spec.p < 0 || spec.p > 1) throw ConfigError("source: p outside [0, 1]");
  if (spec.alphabet < 2 || spec.alphabet > 256) throw ConfigError("source: alphabet outside 2..256");
  const bool lagged = spec.kind != SourceKind::Iid;
  if (lagged && spec.lag < 1) throw ConfigError("source: lag must be >= 1");
  if (lagged && spec.length <= spec.lag) throw ConfigError("source: length must exceed lag");
}

std::vector<uint8_t> full_alphabet(uint32_t m) {
  std::vector<uint8_t> a(m);
  for (uint32_t i = 0; i < m; ++i) a[i] = static_cast<uint8_t>(i);
  return a;
}

std::vector<uint8_t> xor_core(RngState& rng, uint64_t n, uint32_t lag, uint32_t m) {
  std::vector<uint8_t> s(n);
  const uint64_t prefix = std::min<uint64_t>(lag + 1, n);
  for (uint64_t i = 0; i < prefix; ++i) s[i] = static_cast<uint8_t>(rng.next_below(m));
  for (uint64_t i = prefix; i < n; ++i)
    s[i] = static_cast<uint8_t>((s[i - 1] + s[i - 1 - lag]) % m);
  return s;
}

}  // namespace

SymbolSequence gen_iid(const SourceSpec& spec) {
  validate(spec);
  RngState rng(spec.seed);
  SymbolSequence out;
  out.alphabet = full_alphabet(2);
  out.indices.resize(spec.length);
  for (uint64_t i = 0; i < spec.length; ++i) out.indices[i] = rng.bernoulli(spec.p) ? 1 : 0;
  return out;
}

SymbolSequence gen_xor(const SourceSpec& spec) {
  validate(spec);
  RngState rng(spec.seed);
  SymbolSequence out;
  out.alphabet = full_alphabet(spec.alphabet);
  out.indices = xor_core(rng, spec.length, spec.lag, spec.alphabet);
  return out;
}

SymbolSequence gen_hmm(const SourceSpec& spec) {
  validate(spec);
  RngState rng(spec.seed);
  SymbolSequence out;
  out.alphabet = full_alphabet(spec.alphabet);
  out.indices = xor_core(rng, spec.length, spec.lag, spec.alphabet);
  for (auto& sym : out.indices) {
    const uint32_t z = rng.bernoulli(spec.p) ? 1 : 0;
    sym = static_cast<uint8_t>((sym + z) % spec.alphabet);
  }
  return out;
}

SymbolSequence generate(const SourceSpec& spec) {
  switch (spec.kind) {
    case SourceKind::Iid: return gen_iid(spec);
    case SourceKind::Xor: return gen_xor(spec);
    case SourceKind::Hmm: return gen_hmm(spec);
  }
  throw ConfigError("source: unknown kind");
}

double entropy_rate(const SourceSpec& spec) {
  if (spec.kind == SourceKind::Xor) return 0.0;
  const double p = spec.p;
  if (p <= 0 || p >= 1) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace dzip
