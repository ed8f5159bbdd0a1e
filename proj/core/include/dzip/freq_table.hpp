#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dzip {

// Integer frequencies summing to exactly 2^16, every entry >= 1. This is the
// coder's exact representation of a probability row.
struct FreqTable {
  static constexpr uint32_t kTotal = 65536;
  std::vector<uint32_t> freqs;

  size_t size() const { return freqs.size(); }
};

// Largest-remainder apportionment of `total` among the row entries, ties in
// remainder broken by ascending index; zero entries are then raised to 1,
// each unit taken from a currently-maximal entry (among maximal entries the
// one with the smallest real quota loses it, which keeps the frequency order
// consistent with the probability order). Negative or non-finite inputs are
// treated as zero.
FreqTable quantize(std::span<const float> row, uint32_t total = FreqTable::kTotal);

// quantize() of the all-equal row.
FreqTable uniform_table(size_t alphabet_size, uint32_t total = FreqTable::kTotal);

}  // namespace dzip
