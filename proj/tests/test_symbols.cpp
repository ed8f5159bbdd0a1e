#include <algorithm>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "dzip/rng.hpp"
#include "dzip/symbols.hpp"

using namespace dzip;

TEST_CASE("alphabet is the sorted distinct byte set") {
  const std::vector<uint8_t> bytes = {'b', 'a', 'n', 'a', 'n', 'a'};
  const auto seq = SymbolSequence::from_bytes(bytes);
  CHECK(seq.alphabet == std::vector<uint8_t>{'a', 'b', 'n'});
  CHECK(seq.indices == std::vector<uint8_t>{1, 0, 2, 0, 2, 0});
  CHECK(seq.size() == 6);
  CHECK(seq.to_bytes() == bytes);
}

TEST_CASE("empty input gives an empty sequence") {
  const auto seq = SymbolSequence::from_bytes({});
  CHECK(seq.alphabet.empty());
  CHECK(seq.indices.empty());
  CHECK(seq.to_bytes().empty());
}

TEST_CASE("single repeated byte") {
  const std::vector<uint8_t> bytes(100, 0xff);
  const auto seq = SymbolSequence::from_bytes(bytes);
  CHECK(seq.alphabet == std::vector<uint8_t>{0xff});
  CHECK(std::all_of(seq.indices.begin(), seq.indices.end(),
                    [](uint8_t v) { return v == 0; }));
  CHECK(seq.to_bytes() == bytes);
}

TEST_CASE("all 256 byte values") {
  std::vector<uint8_t> bytes(256);
  for (size_t i = 0; i < 256; ++i) bytes[i] = static_cast<uint8_t>(255 - i);
  const auto seq = SymbolSequence::from_bytes(bytes);
  CHECK(seq.alphabet.size() == 256);
  for (size_t i = 0; i < 256; ++i) CHECK(seq.alphabet[i] == i);
  CHECK(seq.to_bytes() == bytes);
}

TEST_CASE("random byte strings round trip") {
  RngState rng(21);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<uint8_t> bytes(rng.next_below(4096));
    for (auto& b : bytes) b = static_cast<uint8_t>(rng.next_below(256));
    const auto seq = SymbolSequence::from_bytes(bytes);
    CHECK(std::is_sorted(seq.alphabet.begin(), seq.alphabet.end()));
    CHECK(std::adjacent_find(seq.alphabet.begin(), seq.alphabet.end()) ==
          seq.alphabet.end());
    for (uint8_t ix : seq.indices) REQUIRE(ix < seq.alphabet.size());
    CHECK(seq.to_bytes() == bytes);
  }
}
