#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "dzip/errors.hpp"
#include "dzip/freq_table.hpp"
#include "dzip/rng.hpp"

using namespace dzip;

namespace {

uint64_t freq_sum(const FreqTable& t) {
  return std::accumulate(t.freqs.begin(), t.freqs.end(), uint64_t{0});
}

}  // namespace

TEST_CASE("largest remainder apportionment, small totals") {
  {
    const std::vector<float> row = {0.7f, 0.3f};
    const FreqTable t = quantize(row, 8);
    CHECK(t.freqs == std::vector<uint32_t>{6, 2});
  }
  {
    const std::vector<float> row = {1.0f, 0.0f};
    const FreqTable t = quantize(row, 8);
    CHECK(t.freqs == std::vector<uint32_t>{7, 1});
  }
  {
    const std::vector<float> row = {1.0f, 1.0f, 1.0f, 1.0f, 1.0f};
    const FreqTable t = quantize(row, 8);
    CHECK(t.freqs == std::vector<uint32_t>{2, 2, 2, 1, 1});
  }
}

TEST_CASE("full precision rows") {
  {
    const std::vector<float> row = {0.5f, 0.25f, 0.25f};
    CHECK(quantize(row).freqs == std::vector<uint32_t>{32768, 16384, 16384});
  }
  {
    const std::vector<float> row = {0.1f, 0.2f, 0.3f, 0.4f};
    CHECK(quantize(row).freqs == std::vector<uint32_t>{6554, 13107, 19661, 26214});
  }
  {
    // remainder ties resolve to the lowest index
    const std::vector<float> row = {1.0f, 1.0f, 1.0f};
    CHECK(quantize(row).freqs == std::vector<uint32_t>{21846, 21845, 21845});
  }
  {
    // a probability too small for one slot still gets one
    const std::vector<float> row = {1e-30f, 1.0f};
    CHECK(quantize(row).freqs == std::vector<uint32_t>{1, 65535});
  }
  {
    // equal large values do not overflow the quota arithmetic
    const std::vector<float> row = {3e38f, 3e38f};
    CHECK(quantize(row).freqs == std::vector<uint32_t>{32768, 32768});
  }
}

TEST_CASE("degenerate rows fall back to uniform") {
  const std::vector<float> zeros = {0.0f, 0.0f, 0.0f};
  CHECK(quantize(zeros).freqs == std::vector<uint32_t>{21846, 21845, 21845});

  const float nan = std::numeric_limits<float>::quiet_NaN();
  const float inf = std::numeric_limits<float>::infinity();
  const std::vector<float> bad = {nan, -1.0f, nan};
  CHECK(quantize(bad).freqs == std::vector<uint32_t>{21846, 21845, 21845});

  // a non-finite entry is dropped, then re-raised to 1 at the expense of the
  // first currently-maximal entry
  const std::vector<float> mixed = {inf, 1.0f, 1.0f};
  const FreqTable t = quantize(mixed);
  CHECK(t.freqs == std::vector<uint32_t>{1, 32767, 32768});
  CHECK(freq_sum(t) == FreqTable::kTotal);
}

TEST_CASE("uniform table matches quantized ones row") {
  CHECK(uniform_table(2).freqs == std::vector<uint32_t>{32768, 32768});
  CHECK(uniform_table(3).freqs == std::vector<uint32_t>{21846, 21845, 21845});
  CHECK(uniform_table(1).freqs == std::vector<uint32_t>{65536});
  const FreqTable t = uniform_table(256);
  CHECK(freq_sum(t) == 65536);
  CHECK(*std::min_element(t.freqs.begin(), t.freqs.end()) == 256);
  CHECK(*std::max_element(t.freqs.begin(), t.freqs.end()) == 256);
}

TEST_CASE("rejects impossible shapes") {
  CHECK_THROWS_AS(quantize(std::vector<float>{}), ConfigError);
  const std::vector<float> row(10, 0.1f);
  CHECK_THROWS_AS(quantize(row, 9), ConfigError);
}

TEST_CASE("every table sums to the total with no zero entry") {
  RngState rng(2024);
  for (int iter = 0; iter < 500; ++iter) {
    const size_t n = 1 + rng.next_below(256);
    std::vector<float> row(n);
    for (auto& v : row) {
      const double u = rng.next_double();
      // spiky distributions mixed with near-zero entries
      v = static_cast<float>(u < 0.2 ? 0.0 : std::pow(u, 8.0));
    }
    const FreqTable t = quantize(row);
    CHECK(t.freqs.size() == n);
    CHECK(freq_sum(t) == FreqTable::kTotal);
    CHECK(*std::min_element(t.freqs.begin(), t.freqs.end()) >= 1u);
  }
}

TEST_CASE("the most probable symbol keeps the biggest frequency") {
  RngState rng(99);
  for (int iter = 0; iter < 500; ++iter) {
    const size_t n = 2 + rng.next_below(64);
    std::vector<float> row(n);
    for (auto& v : row) v = static_cast<float>(rng.next_double());
    const size_t best = static_cast<size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    const FreqTable t = quantize(row);
    const uint32_t top = *std::max_element(t.freqs.begin(), t.freqs.end());
    CHECK(t.freqs[best] == top);
  }
}
