#include "dzip/freq_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dzip/errors.hpp"

namespace dzip {

FreqTable quantize(std::span<const float> row, uint32_t total) {
  const size_t n = row.size();
  if (n == 0) throw ConfigError("quantize: empty probability row");
  if (n > total) throw ConfigError("quantize: more symbols than frequency units");

  std::vector<double> p(n);
  double sum = 0;
  for (size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(row[i]);
    p[i] = (std::isfinite(v) && v > 0) ? v : 0.0;
    sum += p[i];
  }

  FreqTable t;
  t.freqs.assign(n, 0);
  std::vector<double> quota(n, 0.0);
  uint64_t assigned = 0;
  if (sum > 0) {
    for (size_t i = 0; i < n; ++i) {
      quota[i] = static_cast<double>(total) * (p[i] / sum);
      t.freqs[i] = static_cast<uint32_t>(quota[i]);
      assigned += t.freqs[i];
    }
  }
  uint64_t leftover = total - assigned;
  if (leftover > 0) {
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      const double ra = quota[a] - std::floor(quota[a]);
      const double rb = quota[b] - std::floor(quota[b]);
      return ra > rb;
    });
    for (size_t k = 0; leftover > 0; ++k, --leftover) t.freqs[order[k % n]] += 1;
  }

  for (size_t i = 0; i < n; ++i) {
    if (t.freqs[i] != 0) continue;
    size_t take = 0;
    uint32_t best_freq = 0;
    double best_quota = 0;
    for (size_t j = 0; j < n; ++j) {
      if (t.freqs[j] > best_freq || (t.freqs[j] == best_freq && quota[j] < best_quota)) {
        take = j;
        best_freq = t.freqs[j];
        best_quota = quota[j];
      }
    }
    t.freqs[take] -= 1;
    t.freqs[i] = 1;
  }
  return t;
}

FreqTable uniform_table(size_t alphabet_size, uint32_t total) {
  const std::vector<float> row(alphabet_size, 1.0f);
  return quantize(row, total);
}

}  // namespace dzip
