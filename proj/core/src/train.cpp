#include "dzip/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dzip/errors.hpp"
#include "dzip/rng.hpp"

namespace dzip {

TrainResult train(Model& model, const SymbolSequence& seq, const TrainConfig& cfg) {
  const size_t k = model.spec().context_len;
  const size_t n = seq.size();
  if (n <= k) throw DataError("train: sequence no longer than the context window");
  if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");

  const size_t windows = n - k;
  std::vector<uint64_t> perm(windows);
  std::iota(perm.begin(), perm.end(), 0);
  RngState shuffle_rng(cfg.shuffle_seed);

  nn::AdamHyper adam = cfg.adam;
  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  std::vector<float> best_weights;

  ContextBatch batch;
  batch.context_len = k;

  for (size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(perm);
    double loss_sum = 0.0;
    for (size_t start = 0; start < windows; start += cfg.batch_size) {
      const size_t rows = std::min(cfg.batch_size, windows - start);
      batch.batch = rows;
      batch.contexts.resize(rows * k);
      batch.targets.resize(rows);
      for (size_t r = 0; r < rows; ++r) {
        const size_t pos = static_cast<size_t>(perm[start + r]) + k;  // target position
        const uint8_t* src = seq.indices.data() + pos - k;
        std::copy(src, src + k, batch.contexts.data() + r * k);
        batch.targets[r] = seq.indices[pos];
      }
      loss_sum += model.train_step(batch, adam) * static_cast<double>(rows);
    }
    const double epoch_loss = loss_sum / static_cast<double>(windows);
    result.epoch_loss.push_back(epoch_loss);
    if (cfg.on_epoch) cfg.on_epoch(epoch, epoch_loss);

    if (std::isnan(epoch_loss)) break;
    const double prev_best = best;
    if (epoch_loss < best) {
      best = epoch_loss;
      result.best_loss = best;
      result.best_epoch = epoch;
      best_weights = model.snapshot();
    }
    // One strike: an epoch that fails to improve meaningfully on the best so
    // far ends the run (the best snapshot is kept either way).
    if (std::isfinite(prev_best) &&
        prev_best - epoch_loss < cfg.early_stop_rel * std::max(prev_best, 1e-12))
      break;
  }

  if (best_weights.empty()) {
    // Every epoch went non-finite; keep the current weights but report what
    // happened through the loss history.
    result.best_loss = result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back();
    result.best_epoch = result.epoch_loss.empty() ? 0 : result.epoch_loss.size() - 1;
    return result;
  }
  model.restore(best_weights);
  return result;
}

}  // namespace dzip
