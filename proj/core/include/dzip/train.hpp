#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dzip/predictor.hpp"
#include "dzip/symbols.hpp"

namespace dzip {

struct TrainConfig {
  size_t max_epochs = 10;
  size_t batch_size = 1024;
  nn::AdamHyper adam;
  uint64_t shuffle_seed = 1;
  // Stop once an epoch improves on the best seen by less than this fraction.
  double early_stop_rel = 0.001;
  std::function<void(size_t epoch, double loss_bits)> on_epoch;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean bits/symbol, per epoch
  double best_loss = 0.0;
  size_t best_epoch = 0;
};

// Fits the model to its own input: every position t in [context_len, n) forms
// one training window (the context_len symbols before t, target t). Windows
// are reshuffled every epoch from a single seeded stream, so the whole run is
// a pure function of (initial weights, sequence, config). The weights that
// scored the best epoch mean are restored before returning.
TrainResult train(Model& model, const SymbolSequence& seq, const TrainConfig& cfg);

}  // namespace dzip
