#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "dzip/nn.hpp"
#include "dzip/symbols.hpp"

namespace dzip {

enum class PredictorKind : uint8_t { Fc = 0, BiGru = 1, LstmMulti = 2, AdaptiveOrderK = 3 };

// Everything needed to rebuild a model's shape (and initial weights, via the
// seed). kind + hidden + alphabet_size + context_len determine the canonical
// parameter list; the container format depends on that mapping being stable.
//
// hidden means, per kind:
//   Fc        - widths of the relu layers before the logits layer (>= 1 entry)
//   BiGru     - { per-direction hidden size }
//   LstmMulti - { cell hidden size, post-concat dense width }
struct PredictorSpec {
  PredictorKind kind = PredictorKind::Fc;
  uint32_t context_len = 64;
  uint32_t alphabet_size = 0;
  std::vector<uint32_t> hidden;
  uint32_t order = 0;  // AdaptiveOrderK context length
  uint64_t init_seed = 0;

  bool is_neural() const { return kind != PredictorKind::AdaptiveOrderK; }
  void validate() const;
};

// Default widths sized so that serialized float32 weights land near the
// reference footprints at alphabet size 2: Fc two 256-wide relu layers
// (~0.40 MB), BiGru 80 per direction (~0.16 MB), LstmMulti cell 64 with a
// 32-wide dense (~0.59 MB).
PredictorSpec default_spec(PredictorKind kind, uint32_t alphabet_size, uint32_t context_len = 64,
                           uint64_t init_seed = 0);

// A batch of fixed-length contexts (row-major) with optional targets.
struct ContextBatch {
  size_t batch = 0;
  size_t context_len = 0;
  std::vector<uint8_t> contexts;
  std::vector<uint8_t> targets;

  const uint8_t* row(size_t r) const { return contexts.data() + r * context_len; }
};

class Model {
 public:
  explicit Model(const PredictorSpec& spec);
  ~Model();
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;

  const PredictorSpec& spec() const { return spec_; }

  // Canonical parameter order; serialization and init draw order follow it.
  std::vector<nn::Param<float>*> params();
  std::vector<const nn::Param<float>*> params() const;
  size_t param_count() const;

  // One probability row per context. Pure in (weights, contexts); scratch
  // buffers make instances non-shareable across threads.
  Matrix<float> predict(const ContextBatch& ctx);

  // Forward + fused softmax/cross-entropy backward; parameter grads are
  // zeroed first and hold the batch gradient afterwards. Returns the batch
  // mean loss in bits/symbol.
  double loss_and_grad(const ContextBatch& batch);

  // loss_and_grad followed by one Adam update (which consumes the grads).
  double train_step(const ContextBatch& batch, nn::AdamHyper& adam);

  std::vector<float> snapshot() const;
  void restore(std::span<const float> snap);

 private:
  struct DenseLayer {
    nn::Param<float> w, b;
    DenseLayer() = default;
    DenseLayer(size_t out, size_t in) : w(out, in), b(1, out) {}
  };
  struct FcNet {
    std::vector<DenseLayer> layers;  // last = logits
  };
  struct BiGruNet {
    nn::GruCellParams<float> fwd, bwd;
    DenseLayer out;
  };
  struct LstmMultiNet {
    nn::LstmCellParams<float> cell;
    DenseLayer dense;
    DenseLayer out;
  };

  struct Work;  // scratch + caches, defined in the implementation

  // (param, is_bias) in canonical order.
  std::vector<std::pair<nn::Param<float>*, bool>> param_list();
  void init_weights();
  Matrix<float>& forward(const ContextBatch& ctx, bool training);

  PredictorSpec spec_;
  std::variant<FcNet, BiGruNet, LstmMultiNet> net_;
  std::unique_ptr<Work> work_;
  uint64_t weight_version_ = 1;
};

Model build_model(const PredictorSpec& spec);

// Little-endian float32 of every parameter in canonical order.
std::vector<uint8_t> serialize_weights(const Model& model);
Model deserialize_weights(const PredictorSpec& spec, std::span<const uint8_t> bytes);

// Count-based baseline with Laplace smoothing: p(s | ctx) proportional to
// count + 1. Stores nothing in the container; encoder and decoder grow
// identical tables by interleaving update() after every symbol.
class AdaptiveOrderK {
 public:
  AdaptiveOrderK(uint32_t order, uint32_t alphabet_size);

  // row gets (count+1)/(total+|S|) for each symbol; ctx.size() == order.
  void predict(std::span<const uint8_t> ctx, std::span<float> row) const;
  void update(std::span<const uint8_t> ctx, uint8_t symbol);

 private:
  uint32_t order_;
  uint32_t alphabet_;
  std::unordered_map<std::string, std::vector<uint32_t>> counts_;
};

}  // namespace dzip
