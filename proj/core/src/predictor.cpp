#include "dzip/predictor.hpp"

#include <bit>
#include <cmath>

#include "dzip/errors.hpp"
#include "dzip/rng.hpp"

namespace dzip {
namespace {

void build_onehot_flat(const ContextBatch& ctx, size_t a, Matrix<float>& out) {
  out.resize_zero(ctx.batch, ctx.context_len * a);
  for (size_t r = 0; r < ctx.batch; ++r) {
    const uint8_t* syms = ctx.row(r);
    float* o = out.row(r);
    for (size_t t = 0; t < ctx.context_len; ++t) {
      if (syms[t] >= a) throw DataError("predict: context symbol outside alphabet");
      o[t * a + syms[t]] = 1.0f;
    }
  }
}

void build_onehot_step(const ContextBatch& ctx, size_t t, size_t a, Matrix<float>& out) {
  out.resize_zero(ctx.batch, a);
  for (size_t r = 0; r < ctx.batch; ++r) {
    const uint8_t sym = ctx.row(r)[t];
    if (sym >= a) throw DataError("predict: context symbol outside alphabet");
    out(r, sym) = 1.0f;
  }
}

}  // namespace

void PredictorSpec::validate() const {
  if (context_len < 1) throw ConfigError("spec: context_len must be >= 1");
  if (alphabet_size < 2) throw ConfigError("spec: alphabet_size must be >= 2");
  if (alphabet_size > 256) throw ConfigError("spec: alphabet_size must be <= 256");
  switch (kind) {
    case PredictorKind::Fc:
      if (hidden.empty()) throw ConfigError("spec: Fc needs at least one hidden width");
      break;
    case PredictorKind::BiGru:
      if (hidden.size() != 1) throw ConfigError("spec: BiGru takes exactly one hidden width");
      break;
    case PredictorKind::LstmMulti:
      if (hidden.size() != 2)
        throw ConfigError("spec: LstmMulti takes {cell width, dense width}");
      break;
    case PredictorKind::AdaptiveOrderK:
      if (order > context_len) throw ConfigError("spec: order must be <= context_len");
      return;
  }
  for (uint32_t hdim : hidden)
    if (hdim < 1) throw ConfigError("spec: hidden widths must be >= 1");
}

PredictorSpec default_spec(PredictorKind kind, uint32_t alphabet_size, uint32_t context_len,
                           uint64_t init_seed) {
  PredictorSpec s;
  s.kind = kind;
  s.context_len = context_len;
  s.alphabet_size = alphabet_size;
  s.init_seed = init_seed;
  switch (kind) {
    case PredictorKind::Fc: s.hidden = {256, 256}; break;
    case PredictorKind::BiGru: s.hidden = {80}; break;
    case PredictorKind::LstmMulti: s.hidden = {64, 32}; break;
    case PredictorKind::AdaptiveOrderK: s.order = 2; break;
  }
  return s;
}

struct Model::Work {
  Matrix<float> probs, dz;

  uint64_t xposed_version = 0;
  std::vector<Matrix<float>> dense_wt;
  nn::GruCellXposed<float> gru_f, gru_b;
  nn::LstmCellXposed<float> lstm;

  // Fc
  std::vector<Matrix<float>> fc_acts;
  std::vector<nn::DenseCache<float>> fc_caches;

  // recurrent nets
  std::vector<Matrix<float>> xs;
  std::vector<Matrix<float>> gh_f, gh_b;
  std::vector<nn::GruStepCache<float>> gc_f, gc_b;
  std::vector<Matrix<float>> lh, lc;
  std::vector<nn::LstmStepCache<float>> lcache;
  Matrix<float> concat, d1, logits;
  nn::DenseCache<float> dense_cache, out_cache;

  // backward scratch
  Matrix<float> dcat, dd1, dh_cur, dh_next, dc_cur, dc_next, dx_a, dx_b;
};

Model::Model(const PredictorSpec& spec) : spec_(spec), work_(std::make_unique<Work>()) {
  spec_.validate();
  if (!spec_.is_neural())
    throw ConfigError("build_model: the adaptive baseline keeps counts, not weights");
  const size_t a = spec_.alphabet_size;
  const size_t k = spec_.context_len;
  switch (spec_.kind) {
    case PredictorKind::Fc: {
      FcNet net;
      size_t in = k * a;
      for (uint32_t hdim : spec_.hidden) {
        net.layers.emplace_back(hdim, in);
        in = hdim;
      }
      net.layers.emplace_back(a, in);
      net_ = std::move(net);
      break;
    }
    case PredictorKind::BiGru: {
      const size_t h = spec_.hidden[0];
      BiGruNet net;
      net.fwd = nn::GruCellParams<float>(a, h);
      net.bwd = nn::GruCellParams<float>(a, h);
      net.out = DenseLayer(a, 2 * h);
      net_ = std::move(net);
      break;
    }
    case PredictorKind::LstmMulti: {
      const size_t h = spec_.hidden[0];
      const size_t d = spec_.hidden[1];
      LstmMultiNet net;
      net.cell = nn::LstmCellParams<float>(a, h);
      net.dense = DenseLayer(d, k * h);
      net.out = DenseLayer(a, d);
      net_ = std::move(net);
      break;
    }
    case PredictorKind::AdaptiveOrderK:
      break;  // unreachable
  }
  init_weights();
}

Model::~Model() = default;
Model::Model(Model&&) noexcept = default;
Model& Model::operator=(Model&&) noexcept = default;

// Canonical parameter order. Serialization, weight init, and the optimizer
// all walk this exact sequence; cell list() order is gate-major with
// (input weight, recurrent weight, bias) triples, so index % 3 == 2 marks
// the biases.
std::vector<std::pair<nn::Param<float>*, bool>> Model::param_list() {
  std::vector<std::pair<nn::Param<float>*, bool>> out;
  std::visit(
      [&](auto& net) {
        using N = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<N, FcNet>) {
          for (auto& layer : net.layers) {
            out.emplace_back(&layer.w, false);
            out.emplace_back(&layer.b, true);
          }
        } else if constexpr (std::is_same_v<N, BiGruNet>) {
          size_t i = 0;
          for (auto* p : net.fwd.list()) out.emplace_back(p, (i++ % 3) == 2);
          i = 0;
          for (auto* p : net.bwd.list()) out.emplace_back(p, (i++ % 3) == 2);
          out.emplace_back(&net.out.w, false);
          out.emplace_back(&net.out.b, true);
        } else {
          size_t i = 0;
          for (auto* p : net.cell.list()) out.emplace_back(p, (i++ % 3) == 2);
          out.emplace_back(&net.dense.w, false);
          out.emplace_back(&net.dense.b, true);
          out.emplace_back(&net.out.w, false);
          out.emplace_back(&net.out.b, true);
        }
      },
      net_);
  return out;
}

std::vector<nn::Param<float>*> Model::params() {
  std::vector<nn::Param<float>*> out;
  for (auto& [p, is_bias] : param_list()) out.push_back(p);
  return out;
}

std::vector<const nn::Param<float>*> Model::params() const {
  std::vector<const nn::Param<float>*> out;
  for (auto& [p, is_bias] : const_cast<Model&>(*this).param_list()) out.push_back(p);
  return out;
}

size_t Model::param_count() const {
  size_t n = 0;
  for (const auto* p : params()) n += p->value.size();
  return n;
}

void Model::init_weights() {
  // Weight matrices draw uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)),
  // from one seeded stream in canonical order; biases stay zero and draw
  // nothing. This is format-relevant only through the stored weights.
  RngState rng(spec_.init_seed);
  for (auto& [p, is_bias] : param_list()) {
    if (is_bias) continue;
    const double fan_in = static_cast<double>(p->value.cols());
    const double fan_out = static_cast<double>(p->value.rows());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    float* v = p->value.data();
    for (size_t e = 0; e < p->value.size(); ++e)
      v[e] = static_cast<float>((2.0 * rng.next_double() - 1.0) * bound);
  }
}

Matrix<float>& Model::forward(const ContextBatch& ctx, bool training) {
  if (ctx.context_len != spec_.context_len)
    throw DataError("predict: context length differs from the model's");
  const size_t a = spec_.alphabet_size;
  const size_t k = spec_.context_len;
  const size_t b = ctx.batch;
  Work& w = *work_;

  if (w.xposed_version != weight_version_) {
    std::visit(
        [&](auto& net) {
          using N = std::decay_t<decltype(net)>;
          if constexpr (std::is_same_v<N, FcNet>) {
            w.dense_wt.resize(net.layers.size());
            for (size_t l = 0; l < net.layers.size(); ++l)
              w.dense_wt[l] = nn::transpose(net.layers[l].w.value);
          } else if constexpr (std::is_same_v<N, BiGruNet>) {
            w.gru_f.refresh(net.fwd);
            w.gru_b.refresh(net.bwd);
            w.dense_wt.resize(1);
            w.dense_wt[0] = nn::transpose(net.out.w.value);
          } else {
            w.lstm.refresh(net.cell);
            w.dense_wt.resize(2);
            w.dense_wt[0] = nn::transpose(net.dense.w.value);
            w.dense_wt[1] = nn::transpose(net.out.w.value);
          }
        },
        net_);
    w.xposed_version = weight_version_;
  }

  std::visit(
      [&](auto& net) {
        using N = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<N, FcNet>) {
          const size_t nlayers = net.layers.size();
          w.fc_acts.resize(nlayers + 1);
          w.fc_caches.resize(nlayers);
          build_onehot_flat(ctx, a, w.fc_acts[0]);
          for (size_t l = 0; l < nlayers; ++l) {
            const auto act = l + 1 == nlayers ? nn::Activation::Identity : nn::Activation::Relu;
            nn::dense_forward_t(w.fc_acts[l], w.dense_wt[l], net.layers[l].b.value, act,
                                training ? &w.fc_caches[l] : nullptr, w.fc_acts[l + 1]);
          }
          nn::softmax_into(w.fc_acts[nlayers], w.probs);
        } else if constexpr (std::is_same_v<N, BiGruNet>) {
          const size_t h = spec_.hidden[0];
          w.xs.resize(k);
          for (size_t t = 0; t < k; ++t) build_onehot_step(ctx, t, a, w.xs[t]);
          w.gh_f.resize(k + 1);
          w.gh_b.resize(k + 1);
          if (training) {
            w.gc_f.resize(k);
            w.gc_b.resize(k);
          }
          w.gh_f[0].resize_zero(b, h);
          w.gh_b[0].resize_zero(b, h);
          for (size_t t = 0; t < k; ++t) {
            nn::gru_cell_forward_t(w.xs[t], w.gh_f[t], net.fwd, w.gru_f,
                                   training ? &w.gc_f[t] : nullptr, w.gh_f[t + 1]);
            nn::gru_cell_forward_t(w.xs[k - 1 - t], w.gh_b[t], net.bwd, w.gru_b,
                                   training ? &w.gc_b[t] : nullptr, w.gh_b[t + 1]);
          }
          w.concat.resize(b, 2 * h);
          for (size_t r = 0; r < b; ++r) {
            float* dst = w.concat.row(r);
            const float* hf = w.gh_f[k].row(r);
            const float* hb = w.gh_b[k].row(r);
            for (size_t j = 0; j < h; ++j) dst[j] = hf[j];
            for (size_t j = 0; j < h; ++j) dst[h + j] = hb[j];
          }
          nn::dense_forward_t(w.concat, w.dense_wt[0], net.out.b.value, nn::Activation::Identity,
                              training ? &w.out_cache : nullptr, w.logits);
          nn::softmax_into(w.logits, w.probs);
        } else {
          const size_t h = spec_.hidden[0];
          w.xs.resize(k);
          for (size_t t = 0; t < k; ++t) build_onehot_step(ctx, t, a, w.xs[t]);
          w.lh.resize(k + 1);
          w.lc.resize(k + 1);
          if (training) w.lcache.resize(k);
          w.lh[0].resize_zero(b, h);
          w.lc[0].resize_zero(b, h);
          for (size_t t = 0; t < k; ++t)
            nn::lstm_cell_forward_t(w.xs[t], w.lh[t], w.lc[t], net.cell, w.lstm,
                                    training ? &w.lcache[t] : nullptr, w.lh[t + 1], w.lc[t + 1]);
          w.concat.resize(b, k * h);
          for (size_t r = 0; r < b; ++r) {
            float* dst = w.concat.row(r);
            for (size_t t = 0; t < k; ++t) {
              const float* ht = w.lh[t + 1].row(r);
              for (size_t j = 0; j < h; ++j) dst[t * h + j] = ht[j];
            }
          }
          nn::dense_forward_t(w.concat, w.dense_wt[0], net.dense.b.value, nn::Activation::Relu,
                              training ? &w.dense_cache : nullptr, w.d1);
          nn::dense_forward_t(w.d1, w.dense_wt[1], net.out.b.value, nn::Activation::Identity,
                              training ? &w.out_cache : nullptr, w.logits);
          nn::softmax_into(w.logits, w.probs);
        }
      },
      net_);
  return w.probs;
}

Matrix<float> Model::predict(const ContextBatch& ctx) {
  return forward(ctx, false);
}

double Model::loss_and_grad(const ContextBatch& batch) {
  if (batch.targets.size() != batch.batch)
    throw DataError("train: batch is missing targets");
  const size_t a = spec_.alphabet_size;
  for (uint8_t t : batch.targets)
    if (t >= a) throw DataError("train: target symbol outside alphabet");
  for (auto& [p, is_bias] : param_list()) p->grad.fill(0.0f);

  Work& w = *work_;
  forward(batch, true);
  const std::span<const uint8_t> targets(batch.targets.data(), batch.targets.size());
  const double loss = nn::cross_entropy(targets, w.probs);
  nn::cross_entropy_softmax_backward(targets, w.probs, w.dz);

  const size_t b = batch.batch;
  const size_t k = spec_.context_len;
  std::visit(
      [&](auto& net) {
        using N = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<N, FcNet>) {
          const size_t nlayers = net.layers.size();
          Matrix<float>* dcur = &w.dz;
          Matrix<float>* dnext = &w.dx_a;
          for (size_t li = nlayers; li-- > 0;) {
            auto& layer = net.layers[li];
            nn::dense_backward(*dcur, w.fc_acts[li], layer.w.value, w.fc_caches[li], layer.w.grad,
                               layer.b.grad, li > 0 ? dnext : nullptr);
            std::swap(dcur, dnext);
          }
        } else if constexpr (std::is_same_v<N, BiGruNet>) {
          const size_t h = spec_.hidden[0];
          nn::dense_backward(w.dz, w.concat, net.out.w.value, w.out_cache, net.out.w.grad,
                             net.out.b.grad, &w.dcat);
          w.dh_cur.resize(b, h);
          for (size_t r = 0; r < b; ++r)
            for (size_t j = 0; j < h; ++j) w.dh_cur(r, j) = w.dcat(r, j);
          for (size_t t = k; t-- > 0;) {
            nn::gru_cell_backward(w.dh_cur, w.xs[t], w.gh_f[t], w.gc_f[t], net.fwd, nullptr,
                                  w.dh_next);
            std::swap(w.dh_cur, w.dh_next);
          }
          w.dh_cur.resize(b, h);
          for (size_t r = 0; r < b; ++r)
            for (size_t j = 0; j < h; ++j) w.dh_cur(r, j) = w.dcat(r, h + j);
          for (size_t s = k; s-- > 0;) {
            nn::gru_cell_backward(w.dh_cur, w.xs[k - 1 - s], w.gh_b[s], w.gc_b[s], net.bwd, nullptr,
                                  w.dh_next);
            std::swap(w.dh_cur, w.dh_next);
          }
        } else {
          const size_t h = spec_.hidden[0];
          nn::dense_backward(w.dz, w.d1, net.out.w.value, w.out_cache, net.out.w.grad,
                             net.out.b.grad, &w.dd1);
          nn::dense_backward(w.dd1, w.concat, net.dense.w.value, w.dense_cache, net.dense.w.grad,
                             net.dense.b.grad, &w.dcat);
          w.dh_next.resize_zero(b, h);
          w.dc_next.resize(0, 0);
          for (size_t t = k; t-- > 0;) {
            w.dh_cur.resize(b, h);
            for (size_t r = 0; r < b; ++r)
              for (size_t j = 0; j < h; ++j) w.dh_cur(r, j) = w.dcat(r, t * h + j) + w.dh_next(r, j);
            nn::lstm_cell_backward(w.dh_cur, w.dc_next, w.xs[t], w.lh[t], w.lc[t], w.lcache[t],
                                   net.cell, nullptr, w.dh_next, w.dc_cur);
            std::swap(w.dc_cur, w.dc_next);
          }
        }
      },
      net_);
  return loss;
}

double Model::train_step(const ContextBatch& batch, nn::AdamHyper& adam) {
  const double loss = loss_and_grad(batch);
  nn::adam_step(params(), adam);
  ++weight_version_;
  return loss;
}

std::vector<float> Model::snapshot() const {
  std::vector<float> out;
  out.reserve(param_count());
  for (const auto* p : params()) {
    const float* v = p->value.data();
    out.insert(out.end(), v, v + p->value.size());
  }
  return out;
}

void Model::restore(std::span<const float> snap) {
  if (snap.size() != param_count()) throw DimensionError("restore: wrong value count");
  size_t off = 0;
  for (auto* p : params()) {
    float* v = p->value.data();
    for (size_t e = 0; e < p->value.size(); ++e) v[e] = snap[off++];
  }
  ++weight_version_;
}

Model build_model(const PredictorSpec& spec) {
  return Model(spec);
}

std::vector<uint8_t> serialize_weights(const Model& model) {
  const auto snap = model.snapshot();
  std::vector<uint8_t> out;
  out.reserve(snap.size() * 4);
  for (float f : snap) {
    const uint32_t u = std::bit_cast<uint32_t>(f);
    out.push_back(static_cast<uint8_t>(u));
    out.push_back(static_cast<uint8_t>(u >> 8));
    out.push_back(static_cast<uint8_t>(u >> 16));
    out.push_back(static_cast<uint8_t>(u >> 24));
  }
  return out;
}

Model deserialize_weights(const PredictorSpec& spec, std::span<const uint8_t> bytes) {
  Model m(spec);
  if (bytes.size() != m.param_count() * 4)
    throw FormatError("weights: byte length does not match the spec's parameter count");
  std::vector<float> vals(bytes.size() / 4);
  for (size_t i = 0; i < vals.size(); ++i) {
    const uint32_t u = static_cast<uint32_t>(bytes[4 * i]) |
                       (static_cast<uint32_t>(bytes[4 * i + 1]) << 8) |
                       (static_cast<uint32_t>(bytes[4 * i + 2]) << 16) |
                       (static_cast<uint32_t>(bytes[4 * i + 3]) << 24);
    vals[i] = std::bit_cast<float>(u);
  }
  m.restore(vals);
  return m;
}

AdaptiveOrderK::AdaptiveOrderK(uint32_t order, uint32_t alphabet_size)
    : order_(order), alphabet_(alphabet_size) {
  if (alphabet_size < 1) throw ConfigError("adaptive: empty alphabet");
}

void AdaptiveOrderK::predict(std::span<const uint8_t> ctx, std::span<float> row) const {
  if (ctx.size() != order_) throw DataError("adaptive: context length != order");
  if (row.size() != alphabet_) throw DimensionError("adaptive: row size != alphabet");
  const std::string key(reinterpret_cast<const char*>(ctx.data()), ctx.size());
  const auto it = counts_.find(key);
  uint64_t total = 0;
  if (it != counts_.end())
    for (uint32_t c : it->second) total += c;
  const double denom = static_cast<double>(total + alphabet_);
  for (uint32_t s = 0; s < alphabet_; ++s) {
    const uint64_t c = it != counts_.end() ? it->second[s] : 0;
    row[s] = static_cast<float>(static_cast<double>(c + 1) / denom);
  }
}

void AdaptiveOrderK::update(std::span<const uint8_t> ctx, uint8_t symbol) {
  if (ctx.size() != order_) throw DataError("adaptive: context length != order");
  if (symbol >= alphabet_) throw DataError("adaptive: symbol outside alphabet");
  std::string key(reinterpret_cast<const char*>(ctx.data()), ctx.size());
  auto& row = counts_[key];
  if (row.empty()) row.assign(alphabet_, 0);
  row[symbol] += 1;
}

}  // namespace dzip
