#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "dzip/arith.hpp"
#include "dzip/bitstream.hpp"
#include "dzip/freq_table.hpp"
#include "dzip/nn.hpp"
#include "dzip/predictor.hpp"
#include "dzip/rng.hpp"

using namespace dzip;

namespace {

Matrix<float> rand_mat(size_t r, size_t c, RngState& rng) {
  Matrix<float> m(r, c);
  for (size_t i = 0; i < m.size(); ++i)
    m.data()[i] = 2.0f * static_cast<float>(rng.next_double()) - 1.0f;
  return m;
}

void bm_matmul(benchmark::State& state) {
  const size_t b = static_cast<size_t>(state.range(0));
  const size_t n = static_cast<size_t>(state.range(1));
  const size_t m = static_cast<size_t>(state.range(2));
  RngState rng(1);
  const auto A = rand_mat(b, n, rng);
  const auto Bt = rand_mat(n, m, rng);
  Matrix<float> C(b, m);
  for (auto _ : state) {
    C.fill(0.0f);
    nn::matmul_acc(A, Bt, C);
    benchmark::DoNotOptimize(C.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(b * n * m));
}

void bm_activation(benchmark::State& state) {
  RngState rng(2);
  auto base = rand_mat(256, 256, rng);
  Matrix<float> m = base;
  const auto act = static_cast<nn::Activation>(state.range(0));
  for (auto _ : state) {
    m = base;
    nn::apply_activation(m, act);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.size()));
}

void bm_softmax(benchmark::State& state) {
  RngState rng(3);
  const auto z = rand_mat(1024, static_cast<size_t>(state.range(0)), rng);
  Matrix<float> p;
  for (auto _ : state) {
    nn::softmax_into(z, p);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(z.rows()));
}

std::vector<uint32_t> coded_symbols(const FreqTable& t, size_t n, uint64_t seed) {
  RngState rng(seed);
  std::vector<uint32_t> syms(n);
  for (auto& s : syms) {
    uint32_t x = static_cast<uint32_t>(rng.next_below(FreqTable::kTotal));
    uint32_t pick = static_cast<uint32_t>(t.freqs.size() - 1);
    for (uint32_t i = 0; i < t.freqs.size(); ++i) {
      if (x < t.freqs[i]) { pick = i; break; }
      x -= t.freqs[i];
    }
    s = pick;
  }
  return syms;
}

void bm_encode(benchmark::State& state) {
  std::vector<float> row = {0.6f, 0.2f, 0.1f, 0.05f, 0.05f};
  const FreqTable t = quantize(row);
  const auto syms = coded_symbols(t, 100000, 4);
  for (auto _ : state) {
    BitWriter bw;
    ArithmeticEncoder enc(bw);
    for (uint32_t s : syms) enc.encode(t, s);
    enc.finish();
    benchmark::DoNotOptimize(bw.bit_count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(syms.size()));
}

void bm_decode(benchmark::State& state) {
  std::vector<float> row = {0.6f, 0.2f, 0.1f, 0.05f, 0.05f};
  const FreqTable t = quantize(row);
  const auto syms = coded_symbols(t, 100000, 5);
  BitWriter bw;
  ArithmeticEncoder enc(bw);
  for (uint32_t s : syms) enc.encode(t, s);
  enc.finish();
  const auto payload = bw.take();
  for (auto _ : state) {
    BitReader br(payload);
    ArithmeticDecoder dec(br);
    uint32_t last = 0;
    for (size_t i = 0; i < syms.size(); ++i) last = dec.decode(t);
    benchmark::DoNotOptimize(last);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(syms.size()));
}

void bm_predict(benchmark::State& state) {
  PredictorSpec spec;
  spec.kind = static_cast<PredictorKind>(state.range(0));
  spec.alphabet_size = 2;
  spec.context_len = 64;
  switch (spec.kind) {
    case PredictorKind::Fc: spec.hidden = {256, 256}; break;
    case PredictorKind::BiGru: spec.hidden = {32}; break;
    case PredictorKind::LstmMulti: spec.hidden = {64, 32}; break;
    default: break;
  }
  Model model(spec);
  ContextBatch batch;
  batch.batch = 256;
  batch.context_len = 64;
  batch.contexts.resize(batch.batch * 64);
  RngState rng(6);
  for (auto& c : batch.contexts) c = static_cast<uint8_t>(rng.next_below(2));
  for (auto _ : state) {
    const auto p = model.predict(batch);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch.batch));
}

void bm_adaptive(benchmark::State& state) {
  RngState rng(7);
  std::vector<uint8_t> seq(100000);
  for (auto& s : seq) s = static_cast<uint8_t>(rng.next_below(4));
  std::vector<float> row(4);
  for (auto _ : state) {
    AdaptiveOrderK model(2, 4);
    for (size_t t = 2; t < seq.size(); ++t) {
      const std::span<const uint8_t> ctx(seq.data() + t - 2, 2);
      model.predict(ctx, row);
      model.update(ctx, seq[t]);
    }
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(seq.size() - 2));
}

void bm_quantize(benchmark::State& state) {
  RngState rng(8);
  std::vector<float> row(static_cast<size_t>(state.range(0)));
  for (auto& v : row) v = static_cast<float>(rng.next_double());
  for (auto _ : state) {
    const FreqTable t = quantize(row);
    benchmark::DoNotOptimize(t.freqs.data());
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(bm_matmul)->Args({256, 128, 256})->Args({256, 256, 256})->Args({64, 64, 64});
BENCHMARK(bm_activation)
    ->Arg(static_cast<int>(nn::Activation::Relu))
    ->Arg(static_cast<int>(nn::Activation::Sigmoid))
    ->Arg(static_cast<int>(nn::Activation::Tanh));
BENCHMARK(bm_softmax)->Arg(2)->Arg(64)->Arg(256);
BENCHMARK(bm_encode);
BENCHMARK(bm_decode);
BENCHMARK(bm_predict)
    ->Arg(static_cast<int>(PredictorKind::Fc))
    ->Arg(static_cast<int>(PredictorKind::BiGru))
    ->Arg(static_cast<int>(PredictorKind::LstmMulti))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_adaptive)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_quantize)->Arg(2)->Arg(256);

BENCHMARK_MAIN();
