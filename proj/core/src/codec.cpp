#include "dzip/codec.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dzip/arith.hpp"
#include "dzip/bitstream.hpp"
#include "dzip/crc32.hpp"
#include "dzip/errors.hpp"
#include "dzip/freq_table.hpp"
#include "dzip/symbols.hpp"

namespace dzip {
namespace {

double table_cost_bits(const FreqTable& t, uint32_t sym) {
  return 16.0 - std::log2(static_cast<double>(t.freqs[sym]));
}

void digest_table(Crc32& d, const FreqTable& t) {
  for (uint32_t f : t.freqs) d.update_u32le(f);
}

uint32_t combine_digests(const std::vector<Crc32>& per_seg) {
  Crc32 c;
  for (const Crc32& s : per_seg) c.update_u32le(s.value());
  return c.value();
}

}  // namespace

std::vector<size_t> segment_lengths(size_t n, size_t b) {
  if (b < 1) throw ConfigError("segments: need at least one");
  std::vector<size_t> out(b, n / b);
  for (size_t i = 0; i < n % b; ++i) ++out[i];
  return out;
}

std::vector<uint8_t> compress(std::span<const uint8_t> data, const CodecOptions& opt,
                              EncodeStats* stats) {
  if (opt.segments < 1) throw ConfigError("compress: need at least one segment");
  if (opt.context_len < 1) throw ConfigError("compress: context length must be >= 1");
  if (opt.predict_chunk < 1) throw ConfigError("compress: predict_chunk must be >= 1");
  const bool neural = opt.kind != PredictorKind::AdaptiveOrderK;
  if (!neural && opt.order > opt.context_len)
    throw ConfigError("compress: adaptive order cannot exceed the context length");

  EncodeStats own;
  EncodeStats& st = stats ? *stats : own;
  st = EncodeStats{};

  const SymbolSequence seq = SymbolSequence::from_bytes(data);
  const size_t n = seq.size();
  const size_t a = seq.alphabet.size();
  const uint32_t k = opt.context_len;

  Container c;
  c.n = n;
  c.alphabet = seq.alphabet;
  c.context_len = k;
  c.kind = opt.kind;
  c.init_seed = opt.init_seed;
  c.order = neural ? 0 : opt.order;
  if (neural)
    c.hidden = opt.hidden.empty() ? default_spec(opt.kind, 2, k, opt.init_seed).hidden : opt.hidden;

  // A model is only worth training (or storing) when some position will
  // actually be coded under it: at least two distinct symbols, and at least
  // one position with a full in-segment context.
  std::optional<Model> model;
  if (neural && a >= 2 && n > k) {
    PredictorSpec mspec;
    mspec.kind = opt.kind;
    mspec.context_len = k;
    mspec.alphabet_size = static_cast<uint32_t>(a);
    mspec.hidden = c.hidden;
    mspec.init_seed = opt.init_seed;
    model.emplace(mspec);
    const TrainResult tr = train(*model, seq, opt.train);
    st.epoch_loss = tr.epoch_loss;
    st.best_epoch_loss = tr.best_loss;
    c.weights = serialize_weights(*model);
  }

  const std::vector<size_t> seg_lens = segment_lengths(n, opt.segments);
  const FreqTable uniform = a > 0 ? uniform_table(a) : FreqTable{};
  std::vector<Crc32> digests(opt.segments);
  c.segments.resize(opt.segments);

  ContextBatch batch;
  batch.context_len = k;
  std::vector<float> row(a);
  size_t seg_begin = 0;
  for (size_t s = 0; s < opt.segments; ++s) {
    const size_t len = seg_lens[s];
    c.segments[s].symbol_count = len;
    if (len > 0) {
      const uint8_t* syms = seq.indices.data() + seg_begin;
      BitWriter bw;
      ArithmeticEncoder enc(bw);
      const size_t uni_end = std::min<size_t>(k, len);
      std::optional<AdaptiveOrderK> counts;
      if (!neural && a >= 2) counts.emplace(opt.order, static_cast<uint32_t>(a));

      // No context yet: uniform coding (the adaptive baseline still grows
      // its counts here so both sides leave this region in the same state).
      for (size_t t = 0; t < uni_end; ++t) {
        enc.encode(uniform, syms[t]);
        digest_table(digests[s], uniform);
        st.table_bits += table_cost_bits(uniform, syms[t]);
        if (counts && t >= opt.order)
          counts->update(std::span<const uint8_t>(syms + t - opt.order, opt.order), syms[t]);
      }

      if (model) {
        for (size_t t0 = uni_end; t0 < len; t0 += opt.predict_chunk) {
          const size_t rows = std::min(opt.predict_chunk, len - t0);
          batch.batch = rows;
          batch.contexts.resize(rows * k);
          batch.targets.clear();
          for (size_t r = 0; r < rows; ++r)
            std::copy(syms + (t0 + r) - k, syms + (t0 + r), batch.contexts.data() + r * k);
          const Matrix<float> probs = model->predict(batch);
          for (size_t r = 0; r < rows; ++r) {
            const FreqTable table = quantize(std::span<const float>(probs.row(r), a));
            digest_table(digests[s], table);
            const uint32_t sym = syms[t0 + r];
            st.table_bits += table_cost_bits(table, sym);
            enc.encode(table, sym);
          }
        }
      } else if (counts) {
        for (size_t t = uni_end; t < len; ++t) {
          const std::span<const uint8_t> ctx(syms + t - opt.order, opt.order);
          counts->predict(ctx, row);
          const FreqTable table = quantize(row);
          digest_table(digests[s], table);
          st.table_bits += table_cost_bits(table, syms[t]);
          enc.encode(table, syms[t]);
          counts->update(ctx, syms[t]);
        }
      } else {
        // single-symbol alphabet: everything stays uniform (and free)
        for (size_t t = uni_end; t < len; ++t) {
          enc.encode(uniform, syms[t]);
          digest_table(digests[s], uniform);
          st.table_bits += table_cost_bits(uniform, syms[t]);
        }
      }
      enc.finish();
      c.segments[s].payload = bw.take();
    }
    seg_begin += len;
  }

  st.check_word = combine_digests(digests);
  if (opt.add_check_word) c.check_word = st.check_word;
  std::vector<uint8_t> bytes = c.serialize();
  st.size = size_report(c);
  return bytes;
}

std::vector<uint8_t> decompress(std::span<const uint8_t> container_bytes, const DecodeOptions& opt,
                                DecodeStats* stats) {
  if (opt.predict_chunk < 1) throw ConfigError("decompress: predict_chunk must be >= 1");
  DecodeStats own;
  DecodeStats& st = stats ? *stats : own;
  st = DecodeStats{};

  const Container c = Container::parse(container_bytes);
  const size_t nseg = c.segments.size();
  const size_t a = c.alphabet.size();
  const uint32_t k = c.context_len;
  const bool neural = c.kind != PredictorKind::AdaptiveOrderK;
  if (c.n > 0 && a == 0) throw FormatError("container: symbols present but alphabet empty");
  if (c.n > 0 && k < 1) throw FormatError("container: context length must be >= 1");
  if (!neural && c.order > k) throw FormatError("container: adaptive order exceeds context length");

  const FreqTable uniform = a > 0 ? uniform_table(a) : FreqTable{};
  std::vector<Crc32> digests(nseg);
  std::vector<std::vector<uint8_t>> seg_syms(nseg);
  std::vector<BitReader> readers;
  std::vector<ArithmeticDecoder> decs;
  readers.reserve(nseg);
  decs.reserve(nseg);
  size_t max_len = 0;
  for (size_t s = 0; s < nseg; ++s) {
    readers.emplace_back(std::span<const uint8_t>(c.segments[s].payload));
    decs.emplace_back(readers.back());
    const size_t len = static_cast<size_t>(c.segments[s].symbol_count);
    seg_syms[s].reserve(len);
    max_len = std::max(max_len, len);
  }

  if (neural) {
    for (size_t s = 0; s < nseg; ++s) {
      const size_t len = static_cast<size_t>(c.segments[s].symbol_count);
      const size_t uni_end = std::min<size_t>(k, len);
      for (size_t t = 0; t < uni_end; ++t) {
        const uint32_t sym = decs[s].decode(uniform);
        digest_table(digests[s], uniform);
        st.table_bits += table_cost_bits(uniform, sym);
        seg_syms[s].push_back(static_cast<uint8_t>(sym));
      }
    }
    if (max_len > k) {
      if (a >= 2) {
        if (c.weights.empty())
          throw FormatError("container: model-coded symbols but no stored weights");
        Model model = deserialize_weights(c.predictor_spec(), c.weights);
        ContextBatch batch;
        batch.context_len = k;
        std::vector<size_t> active;
        // All segments advance one position per round; decoding is
        // sequential inside a segment but independent across them, so the
        // model sees one batched call per round.
        for (size_t j = 0; k + j < max_len; ++j) {
          active.clear();
          for (size_t s = 0; s < nseg; ++s)
            if (static_cast<size_t>(c.segments[s].symbol_count) > k + j) active.push_back(s);
          for (size_t a0 = 0; a0 < active.size(); a0 += opt.predict_chunk) {
            const size_t rows = std::min(opt.predict_chunk, active.size() - a0);
            batch.batch = rows;
            batch.contexts.resize(rows * k);
            batch.targets.clear();
            for (size_t r = 0; r < rows; ++r) {
              const std::vector<uint8_t>& ss = seg_syms[active[a0 + r]];
              std::copy(ss.end() - k, ss.end(), batch.contexts.begin() + r * k);
            }
            const Matrix<float> probs = model.predict(batch);
            for (size_t r = 0; r < rows; ++r) {
              const size_t s = active[a0 + r];
              const FreqTable table = quantize(std::span<const float>(probs.row(r), a));
              digest_table(digests[s], table);
              const uint32_t sym = decs[s].decode(table);
              st.table_bits += table_cost_bits(table, sym);
              seg_syms[s].push_back(static_cast<uint8_t>(sym));
            }
          }
        }
      } else {
        for (size_t s = 0; s < nseg; ++s) {
          const size_t len = static_cast<size_t>(c.segments[s].symbol_count);
          for (size_t t = std::min<size_t>(k, len); t < len; ++t) {
            const uint32_t sym = decs[s].decode(uniform);
            digest_table(digests[s], uniform);
            st.table_bits += table_cost_bits(uniform, sym);
            seg_syms[s].push_back(static_cast<uint8_t>(sym));
          }
        }
      }
    }
  } else {
    std::vector<float> row(a);
    for (size_t s = 0; s < nseg; ++s) {
      const size_t len = static_cast<size_t>(c.segments[s].symbol_count);
      const size_t uni_end = std::min<size_t>(k, len);
      std::optional<AdaptiveOrderK> counts;
      if (a >= 2) counts.emplace(c.order, static_cast<uint32_t>(a));
      std::vector<uint8_t>& ss = seg_syms[s];
      for (size_t t = 0; t < len; ++t) {
        FreqTable predicted;
        const FreqTable* table = &uniform;
        if (t >= uni_end && counts) {
          counts->predict(std::span<const uint8_t>(ss.data() + t - c.order, c.order), row);
          predicted = quantize(row);
          table = &predicted;
        }
        digest_table(digests[s], *table);
        const uint32_t sym = decs[s].decode(*table);
        st.table_bits += table_cost_bits(*table, sym);
        ss.push_back(static_cast<uint8_t>(sym));
        if (counts && t >= c.order)
          counts->update(std::span<const uint8_t>(ss.data() + t - c.order, c.order),
                         static_cast<uint8_t>(sym));
      }
    }
  }

  st.check_word = combine_digests(digests);
  if (c.check_word) {
    if (st.check_word != *c.check_word)
      throw IntegrityError("container: coding-table check failed");
    st.verified = true;
  }

  std::vector<uint8_t> out;
  out.reserve(static_cast<size_t>(c.n));
  for (size_t s = 0; s < nseg; ++s)
    for (uint8_t sym : seg_syms[s]) out.push_back(c.alphabet[sym]);
  return out;
}

SizeReport size_report(const Container& c) {
  SizeReport r;
  r.symbol_count = c.n;
  r.weight_bytes = c.weights.size();
  for (const SegmentEntry& s : c.segments) r.payload_bytes += s.payload.size();
  r.header_bytes = 4 + 1 + 8 + 2 + c.alphabet.size() + 4 + 4 + 1 + 8 + 4 + 2 +
                   4 * c.hidden.size() + 8 + 16 * c.segments.size() + 4 + (c.check_word ? 4 : 0);
  r.container_bytes = r.header_bytes + r.weight_bytes + r.payload_bytes;
  if (c.n > 0) {
    r.payload_bits_per_symbol = 8.0 * static_cast<double>(r.payload_bytes) / static_cast<double>(c.n);
    r.total_bits_per_symbol =
        8.0 * static_cast<double>(r.container_bytes) / static_cast<double>(c.n);
  }
  return r;
}

}  // namespace dzip
