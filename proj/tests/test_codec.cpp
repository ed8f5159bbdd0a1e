#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "dzip/codec.hpp"
#include "dzip/errors.hpp"
#include "dzip/rng.hpp"

using namespace dzip;

namespace {

std::vector<uint8_t> random_bytes(size_t n, uint32_t alphabet, uint64_t seed) {
  RngState rng(seed);
  std::vector<uint8_t> out(n);
  for (auto& b : out) b = static_cast<uint8_t>('a' + rng.next_below(alphabet));
  return out;
}

CodecOptions tiny_options(PredictorKind kind) {
  CodecOptions opt;
  opt.kind = kind;
  opt.context_len = 8;
  opt.segments = 4;
  opt.order = 2;
  opt.train.max_epochs = 1;
  opt.train.batch_size = 64;
  switch (kind) {
    case PredictorKind::Fc: opt.hidden = {8}; break;
    case PredictorKind::BiGru: opt.hidden = {4}; break;
    case PredictorKind::LstmMulti: opt.hidden = {4, 3}; break;
    case PredictorKind::AdaptiveOrderK: break;
  }
  return opt;
}

constexpr PredictorKind kAllKinds[] = {PredictorKind::Fc, PredictorKind::BiGru,
                                       PredictorKind::LstmMulti,
                                       PredictorKind::AdaptiveOrderK};

}  // namespace

TEST_CASE("segment_lengths splits near-equally, long segments first") {
  CHECK(segment_lengths(10, 3) == std::vector<size_t>{4, 3, 3});
  CHECK(segment_lengths(0, 5) == std::vector<size_t>(5, 0));
  CHECK(segment_lengths(7, 1) == std::vector<size_t>{7});
  CHECK(segment_lengths(3, 8) == std::vector<size_t>{1, 1, 1, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(segment_lengths(5, 0), ConfigError);
}

TEST_CASE("every predictor kind round trips and verifies") {
  const auto data = random_bytes(300, 3, 1);
  for (PredictorKind kind : kAllKinds) {
    const auto opt = tiny_options(kind);
    EncodeStats enc;
    const auto bytes = compress(data, opt, &enc);
    DecodeStats dec;
    const auto out = decompress(bytes, {}, &dec);
    CHECK(out == data);
    CHECK(dec.verified);
    CHECK(dec.check_word == enc.check_word);
    CHECK(dec.table_bits == doctest::Approx(enc.table_bits).epsilon(1e-9));
    CHECK(enc.size.container_bytes == bytes.size());
  }
}

TEST_CASE("degenerate inputs round trip") {
  for (PredictorKind kind : {PredictorKind::BiGru, PredictorKind::AdaptiveOrderK}) {
    const auto opt = tiny_options(kind);

    CHECK(decompress(compress({}, opt)).empty());

    const std::vector<uint8_t> one = {'q'};
    CHECK(decompress(compress(one, opt)) == one);

    const std::vector<uint8_t> same(500, 'x');
    CHECK(decompress(compress(same, opt)) == same);

    const auto shorter_than_context = random_bytes(5, 3, 2);
    CHECK(decompress(compress(shorter_than_context, opt)) == shorter_than_context);

    auto wide = tiny_options(kind);
    wide.segments = 8;
    const auto three = random_bytes(3, 2, 3);
    CHECK(decompress(compress(three, wide)) == three);

    auto single_seg = tiny_options(kind);
    single_seg.segments = 1;
    const auto blob = random_bytes(400, 4, 4);
    CHECK(decompress(compress(blob, single_seg)) == blob);
  }

  // full byte alphabet
  std::vector<uint8_t> all;
  for (int rep = 0; rep < 3; ++rep)
    for (int b = 0; b < 256; ++b) all.push_back(static_cast<uint8_t>(b));
  const auto opt = tiny_options(PredictorKind::AdaptiveOrderK);
  CHECK(decompress(compress(all, opt)) == all);
}

TEST_CASE("weights are stored exactly when a model codes something") {
  const auto opt = tiny_options(PredictorKind::Fc);

  // neural, two symbols, longer than the context: weights present
  auto c = Container::parse(compress(random_bytes(100, 2, 5), opt));
  CHECK(!c.weights.empty());

  // shorter than the context: nothing is model-coded, nothing stored
  c = Container::parse(compress(random_bytes(6, 2, 6), opt));
  CHECK(c.weights.empty());

  // single-symbol alphabet: nothing to predict
  c = Container::parse(compress(std::vector<uint8_t>(100, 'z'), opt));
  CHECK(c.weights.empty());

  // adaptive baseline never stores weights
  c = Container::parse(compress(random_bytes(100, 2, 7),
                                tiny_options(PredictorKind::AdaptiveOrderK)));
  CHECK(c.weights.empty());
}

TEST_CASE("prediction batch size never changes the bytes") {
  const auto data = random_bytes(260, 3, 8);
  auto opt = tiny_options(PredictorKind::BiGru);
  const auto base = compress(data, opt);

  auto small_chunks = opt;
  small_chunks.predict_chunk = 3;
  CHECK(compress(data, small_chunks) == base);

  DecodeOptions d1;
  d1.predict_chunk = 1;
  DecodeOptions d2;
  d2.predict_chunk = 1000;
  CHECK(decompress(base, d1) == data);
  CHECK(decompress(base, d2) == data);
}

TEST_CASE("compressing the same input twice is bit-identical") {
  const auto data = random_bytes(300, 4, 9);
  for (PredictorKind kind : kAllKinds) {
    const auto opt = tiny_options(kind);
    CHECK(compress(data, opt) == compress(data, opt));
  }
}

TEST_CASE("size report matches the actual bytes") {
  const auto data = random_bytes(300, 3, 10);
  for (PredictorKind kind : kAllKinds) {
    EncodeStats st;
    const auto bytes = compress(data, tiny_options(kind), &st);
    CHECK(st.size.container_bytes == bytes.size());
    CHECK(st.size.header_bytes + st.size.weight_bytes + st.size.payload_bytes ==
          st.size.container_bytes);
    CHECK(st.size.symbol_count == data.size());
    CHECK(st.size.payload_bits_per_symbol ==
          doctest::Approx(8.0 * st.size.payload_bytes / 300.0));

    const auto report = size_report(Container::parse(bytes));
    CHECK(report.container_bytes == st.size.container_bytes);
    CHECK(report.weight_bytes == st.size.weight_bytes);
    CHECK(report.payload_bytes == st.size.payload_bytes);
  }
}

TEST_CASE("payload sits between the ideal size and ideal plus slack") {
  const auto data = random_bytes(600, 4, 11);
  for (PredictorKind kind : {PredictorKind::Fc, PredictorKind::AdaptiveOrderK}) {
    const auto opt = tiny_options(kind);
    const auto bytes = compress(data, opt);
    DecodeStats dec;
    CHECK(decompress(bytes, {}, &dec) == data);

    const auto report = size_report(Container::parse(bytes));
    const double payload_bits = 8.0 * static_cast<double>(report.payload_bytes);
    CHECK(payload_bits >= dec.table_bits);
    CHECK(payload_bits <= dec.table_bits + 10.0 * opt.segments);
  }
}

TEST_CASE("damaged weights are caught by the table check word") {
  const auto data = random_bytes(300, 3, 12);
  const auto opt = tiny_options(PredictorKind::BiGru);
  const auto bytes = compress(data, opt);

  Container c = Container::parse(bytes);
  REQUIRE(!c.weights.empty());
  c.weights[3] ^= 0x7f;  // exponent bits of the first stored float
  const auto tampered = c.serialize();  // fresh header CRC: parse would pass
  CHECK_THROWS_AS(decompress(tampered), IntegrityError);

  // without the check word the same damage decodes to the wrong bytes
  auto unchecked_opt = opt;
  unchecked_opt.add_check_word = false;
  Container u = Container::parse(compress(data, unchecked_opt, nullptr));
  CHECK(!u.check_word);
  u.weights[3] ^= 0x7f;
  DecodeStats dec;
  const auto wrong = decompress(u.serialize(), {}, &dec);
  CHECK(!dec.verified);
  CHECK(wrong != data);
  CHECK(wrong.size() == data.size());
}

TEST_CASE("payload damage in the adaptive region is caught") {
  const auto data = random_bytes(400, 3, 13);
  auto opt = tiny_options(PredictorKind::AdaptiveOrderK);
  opt.segments = 1;
  opt.context_len = 4;
  const auto bytes = compress(data, opt);

  Container c = Container::parse(bytes);
  REQUIRE(c.segments[0].payload.size() > 4);
  c.segments[0].payload[2] ^= 0x40;  // past the uniform warm-up bits
  CHECK_THROWS_AS(decompress(c.serialize()), IntegrityError);
}

TEST_CASE("decode without a stored check word reports unverified") {
  const auto data = random_bytes(200, 3, 14);
  auto opt = tiny_options(PredictorKind::AdaptiveOrderK);
  opt.add_check_word = false;
  DecodeStats dec;
  CHECK(decompress(compress(data, opt), {}, &dec) == data);
  CHECK(!dec.verified);
  CHECK(dec.check_word != 0);  // still recomputed
}

TEST_CASE("a model-coded container must carry weights") {
  const auto data = random_bytes(300, 3, 15);
  Container c = Container::parse(compress(data, tiny_options(PredictorKind::Fc)));
  c.weights.clear();
  c.check_word.reset();
  CHECK_THROWS_AS(decompress(c.serialize()), FormatError);
}

TEST_CASE("bad codec options are rejected") {
  const auto data = random_bytes(50, 2, 16);
  auto opt = tiny_options(PredictorKind::Fc);
  opt.segments = 0;
  CHECK_THROWS_AS(compress(data, opt), ConfigError);

  opt = tiny_options(PredictorKind::Fc);
  opt.context_len = 0;
  CHECK_THROWS_AS(compress(data, opt), ConfigError);

  opt = tiny_options(PredictorKind::AdaptiveOrderK);
  opt.order = 10;  // > context_len 8
  CHECK_THROWS_AS(compress(data, opt), ConfigError);

  opt = tiny_options(PredictorKind::Fc);
  opt.predict_chunk = 0;
  CHECK_THROWS_AS(compress(data, opt), ConfigError);

  DecodeOptions dopt;
  dopt.predict_chunk = 0;
  CHECK_THROWS_AS(decompress(compress(data, tiny_options(PredictorKind::Fc)), dopt),
                  ConfigError);
}
