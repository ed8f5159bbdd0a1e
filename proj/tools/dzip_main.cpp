#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dzip/codec.hpp"
#include "dzip/datagen.hpp"
#include "dzip/errors.hpp"

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed on " + path);
  return data;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed on " + path);
}

dzip::PredictorKind parse_kind(const std::string& name) {
  if (name == "fc") return dzip::PredictorKind::Fc;
  if (name == "bigru") return dzip::PredictorKind::BiGru;
  if (name == "lstmmulti") return dzip::PredictorKind::LstmMulti;
  if (name == "orderk") return dzip::PredictorKind::AdaptiveOrderK;
  throw dzip::ConfigError("unknown model: " + name);
}

const char* kind_name(dzip::PredictorKind k) {
  switch (k) {
    case dzip::PredictorKind::Fc: return "fc";
    case dzip::PredictorKind::BiGru: return "bigru";
    case dzip::PredictorKind::LstmMulti: return "lstmmulti";
    case dzip::PredictorKind::AdaptiveOrderK: return "orderk";
  }
  return "?";
}

struct CompressArgs {
  std::string input, output;
  std::string model = "bigru";
  uint32_t order = 2;
  uint32_t context = 64;
  uint32_t segments = 64;
  size_t epochs = 10;
  size_t batch = 1024;
  double lr = 1e-3;
  uint64_t seed = 0;
  uint64_t shuffle_seed = 1;
  std::vector<uint32_t> hidden;
  size_t chunk = 1024;
  bool no_check = false;
  bool quiet = false;
};

void run_compress(const CompressArgs& a) {
  dzip::CodecOptions opt;
  opt.kind = parse_kind(a.model);
  opt.context_len = a.context;
  opt.hidden = a.hidden;
  opt.order = a.order;
  opt.init_seed = a.seed;
  opt.segments = a.segments;
  opt.add_check_word = !a.no_check;
  opt.predict_chunk = a.chunk;
  opt.train.max_epochs = a.epochs;
  opt.train.batch_size = a.batch;
  opt.train.adam.learning_rate = a.lr;
  opt.train.shuffle_seed = a.shuffle_seed;
  if (!a.quiet)
    opt.train.on_epoch = [](size_t epoch, double loss) {
      std::fprintf(stderr, "epoch %zu loss_bits %.6f\n", epoch, loss);
    };

  const std::vector<uint8_t> data = read_file(a.input);
  dzip::EncodeStats st;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<uint8_t> packed = dzip::compress(data, opt, &st);
  const auto t1 = std::chrono::steady_clock::now();
  write_file(a.output, packed);

  std::printf("model %s\n", a.model.c_str());
  std::printf("n %zu\n", data.size());
  std::printf("epochs_run %zu\n", st.epoch_loss.size());
  std::printf("best_epoch_loss %.6f\n", st.best_epoch_loss);
  std::printf("table_bits %.2f\n", st.table_bits);
  std::printf("check_word %08x\n", st.check_word);
  std::printf("container_bytes %zu\n", st.size.container_bytes);
  std::printf("header_bytes %zu\n", st.size.header_bytes);
  std::printf("weight_bytes %zu\n", st.size.weight_bytes);
  std::printf("payload_bytes %zu\n", st.size.payload_bytes);
  std::printf("payload_bits_per_symbol %.6f\n", st.size.payload_bits_per_symbol);
  std::printf("total_bits_per_symbol %.6f\n", st.size.total_bits_per_symbol);
  std::printf("seconds %.2f\n", std::chrono::duration<double>(t1 - t0).count());
}

void run_decompress(const std::string& input, const std::string& output, size_t chunk) {
  dzip::DecodeOptions opt;
  opt.predict_chunk = chunk;
  const std::vector<uint8_t> packed = read_file(input);
  dzip::DecodeStats st;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<uint8_t> data = dzip::decompress(packed, opt, &st);
  const auto t1 = std::chrono::steady_clock::now();
  write_file(output, data);
  std::printf("n %zu\n", data.size());
  std::printf("table_bits %.2f\n", st.table_bits);
  std::printf("check_word %08x\n", st.check_word);
  std::printf("verified %s\n", st.verified ? "yes" : "no");
  std::printf("seconds %.2f\n", std::chrono::duration<double>(t1 - t0).count());
}

void run_inspect(const std::string& input) {
  const std::vector<uint8_t> packed = read_file(input);
  const dzip::Container c = dzip::Container::parse(packed);
  const dzip::SizeReport r = dzip::size_report(c);
  std::printf("version %u\n", c.version);
  std::printf("n %llu\n", static_cast<unsigned long long>(c.n));
  std::printf("alphabet %zu\n", c.alphabet.size());
  std::printf("context_len %u\n", c.context_len);
  std::printf("segments %zu\n", c.segments.size());
  std::printf("model %s\n", kind_name(c.kind));
  std::printf("init_seed %llu\n", static_cast<unsigned long long>(c.init_seed));
  std::printf("order %u\n", c.order);
  std::string hidden;
  for (uint32_t h : c.hidden) hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
  std::printf("hidden %s\n", hidden.empty() ? "-" : hidden.c_str());
  std::printf("check_word %s\n", c.check_word ? "present" : "absent");
  std::printf("container_bytes %zu\n", r.container_bytes);
  std::printf("header_bytes %zu\n", r.header_bytes);
  std::printf("weight_bytes %zu\n", r.weight_bytes);
  std::printf("payload_bytes %zu\n", r.payload_bytes);
  std::printf("payload_bits_per_symbol %.6f\n", r.payload_bits_per_symbol);
  std::printf("total_bits_per_symbol %.6f\n", r.total_bits_per_symbol);
}

void run_gen(const std::string& kind, uint64_t length, double p, uint32_t lag, uint32_t alphabet,
             uint64_t seed, const std::string& output) {
  dzip::SourceSpec spec;
  if (kind == "iid") spec.kind = dzip::SourceKind::Iid;
  else if (kind == "xor") spec.kind = dzip::SourceKind::Xor;
  else if (kind == "hmm") spec.kind = dzip::SourceKind::Hmm;
  else throw dzip::ConfigError("unknown source: " + kind);
  spec.length = length;
  spec.p = p;
  spec.lag = lag;
  spec.alphabet = alphabet;
  spec.seed = seed;
  write_file(output, dzip::generate(spec).to_bytes());
  std::printf("n %llu\n", static_cast<unsigned long long>(length));
  std::printf("entropy_rate %.6f\n", dzip::entropy_rate(spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neural-model arithmetic-coding compressor"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic test sequence");
  std::string gen_kind = "iid", gen_out;
  uint64_t gen_len = 1000000, gen_seed = 1;
  double gen_p = 0.1;
  uint32_t gen_lag = 20, gen_alpha = 2;
  gen->add_option("--kind", gen_kind, "iid | xor | hmm")->capture_default_str();
  gen->add_option("--length", gen_len, "symbols to generate")->capture_default_str();
  gen->add_option("-p,--flip", gen_p, "iid/hmm flip probability")->capture_default_str();
  gen->add_option("--lag", gen_lag, "xor/hmm dependency distance")->capture_default_str();
  gen->add_option("--alphabet", gen_alpha, "alphabet size")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "output path")->required();

  // compress
  auto* cmp = app.add_subcommand("compress", "compress a file");
  CompressArgs ca;
  cmp->add_option("input", ca.input, "file to compress")->required();
  cmp->add_option("-o,--output", ca.output, "container path")->required();
  cmp->add_option("--model", ca.model, "fc | bigru | lstmmulti | orderk")->capture_default_str();
  cmp->add_option("--order", ca.order, "context order for orderk")->capture_default_str();
  cmp->add_option("-K,--context", ca.context, "context window length")->capture_default_str();
  cmp->add_option("--segments", ca.segments, "independently coded segments")->capture_default_str();
  cmp->add_option("--epochs", ca.epochs, "max training epochs")->capture_default_str();
  cmp->add_option("--batch", ca.batch, "training minibatch size")->capture_default_str();
  cmp->add_option("--lr", ca.lr, "Adam learning rate")->capture_default_str();
  cmp->add_option("--seed", ca.seed, "weight init seed")->capture_default_str();
  cmp->add_option("--shuffle-seed", ca.shuffle_seed, "epoch shuffle seed")->capture_default_str();
  cmp->add_option("--hidden", ca.hidden, "hidden sizes (overrides defaults)");
  cmp->add_option("--chunk", ca.chunk, "max rows per model call")->capture_default_str();
  cmp->add_flag("--no-check", ca.no_check, "skip the coding-table check word");
  cmp->add_flag("-q,--quiet", ca.quiet, "suppress per-epoch progress");

  // decompress
  auto* dec = app.add_subcommand("decompress", "restore a compressed file");
  std::string dec_in, dec_out;
  size_t dec_chunk = 1024;
  dec->add_option("input", dec_in, "container path")->required();
  dec->add_option("-o,--output", dec_out, "restored file path")->required();
  dec->add_option("--chunk", dec_chunk, "max rows per model call")->capture_default_str();

  // inspect
  auto* ins = app.add_subcommand("inspect", "print container metadata");
  std::string ins_in;
  ins->add_option("input", ins_in, "container path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) run_gen(gen_kind, gen_len, gen_p, gen_lag, gen_alpha, gen_seed, gen_out);
    if (cmp->parsed()) run_compress(ca);
    if (dec->parsed()) run_decompress(dec_in, dec_out, dec_chunk);
    if (ins->parsed()) run_inspect(ins_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
