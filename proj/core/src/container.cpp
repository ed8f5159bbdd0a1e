#include "dzip/container.hpp"

#include <cstring>

#include "dzip/crc32.hpp"
#include "dzip/errors.hpp"

namespace dzip {
namespace {

constexpr char kMagic[4] = {'D', 'Z', 'I', 'P'};

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct Reader {
  std::span<const uint8_t> buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (buf.size() - pos < n) throw FormatError("container: truncated");
  }
  uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(buf[pos] | (buf[pos + 1] << 8));
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::vector<uint8_t> bytes(size_t n) {
    need(n);
    std::vector<uint8_t> out(buf.begin() + pos, buf.begin() + pos + n);
    pos += n;
    return out;
  }
};

}  // namespace

PredictorSpec Container::predictor_spec() const {
  PredictorSpec s;
  s.kind = kind;
  s.context_len = context_len;
  s.alphabet_size = static_cast<uint32_t>(alphabet.size());
  s.hidden = hidden;
  s.order = order;
  s.init_seed = init_seed;
  return s;
}

std::vector<uint8_t> Container::serialize() const {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(version);
  put_u64(out, n);
  put_u16(out, static_cast<uint16_t>(alphabet.size()));
  out.insert(out.end(), alphabet.begin(), alphabet.end());
  put_u32(out, context_len);
  put_u32(out, static_cast<uint32_t>(segments.size()));
  out.push_back(static_cast<uint8_t>(kind));
  put_u64(out, init_seed);
  put_u32(out, order);
  put_u16(out, static_cast<uint16_t>(hidden.size()));
  for (uint32_t h : hidden) put_u32(out, h);
  put_u64(out, weights.size());
  out.insert(out.end(), weights.begin(), weights.end());
  for (const SegmentEntry& seg : segments) {
    put_u64(out, seg.symbol_count);
    put_u64(out, seg.payload.size());
  }
  const uint32_t head_crc = crc32(std::span<const uint8_t>(out.data(), out.size()));
  for (const SegmentEntry& seg : segments)
    out.insert(out.end(), seg.payload.begin(), seg.payload.end());
  put_u32(out, head_crc);
  if (check_word) put_u32(out, *check_word);
  return out;
}

Container Container::parse(std::span<const uint8_t> bytes) {
  Reader r{bytes};
  {
    char magic[4];
    r.need(4);
    std::memcpy(magic, bytes.data(), 4);
    r.pos = 4;
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("container: bad magic");
  }
  Container c;
  c.version = r.u8();
  if (c.version != 1) throw VersionError("container: unsupported version");
  c.n = r.u64();
  const uint16_t asize = r.u16();
  if (asize > 256) throw FormatError("container: alphabet larger than a byte allows");
  c.alphabet = r.bytes(asize);
  for (size_t i = 1; i < c.alphabet.size(); ++i)
    if (c.alphabet[i] <= c.alphabet[i - 1])
      throw FormatError("container: alphabet not strictly ascending");
  c.context_len = r.u32();
  const uint32_t nseg = r.u32();
  const uint8_t kind_raw = r.u8();
  if (kind_raw > 3) throw FormatError("container: unknown predictor kind");
  c.kind = static_cast<PredictorKind>(kind_raw);
  c.init_seed = r.u64();
  c.order = r.u32();
  const uint16_t nhidden = r.u16();
  c.hidden.resize(nhidden);
  for (uint16_t i = 0; i < nhidden; ++i) c.hidden[i] = r.u32();
  const uint64_t wlen = r.u64();
  if (wlen > bytes.size()) throw FormatError("container: truncated");
  c.weights = r.bytes(static_cast<size_t>(wlen));

  r.need(static_cast<size_t>(nseg) * 16);  // segment table must fit before allocating
  c.segments.resize(nseg);
  uint64_t total_syms = 0;
  for (uint32_t i = 0; i < nseg; ++i) {
    c.segments[i].symbol_count = r.u64();
    const uint64_t plen = r.u64();
    if (plen > bytes.size()) throw FormatError("container: truncated");
    c.segments[i].payload.resize(static_cast<size_t>(plen));
    total_syms += c.segments[i].symbol_count;
  }
  if (total_syms != c.n) throw FormatError("container: segment counts do not sum to n");

  const size_t payload_start = r.pos;
  for (uint32_t i = 0; i < nseg; ++i)
    c.segments[i].payload = r.bytes(c.segments[i].payload.size());

  const uint32_t stored_crc = r.u32();
  const uint32_t computed = crc32(std::span<const uint8_t>(bytes.data(), payload_start));
  if (stored_crc != computed) throw IntegrityError("container: header checksum mismatch");

  const size_t rest = bytes.size() - r.pos;
  if (rest == 4) {
    c.check_word = r.u32();
  } else if (rest != 0) {
    throw FormatError("container: trailing bytes");
  }
  return c;
}

}  // namespace dzip
