#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "dzip/bitstream.hpp"
#include "dzip/crc32.hpp"

using namespace dzip;

TEST_CASE("bit writer packs msb first") {
  BitWriter bw;
  for (uint32_t b : {1u, 0u, 1u, 1u, 0u, 0u, 1u, 0u}) bw.put_bit(b);
  CHECK(bw.bit_count() == 8);
  REQUIRE(bw.bytes().size() == 1);
  CHECK(bw.bytes()[0] == 0xB2);
}

TEST_CASE("bit writer zero pads the last byte") {
  BitWriter bw;
  bw.put_bit(1);
  bw.put_bit(1);
  bw.pad_to_byte();
  CHECK(bw.bit_count() == 2);
  REQUIRE(bw.bytes().size() == 1);
  CHECK(bw.bytes()[0] == 0xC0);

  bw.put_bit(1);  // starts a fresh byte after padding
  CHECK(bw.bytes().size() == 2);
  CHECK(bw.bytes()[1] == 0x80);
}

TEST_CASE("bit reader returns the written stream then zeros") {
  BitWriter bw;
  const std::vector<uint32_t> bits = {1, 0, 0, 1, 1, 1, 0, 1, 0, 1};
  for (uint32_t b : bits) bw.put_bit(b);
  const std::vector<uint8_t> bytes = bw.take();

  BitReader br(bytes);
  for (uint32_t b : bits) CHECK(br.read_bit() == b);
  // padding bits of the open byte, then past-the-end
  for (int i = 0; i < 40; ++i) CHECK(br.read_bit() == 0);
  CHECK(br.bits_consumed() == bits.size() + 40);
}

TEST_CASE("crc32 known values") {
  const std::string check = "123456789";
  CHECK(crc32(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(check.data()),
                                       check.size())) == 0xCBF43926u);
  CHECK(crc32(std::span<const uint8_t>()) == 0x00000000u);
  const std::string a = "a";
  CHECK(crc32(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(a.data()), 1)) ==
        0xE8B7BE43u);
  const std::string abc = "abc";
  CHECK(crc32(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(abc.data()), 3)) ==
        0x352441C2u);
}

TEST_CASE("crc32 incremental equals one shot") {
  std::vector<uint8_t> data(257);
  for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<uint8_t>(i * 7 + 3);
  Crc32 inc;
  inc.update(std::span<const uint8_t>(data.data(), 100));
  inc.update(std::span<const uint8_t>(data.data() + 100, data.size() - 100));
  CHECK(inc.value() == crc32(data));
}

TEST_CASE("crc32 u32 update matches little endian bytes") {
  Crc32 a;
  a.update_u32le(0x11223344u);
  const uint8_t bytes[4] = {0x44, 0x33, 0x22, 0x11};
  Crc32 b;
  b.update(bytes, 4);
  CHECK(a.value() == b.value());
}
