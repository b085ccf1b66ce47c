/* Copyright 2026 The SmartHand Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "smarthand/binary_io.hpp"

#include <boost/crc.hpp>
#include <fstream>
#include <iterator>

namespace smarthand {

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> data) {
  boost::crc_ccitt_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void ByteReader::expect_magic(std::string_view magic) {
  auto got = raw(magic.size());
  if (!std::equal(got.begin(), got.end(), magic.begin()))
    throw Error(ErrorKind::FileFormat, "bad magic, expected " + std::string(magic));
}

void verify_crc32_trailer(std::span<const std::uint8_t> file, std::size_t body_size) {
  if (file.size() < body_size + 4) throw Error(ErrorKind::FileFormat, "truncated input");
  if (file.size() > body_size + 4) throw Error(ErrorKind::FileFormat, "trailing bytes after CRC");
  ByteReader trailer(file.subspan(body_size));
  if (trailer.u32() != crc32(file.first(body_size)))
    throw Error(ErrorKind::ChecksumMismatch, "CRC-32 trailer does not match contents");
}

}  // namespace smarthand
