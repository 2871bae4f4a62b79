#include "tlsaa/codec.hpp"

#include <openssl/evp.h>

#include "tlsaa/errors.hpp"

namespace tlsaa {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::blob(ByteView bytes) {
  if (bytes.size() > 0xffffffffu) fail(ErrorCode::invalid_argument, "blob too large");
  u32(static_cast<std::uint32_t>(bytes.size()));
  raw(bytes);
}

ByteView ByteReader::raw(std::size_t n) {
  if (in_.size() - pos_ < n) fail(ErrorCode::malformed, "truncated input");
  ByteView out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (auto b : raw(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (auto b : raw(8)) v = (v << 8) | b;
  return v;
}

ByteView ByteReader::blob() { return raw(u32()); }

std::string ByteReader::string() {
  ByteView b = blob();
  return {b.begin(), b.end()};
}

void ByteReader::expect_done() const {
  if (!done()) fail(ErrorCode::malformed, "trailing bytes");
}

std::string base64url_encode(ByteView bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  while (!out.empty() && out.back() == '=') out.pop_back();
  for (char& c : out) {
    if (c == '+') c = '-';
    else if (c == '/') c = '_';
  }
  return out;
}

Bytes base64url_decode(std::string_view text) {
  if (text.empty()) return {};
  if (text.size() % 4 == 1) fail(ErrorCode::malformed, "bad base64url length");
  std::string std64(text);
  for (char& c : std64) {
    if (c == '-') c = '+';
    else if (c == '_') c = '/';
    else if (c == '+' || c == '/' || c == '=') fail(ErrorCode::malformed, "not base64url");
  }
  const std::size_t pad = (4 - std64.size() % 4) % 4;
  std64.append(pad, '=');
  Bytes out(3 * std64.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(std64.data()),
                                static_cast<int>(std64.size()));
  if (n < 0) fail(ErrorCode::malformed, "not base64url");
  out.resize(static_cast<std::size_t>(n) - pad);
  if (base64url_encode(out) != text) fail(ErrorCode::malformed, "non-canonical base64url");
  return out;
}

}  // namespace tlsaa
