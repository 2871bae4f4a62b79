#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tlsaa/pairing.hpp"

namespace tlsaa {

/// Big-endian, length-prefixed binary writer used by the record store.
class ByteWriter {
 public:
  explicit ByteWriter(const PairingContext& ctx) : ctx_(&ctx) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void blob(ByteView bytes);  // u32 length + bytes
  void string(std::string_view s) { blob(as_bytes(s)); }
  void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  void scalar(const Scalar& s) { raw(ctx_->encode(s)); }
  void element(const GroupElement& x) { raw(ctx_->encode(x)); }
  void element(const GtElement& x) { raw(ctx_->encode(x)); }

  const Bytes& bytes() const& noexcept { return out_; }
  Bytes bytes() && noexcept { return std::move(out_); }

 private:
  const PairingContext* ctx_;
  Bytes out_;
};

/// Reader counterpart; every read is bounds-checked and throws Error(malformed).
class ByteReader {
 public:
  ByteReader(const PairingContext& ctx, ByteView bytes) : ctx_(&ctx), in_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView blob();
  std::string string();
  ByteView raw(std::size_t n);

  Scalar scalar() { return ctx_->decode_scalar(raw(ctx_->scalar_size())); }
  GroupElement element(Side side) { return ctx_->decode_group(side, raw(ctx_->group_size(side))); }
  GtElement gt() { return ctx_->decode_gt(raw(ctx_->gt_size())); }

  bool done() const noexcept { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  const PairingContext* ctx_;
  ByteView in_;
  std::size_t pos_ = 0;
};

std::string base64url_encode(ByteView bytes);
/// Accepts unpadded base64url; throws Error(malformed) on any other input.
Bytes base64url_decode(std::string_view text);

}  // namespace tlsaa
