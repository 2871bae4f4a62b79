#include "tlsaa/record.hpp"

#include <algorithm>

#include "tlsaa/errors.hpp"

namespace tlsaa {

void validate_record(const PairingContext& ctx, const DataRecord& rec, std::size_t n_sets) {
  if (rec.set_index == 0 || rec.set_index > n_sets) {
    fail(ErrorCode::bad_record, "set index " + std::to_string(rec.set_index) + " outside 1.." + std::to_string(n_sets));
  }
  validate(ctx, rec.sse);
  validate(ctx, rec.abe);
  validate(ctx, rec.recovery);
  if (rec.abe.attrs != rec.recovery.attrs) fail(ErrorCode::bad_record, "ABE and recovery policies differ");
  if (rec.payload.body.size() < kPayloadTagSize) fail(ErrorCode::bad_record, "payload missing tag");
}

void write(ByteWriter& w, const SseRecordElements& e) {
  w.element(e.stk_transferor);
  w.element(e.kw_modifier);
  w.u32(static_cast<std::uint32_t>(e.tagged_keywords.size()));
  for (const auto& t : e.tagged_keywords) w.element(t);
  w.element(e.update_keyword);
}

void write(ByteWriter& w, const AccessPolicyElements& e) {
  w.u32(static_cast<std::uint32_t>(e.attrs.size()));
  for (std::size_t i = 0; i < e.attrs.size(); ++i) {
    w.string(e.attrs[i]);
    w.element(e.ac_transferors.at(i));
    w.element(e.plcy_modifiers.at(i));
  }
  w.element(e.plcy);
}

void write(ByteWriter& w, const KeyRecoveryElements& e) {
  w.element(e.dtk_transferor);
  w.element(e.dtk_owner_modifier);
  w.u32(static_cast<std::uint32_t>(e.attrs.size()));
  for (std::size_t i = 0; i < e.attrs.size(); ++i) {
    w.string(e.attrs[i]);
    w.element(e.dtk_aa_transferors.at(i));
    w.element(e.dtk_aa_modifiers.at(i));
  }
  w.element(e.wrapped_key);
}

void write(ByteWriter& w, const DataRecord& rec) {
  w.u64(rec.record_id);
  w.u32(rec.set_index);
  write(w, rec.sse);
  write(w, rec.abe);
  write(w, rec.recovery);
  w.blob(encode_payload(rec.payload));
}

namespace {

// Guards element-count prefixes against absurd allocations from corrupt input.
std::uint32_t read_count(ByteReader& r) {
  const std::uint32_t n = r.u32();
  if (n > (1u << 20)) fail(ErrorCode::malformed, "element count too large");
  return n;
}

}  // namespace

SseRecordElements read_sse(ByteReader& r) {
  SseRecordElements e;
  e.stk_transferor = r.element(Side::right);
  e.kw_modifier = r.element(Side::right);
  const std::uint32_t n = read_count(r);
  for (std::uint32_t i = 0; i < n; ++i) e.tagged_keywords.push_back(r.gt());
  e.update_keyword = r.gt();
  return e;
}

AccessPolicyElements read_abe(ByteReader& r) {
  AccessPolicyElements e;
  const std::uint32_t n = read_count(r);
  for (std::uint32_t i = 0; i < n; ++i) {
    e.attrs.push_back(r.string());
    e.ac_transferors.push_back(r.element(Side::right));
    e.plcy_modifiers.push_back(r.element(Side::right));
  }
  e.plcy = r.gt();
  return e;
}

KeyRecoveryElements read_recovery(ByteReader& r) {
  KeyRecoveryElements e;
  e.dtk_transferor = r.element(Side::right);
  e.dtk_owner_modifier = r.element(Side::right);
  const std::uint32_t n = read_count(r);
  for (std::uint32_t i = 0; i < n; ++i) {
    e.attrs.push_back(r.string());
    e.dtk_aa_transferors.push_back(r.element(Side::right));
    e.dtk_aa_modifiers.push_back(r.element(Side::right));
  }
  e.wrapped_key = r.gt();
  return e;
}

DataRecord read_record(ByteReader& r) {
  DataRecord rec;
  rec.record_id = r.u64();
  rec.set_index = r.u32();
  rec.sse = read_sse(r);
  rec.abe = read_abe(r);
  rec.recovery = read_recovery(r);
  rec.payload = decode_payload(r.blob());
  return rec;
}

Bytes encode_record(const PairingContext& ctx, const DataRecord& rec) {
  ByteWriter w(ctx);
  w.blob(ctx.header());
  write(w, rec);
  return std::move(w).bytes();
}

DataRecord decode_record(const PairingContext& ctx, ByteView bytes) {
  ByteReader r(ctx, bytes);
  const ByteView header = r.blob();
  const Bytes expected = ctx.header();
  if (!std::equal(header.begin(), header.end(), expected.begin(), expected.end())) {
    fail(ErrorCode::backend_mismatch, "record encoded under different pairing parameters");
  }
  DataRecord rec = read_record(r);
  r.expect_done();
  return rec;
}

}  // namespace tlsaa
