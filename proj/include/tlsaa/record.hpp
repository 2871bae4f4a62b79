#pragma once

#include <cstdint>

#include "tlsaa/abe.hpp"
#include "tlsaa/codec.hpp"
#include "tlsaa/key_recovery.hpp"
#include "tlsaa/payload.hpp"
#include "tlsaa/sse.hpp"

namespace tlsaa {

using RecordId = std::uint64_t;

/// Everything the server keeps for one piece of data: the three element layers
/// plus the AEAD payload. The server holds no plaintext field.
struct DataRecord {
  RecordId record_id = 0;  // assigned by the server on store
  std::uint32_t set_index = 0;
  SseRecordElements sse;
  AccessPolicyElements abe;
  KeyRecoveryElements recovery;
  PayloadCiphertext payload;
};

/// Throws BadRecord unless every layer is complete, the set index is in 1..n,
/// and the ABE and recovery layers cover the same policy.
void validate_record(const PairingContext& ctx, const DataRecord& rec, std::size_t n_sets);

void write(ByteWriter& w, const SseRecordElements& e);
void write(ByteWriter& w, const AccessPolicyElements& e);
void write(ByteWriter& w, const KeyRecoveryElements& e);
void write(ByteWriter& w, const DataRecord& rec);
SseRecordElements read_sse(ByteReader& r);
AccessPolicyElements read_abe(ByteReader& r);
KeyRecoveryElements read_recovery(ByteReader& r);
DataRecord read_record(ByteReader& r);

/// Standalone encoding: parameter header followed by the record body.
Bytes encode_record(const PairingContext& ctx, const DataRecord& rec);
/// Rejects records produced under different pairing parameters.
DataRecord decode_record(const PairingContext& ctx, ByteView bytes);

}  // namespace tlsaa
