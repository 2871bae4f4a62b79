#pragma once

#include <array>
#include <cstdint>

#include "tlsaa/key_recovery.hpp"
#include "tlsaa/pairing.hpp"

namespace tlsaa {

using SymmetricKey = std::array<std::uint8_t, 32>;

/// HKDF-SHA256 over the canonical mask encoding, fixed info tag.
SymmetricKey derive_key(const PairingContext& ctx, const KeyMask& mask);

enum class PayloadScheme : std::uint8_t { aes256_gcm = 1 };

struct PayloadCiphertext {
  PayloadScheme scheme = PayloadScheme::aes256_gcm;
  std::array<std::uint8_t, 12> nonce{};
  Bytes body;  // ciphertext || 16-byte tag

  friend bool operator==(const PayloadCiphertext&, const PayloadCiphertext&) = default;
};

inline constexpr std::size_t kPayloadTagSize = 16;

PayloadCiphertext encrypt_payload(const SymmetricKey& key, ByteView plaintext, RandomSource& rng);
/// Throws AuthenticationFailure on a wrong key or any corruption.
Bytes decrypt_payload(const SymmetricKey& key, const PayloadCiphertext& ct);

/// scheme byte || nonce || ciphertext || tag
Bytes encode_payload(const PayloadCiphertext& ct);
PayloadCiphertext decode_payload(ByteView bytes);

}  // namespace tlsaa
