#pragma once

#include <span>
#include <string>
#include <vector>

#include "tlsaa/abe.hpp"
#include "tlsaa/pairing.hpp"
#include "tlsaa/sse.hpp"

namespace tlsaa {

/// sk', kept apart from the SSE key so search consent cannot unlock payloads.
struct OwnerRecoveryKey {
  Scalar sk_dtk;

  /// Draws sk' != sse.sk.
  static OwnerRecoveryKey generate(const PairingContext& ctx, const OwnerSseKey& sse, RandomSource& rng);
};

struct RecoveryAttributePublicKey {
  std::string attribute_id;
  GroupElement apk_dtk;  // g^{1/a'_i}, right
};

struct RecoveryAttributeKeyPair {
  std::string attribute_id;
  Scalar ask_dtk;
  GroupElement apk_dtk;

  RecoveryAttributePublicKey public_key() const { return {attribute_id, apk_dtk}; }
};

/// Draws a'_i != abe.ask for the same attribute.
RecoveryAttributeKeyPair recovery_aa_setup(const PairingContext& ctx, const AttributeKeyPair& abe, RandomSource& rng);
RecoveryAttributeKeyPair recovery_attribute_key_pair(const PairingContext& ctx, std::string attribute_id,
                                                     const Scalar& ask_dtk);

/// Random GT element whose KDF output is the payload key.
struct KeyMask {
  GtElement element;

  friend bool operator==(const KeyMask&, const KeyMask&) = default;
};

struct KeyRecoveryElements {
  GroupElement dtk_transferor;                  // g^{r'/sk'}, right
  GroupElement dtk_owner_modifier;              // g^{r'}, right
  std::vector<std::string> attrs;               // sorted, same as the ABE policy
  std::vector<GroupElement> dtk_aa_transferors; // g^{s'_i/a'_i}, right
  std::vector<GroupElement> dtk_aa_modifiers;   // g^{s'_i}, right
  GtElement wrapped_key;                        // m · e(g,g)^{Σ s'_i + r'}
};

struct RecoveryNonces {
  Scalar owner;                    // r'
  std::vector<Scalar> attributes;  // s'_i, parallel to the policy list passed to wrap_key
};

/// Throws NonceReuse if any recovery nonce equals one of `other_layer_nonces`
/// (the SSE r and ABE s_i of the same record).
KeyRecoveryElements wrap_key(const PairingContext& ctx, const OwnerRecoveryKey& owner,
                             std::span<const std::string> policy,
                             std::span<const RecoveryAttributePublicKey> apks, const RecoveryNonces& nonces,
                             const KeyMask& mask, std::span<const Scalar> other_layer_nonces = {});

/// (∏_{i∈S} pk_i · g)^{sk'}.
GroupElement consent_decrypt_token(const PairingContext& ctx, const OwnerRecoveryKey& owner, const Subset& subset,
                                   const SetPublicKeys& pks);
GroupElement consent_decrypt_token_basic(const PairingContext& ctx, const OwnerRecoveryKey& owner);

struct DecryptToken {
  std::string attribute_id;
  GroupElement token;  // (g · H(GID)^{r'_u})^{a'_i}, left
};

DecryptToken issue_decrypt_token(const PairingContext& ctx, const RecoveryAttributeKeyPair& kp,
                                 const GroupElement& blinded_r);
DecryptToken issue_decrypt_token_basic(const PairingContext& ctx, const RecoveryAttributeKeyPair& kp);

struct DecryptionTokenSet {
  GroupElement owner_token;
  Subset subset;
  std::vector<DecryptToken> aa_tokens;
  GroupElement blinded_r;  // H(GID)^{r'_u}
};

/// Local to the user: no server state is consulted.
KeyMask recover_key(const PairingContext& ctx, const KeyRecoveryElements& elems, const DecryptionTokenSet& tokens,
                    const SetPublicKeys& pks);

/// m = wrapped / (pair(g^{sk'}, g^{r'/sk'}) · ∏ pair(g^{a'_i}, g^{s'_i/a'_i})).
KeyMask recover_key_basic(const PairingContext& ctx, const KeyRecoveryElements& elems,
                          const GroupElement& owner_token, std::span<const DecryptToken> aa_tokens);

void validate(const PairingContext& ctx, const KeyRecoveryElements& elems);

}  // namespace tlsaa
