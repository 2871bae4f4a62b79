#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsaa/pairing.hpp"

namespace tlsaa {

struct AttributePublicKey {
  std::string attribute_id;
  GroupElement apk;  // g^{1/a_i}, right
};

struct AttributeKeyPair {
  std::string attribute_id;
  Scalar ask;
  GroupElement apk;

  AttributePublicKey public_key() const { return {attribute_id, apk}; }
};

/// Fresh attribute key pair with nonzero secret.
AttributeKeyPair aa_setup(const PairingContext& ctx, std::string attribute_id, RandomSource& rng);
AttributeKeyPair attribute_key_pair(const PairingContext& ctx, std::string attribute_id, const Scalar& ask);

/// H(GID)^r, sent by the user with every request. Fresh r per request.
struct BlindedIdentity {
  GroupElement element;  // left
};

BlindedIdentity blind_identity(const PairingContext& ctx, std::string_view gid, const Scalar& r);

struct AttributeCredential {
  std::string attribute_id;
  GroupElement credential;  // (g · H(GID)^r)^{a_i}, left
};

/// (g · U)^{a_i}. Rejects the identity as U so every credential is GID-bound.
AttributeCredential issue_credential(const PairingContext& ctx, const AttributeKeyPair& kp,
                                     const BlindedIdentity& blinded);
/// g^{a_i}; no collusion resistance.
AttributeCredential issue_credential_basic(const PairingContext& ctx, const AttributeKeyPair& kp);

/// AND-policy elements, sorted by attribute id. The server sees attrs in the clear.
struct AccessPolicyElements {
  std::vector<std::string> attrs;
  std::vector<GroupElement> ac_transferors;  // g^{s_i/a_i}, right
  std::vector<GroupElement> plcy_modifiers;  // g^{s_i}, right
  GtElement plcy;                            // e(g,g)^{Σ s_i}
};

/// `nonces[k]` belongs to `attrs[k]`; output is reordered by attribute id.
AccessPolicyElements abe_policy_encrypt(const PairingContext& ctx, std::span<const std::string> attrs,
                                        std::span<const AttributePublicKey> apks,
                                        std::span<const Scalar> nonces);

/// ∏ pair(cred_i, ac_transferor_i) == plcy · ∏ pair(U, plcy_modifier_i).
/// Throws IncompletePolicy when a policy attribute has no credential.
bool abe_verify(const PairingContext& ctx, const AccessPolicyElements& elems,
                std::span<const AttributeCredential> creds, const BlindedIdentity& blinded);

/// ∏ pair(cred_i, ac_transferor_i) == plcy.
bool abe_verify_basic(const PairingContext& ctx, const AccessPolicyElements& elems,
                      std::span<const AttributeCredential> creds);

void validate(const PairingContext& ctx, const AccessPolicyElements& elems);

/// Sorted copy with duplicates rejected (BadAttribute).
std::vector<std::string> canonical_policy(std::span<const std::string> attrs);

}  // namespace tlsaa
