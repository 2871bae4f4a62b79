#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlsaa/abe.hpp"
#include "tlsaa/errors.hpp"
#include "tlsaa/key_recovery.hpp"
#include "tlsaa/payload.hpp"
#include "tlsaa/record.hpp"
#include "tlsaa/sse.hpp"

namespace tlsaa {

/// User -> server. Carries no keyword slot; the server tries every tag.
struct SearchRequest {
  SearchToken token;
  std::vector<AttributeCredential> credentials;
  BlindedIdentity blinded;
};

struct SearchMatch {
  RecordId record_id = 0;
  std::vector<std::string> policy;
  KeyRecoveryElements recovery;
  PayloadCiphertext payload;
  Subset subset;
};

/// A record that matched the SSE layer but could not be verified.
struct RecordFailure {
  RecordId record_id = 0;
  ErrorCode code = ErrorCode::incomplete_policy;
  friend bool operator==(const RecordFailure&, const RecordFailure&) = default;
};

struct SearchStats {
  std::size_t candidates = 0;         // records inside the declared subset
  std::size_t sse_matches = 0;
  std::size_t abe_verifications = 0;  // evaluated ABE equations
  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

struct SearchResponse {
  std::vector<SearchMatch> matches;  // ascending record id
  std::vector<RecordFailure> failures;
  SearchStats stats;
};

/// Owner -> server. Absent layers are left untouched.
struct UpdateRequest {
  RecordId record_id = 0;
  SearchToken rtk;
  std::optional<SseRecordElements> sse;
  std::optional<AccessPolicyElements> abe;
  std::optional<KeyRecoveryElements> recovery;
  std::optional<PayloadCiphertext> payload;
};

/// Owner -> user: search consent plus the matching owner decrypt token.
struct ConsentBundle {
  SearchToken search;
  GroupElement decrypt_owner_token;
};

/// User -> AA. The GID itself is authenticated out of band.
struct CredentialRequest {
  std::string attribute_id;
  BlindedIdentity blinded;   // H(GID)^r for the ABE layer
  GroupElement blinded_dtk;  // H(GID)^{r'_u} for key recovery
};

/// AA -> user.
struct CredentialGrant {
  AttributeCredential credential;
  DecryptToken decrypt_token;
};

/// AA -> owners.
struct AuthorityPublicKeys {
  std::string attribute_id;
  GroupElement apk;
  GroupElement apk_dtk;
};

}  // namespace tlsaa
