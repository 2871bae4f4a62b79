#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsaa/escrow_server.hpp"
#include "tlsaa/protocol.hpp"

namespace tlsaa {

// Role drivers. Each actor holds only its own secrets; everything that crosses
// between actors is one of the protocol messages, so every step can be routed
// through the wire format.

struct OwnerSecrets {
  OwnerSseKey sse;
  OwnerRecoveryKey dtk;
  std::string owner_id;
  std::string update_id;  // ID_RTk
};

/// What an owner wants changed on a record. Changing the policy or the
/// payload needs the plaintext: the owner keeps no masks, so a new one is drawn.
struct UpdateSpec {
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::vector<std::string>> policy;
  std::optional<Bytes> plaintext;
};

class OwnerActor {
 public:
  OwnerActor(ServerParameters params, std::string owner_id, RandomSource& rng);
  OwnerActor(ServerParameters params, OwnerSecrets secrets);

  const OwnerSecrets& secrets() const noexcept { return secrets_; }
  const ServerParameters& parameters() const noexcept { return params_; }

  void add_authority(const AuthorityPublicKeys& keys);
  const std::map<std::string, AuthorityPublicKeys>& authorities() const noexcept { return authorities_; }

  /// Composes all three layers and the payload. Throws MissingApk when a
  /// policy attribute has no registered authority.
  DataRecord publish(ByteView plaintext, std::span<const std::string> keywords, std::span<const std::string> policy,
                     std::uint32_t set_index, RandomSource& rng) const;

  ConsentBundle consent(std::string_view keyword, const Subset& subset) const;

  /// RTk plus replacement layers for `current` (the record as fetched).
  UpdateRequest update_request(const DataRecord& current, const Subset& subset, const UpdateSpec& spec,
                               RandomSource& rng) const;

 private:
  ServerParameters params_;
  OwnerSecrets secrets_;
  std::map<std::string, AuthorityPublicKeys> authorities_;
};

struct AuthoritySecrets {
  AttributeKeyPair abe;
  RecoveryAttributeKeyPair dtk;
  std::set<std::string> members;  // GIDs authenticated out of band
};

class AuthorityActor {
 public:
  AuthorityActor(PairingContext ctx, std::string attribute_id, RandomSource& rng);
  AuthorityActor(PairingContext ctx, AuthoritySecrets secrets);

  const std::string& attribute_id() const noexcept { return secrets_.abe.attribute_id; }
  const AuthoritySecrets& secrets() const noexcept { return secrets_; }
  AuthorityPublicKeys public_keys() const;

  void enroll(std::string gid) { secrets_.members.insert(std::move(gid)); }

  /// `gid` is the identity the AA authenticated for this caller. Throws
  /// Unauthorized for non-members and BadAttribute for another attribute.
  CredentialGrant issue(std::string_view gid, const CredentialRequest& req) const;

 private:
  PairingContext ctx_;
  AuthoritySecrets secrets_;
};

/// Per-request blinding nonces. Never leaves the user.
struct RequestBlinding {
  Scalar r;    // ABE layer
  Scalar r_u;  // key-recovery layer
  BlindedIdentity blinded;
  GroupElement blinded_dtk;
};

class UserActor {
 public:
  UserActor(ServerParameters params, std::string gid);

  const std::string& gid() const noexcept { return gid_; }

  RequestBlinding begin_request(RandomSource& rng) const;
  CredentialRequest credential_request(const RequestBlinding& b, std::string attribute_id) const;
  SearchRequest search_request(const ConsentBundle& consent, const RequestBlinding& b,
                               std::span<const CredentialGrant> grants) const;
  DecryptionTokenSet decryption_tokens(const ConsentBundle& consent, const RequestBlinding& b,
                                       std::span<const CredentialGrant> grants) const;

  /// Local key recovery and payload decryption. A mask that fails payload
  /// authentication is reported as WrongKey.
  Bytes open(const SearchMatch& match, const DecryptionTokenSet& tokens) const;

 private:
  ServerParameters params_;
  std::string gid_;
};

/// Ordered wire messages of one flow, for replay comparison.
struct Transcript {
  std::vector<std::string> messages;
};

RecordId owner_publish(const OwnerActor& owner, EscrowServer& server, ByteView plaintext,
                       std::span<const std::string> keywords, std::span<const std::string> policy,
                       std::uint32_t set_index, RandomSource& rng, Transcript* transcript = nullptr);

struct UserRequestResult {
  std::vector<std::pair<RecordId, Bytes>> plaintexts;
  std::vector<RecordFailure> failures;  // server-side and local failures
  std::vector<std::string> refused_by;  // authorities that declined to issue
  SearchStats stats;
};

/// Consent, credential issuance from every listed authority, search and local
/// decryption. Errors carry the failing role as a message prefix.
UserRequestResult user_request(const UserActor& user, const OwnerActor& owner,
                               std::span<const AuthorityActor* const> authorities, const EscrowServer& server,
                               std::string_view keyword, const Subset& subset, RandomSource& rng,
                               Transcript* transcript = nullptr);

RecordId owner_update(const OwnerActor& owner, EscrowServer& server, RecordId id, const Subset& subset,
                      const UpdateSpec& spec, RandomSource& rng, Transcript* transcript = nullptr);

// Actor state files. Each holds one actor's own material only.
std::string encode_owner_state(const PairingContext& ctx, const OwnerSecrets& s,
                               std::span<const AuthorityPublicKeys> authorities);
struct OwnerState {
  OwnerSecrets secrets;
  std::vector<AuthorityPublicKeys> authorities;
};
OwnerState decode_owner_state(const PairingContext& ctx, std::string_view text);

std::string encode_authority_state(const PairingContext& ctx, const AuthoritySecrets& s);
AuthoritySecrets decode_authority_state(const PairingContext& ctx, std::string_view text);

struct UserState {
  std::string gid;
  std::optional<RequestBlinding> pending;
  std::vector<CredentialGrant> grants;
};
std::string encode_user_state(const PairingContext& ctx, const UserState& s);
UserState decode_user_state(const PairingContext& ctx, std::string_view text);

}  // namespace tlsaa
