#include "tlsaa/actors.hpp"

#include <algorithm>

#include "json_codec.hpp"
#include "tlsaa/codec.hpp"
#include "tlsaa/errors.hpp"
#include "tlsaa/wire.hpp"

namespace tlsaa {
namespace {

using jsonc::json;

// Nonzero scalars, pairwise distinct, so no nonce is shared across layers.
std::vector<Scalar> distinct_scalars(const PairingContext& ctx, std::size_t n, RandomSource& rng) {
  std::vector<Scalar> out;
  while (out.size() < n) {
    Scalar s = ctx.random_scalar(rng);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

template <class F>
auto as_role(std::string_view role, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(role) + ": " + e.message());
  }
}

void record(Transcript* t, std::string message) {
  if (t) t->messages.push_back(std::move(message));
}

struct LayerSet {
  AccessPolicyElements abe;
  KeyRecoveryElements recovery;
  PayloadCiphertext payload;
};

}  // namespace

// --- owner ----------------------------------------------------------------

OwnerActor::OwnerActor(ServerParameters params, std::string owner_id, RandomSource& rng)
    : params_(std::move(params)) {
  if (owner_id.empty()) fail(ErrorCode::invalid_argument, "owner id must not be empty");
  const PairingContext& ctx = params_.ctx;
  secrets_.sse = OwnerSseKey::generate(ctx, rng);
  secrets_.dtk = OwnerRecoveryKey::generate(ctx, secrets_.sse, rng);
  secrets_.owner_id = std::move(owner_id);
  Bytes id(16);
  rng.fill(id);
  secrets_.update_id = base64url_encode(id);
}

OwnerActor::OwnerActor(ServerParameters params, OwnerSecrets secrets)
    : params_(std::move(params)), secrets_(std::move(secrets)) {}

void OwnerActor::add_authority(const AuthorityPublicKeys& keys) { authorities_[keys.attribute_id] = keys; }

namespace {

LayerSet policy_layers(const PairingContext& ctx, const OwnerSecrets& secrets,
                       const std::map<std::string, AuthorityPublicKeys>& authorities,
                       std::span<const std::string> policy_in, ByteView plaintext, std::span<const Scalar> sse_nonces,
                       RandomSource& rng) {
  const std::vector<std::string> policy = canonical_policy(policy_in);
  std::vector<AttributePublicKey> apks;
  std::vector<RecoveryAttributePublicKey> dtk_apks;
  for (const auto& attr : policy) {
    auto it = authorities.find(attr);
    if (it == authorities.end()) fail(ErrorCode::missing_apk, "no authority public keys for attribute " + attr);
    apks.push_back({attr, it->second.apk});
    dtk_apks.push_back({attr, it->second.apk_dtk});
  }
  const std::size_t k = policy.size();
  std::vector<Scalar> nonces;
  do {
    nonces = distinct_scalars(ctx, 2 * k + 1, rng);
  } while (std::any_of(nonces.begin(), nonces.end(), [&](const Scalar& s) {
    return std::find(sse_nonces.begin(), sse_nonces.end(), s) != sse_nonces.end();
  }));
  const std::span<const Scalar> s(nonces.data(), k);
  RecoveryNonces rn{nonces[2 * k], std::vector<Scalar>(nonces.begin() + static_cast<std::ptrdiff_t>(k),
                                                       nonces.begin() + static_cast<std::ptrdiff_t>(2 * k))};
  std::vector<Scalar> other(sse_nonces.begin(), sse_nonces.end());
  other.insert(other.end(), s.begin(), s.end());

  LayerSet out;
  out.abe = abe_policy_encrypt(ctx, policy, apks, s);
  const KeyMask mask{ctx.random_gt(rng)};
  out.recovery = wrap_key(ctx, secrets.dtk, policy, dtk_apks, rn, mask, other);
  out.payload = encrypt_payload(derive_key(ctx, mask), plaintext, rng);
  return out;
}

}  // namespace

DataRecord OwnerActor::publish(ByteView plaintext, std::span<const std::string> keywords,
                               std::span<const std::string> policy, std::uint32_t set_index,
                               RandomSource& rng) const {
  const PairingContext& ctx = params_.ctx;
  if (keywords.empty()) fail(ErrorCode::invalid_argument, "a record needs at least one keyword");
  Subset{set_index}.validate(params_.pks.size());
  const Scalar r = ctx.random_scalar(rng);

  DataRecord rec;
  rec.set_index = set_index;
  rec.sse = sse_encrypt(ctx, secrets_.sse, keywords, secrets_.owner_id, secrets_.update_id, r);
  LayerSet layers = policy_layers(ctx, secrets_, authorities_, policy, plaintext, std::span(&r, 1), rng);
  rec.abe = std::move(layers.abe);
  rec.recovery = std::move(layers.recovery);
  rec.payload = std::move(layers.payload);
  return rec;
}

ConsentBundle OwnerActor::consent(std::string_view keyword, const Subset& subset) const {
  return {consent_search_token(params_.ctx, secrets_.sse, keyword, subset, params_.pks),
          consent_decrypt_token(params_.ctx, secrets_.dtk, subset, params_.pks)};
}

UpdateRequest OwnerActor::update_request(const DataRecord& current, const Subset& subset, const UpdateSpec& spec,
                                         RandomSource& rng) const {
  const PairingContext& ctx = params_.ctx;
  if (!spec.keywords && !spec.plaintext) {
    fail(ErrorCode::invalid_argument, spec.policy ? "changing the policy requires the plaintext" : "nothing to update");
  }
  UpdateRequest req;
  req.record_id = current.record_id;
  req.rtk = make_update_token(ctx, secrets_.sse, secrets_.update_id, subset, params_.pks);

  std::vector<Scalar> sse_nonce;
  if (spec.keywords) {
    if (spec.keywords->empty()) fail(ErrorCode::invalid_argument, "a record needs at least one keyword");
    sse_nonce.push_back(ctx.random_scalar(rng));
    req.sse = sse_encrypt(ctx, secrets_.sse, *spec.keywords, secrets_.owner_id, secrets_.update_id, sse_nonce[0]);
  }
  if (spec.plaintext) {
    const std::vector<std::string>& policy = spec.policy ? *spec.policy : current.abe.attrs;
    LayerSet layers = policy_layers(ctx, secrets_, authorities_, policy, *spec.plaintext, sse_nonce, rng);
    req.abe = std::move(layers.abe);
    req.recovery = std::move(layers.recovery);
    req.payload = std::move(layers.payload);
  }
  return req;
}

// --- authority --------------------------------------------------------------

AuthorityActor::AuthorityActor(PairingContext ctx, std::string attribute_id, RandomSource& rng)
    : ctx_(std::move(ctx)) {
  secrets_.abe = aa_setup(ctx_, std::move(attribute_id), rng);
  secrets_.dtk = recovery_aa_setup(ctx_, secrets_.abe, rng);
}

AuthorityActor::AuthorityActor(PairingContext ctx, AuthoritySecrets secrets)
    : ctx_(std::move(ctx)), secrets_(std::move(secrets)) {}

AuthorityPublicKeys AuthorityActor::public_keys() const {
  return {secrets_.abe.attribute_id, secrets_.abe.apk, secrets_.dtk.apk_dtk};
}

CredentialGrant AuthorityActor::issue(std::string_view gid, const CredentialRequest& req) const {
  if (!secrets_.members.count(std::string(gid))) {
    fail(ErrorCode::unauthorized, "requester does not hold attribute " + attribute_id());
  }
  if (req.attribute_id != attribute_id()) {
    fail(ErrorCode::bad_attribute, "this authority issues " + attribute_id() + ", not " + req.attribute_id);
  }
  return {issue_credential(ctx_, secrets_.abe, req.blinded), issue_decrypt_token(ctx_, secrets_.dtk, req.blinded_dtk)};
}

// --- user -------------------------------------------------------------------

UserActor::UserActor(ServerParameters params, std::string gid) : params_(std::move(params)), gid_(std::move(gid)) {
  if (gid_.empty()) fail(ErrorCode::invalid_argument, "GID must not be empty");
}

RequestBlinding UserActor::begin_request(RandomSource& rng) const {
  const auto n = distinct_scalars(params_.ctx, 2, rng);
  return {n[0], n[1], blind_identity(params_.ctx, gid_, n[0]), blind_identity(params_.ctx, gid_, n[1]).element};
}

CredentialRequest UserActor::credential_request(const RequestBlinding& b, std::string attribute_id) const {
  return {std::move(attribute_id), b.blinded, b.blinded_dtk};
}

SearchRequest UserActor::search_request(const ConsentBundle& consent, const RequestBlinding& b,
                                        std::span<const CredentialGrant> grants) const {
  SearchRequest req{consent.search, {}, b.blinded};
  for (const auto& g : grants) req.credentials.push_back(g.credential);
  return req;
}

DecryptionTokenSet UserActor::decryption_tokens(const ConsentBundle& consent, const RequestBlinding& b,
                                                std::span<const CredentialGrant> grants) const {
  DecryptionTokenSet t{consent.decrypt_owner_token, consent.search.subset, {}, b.blinded_dtk};
  for (const auto& g : grants) t.aa_tokens.push_back(g.decrypt_token);
  return t;
}

Bytes UserActor::open(const SearchMatch& match, const DecryptionTokenSet& tokens) const {
  const PairingContext& ctx = params_.ctx;
  const KeyMask mask = recover_key(ctx, match.recovery, tokens, params_.pks);
  try {
    return decrypt_payload(derive_key(ctx, mask), match.payload);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::authentication_failure) throw;
    fail(ErrorCode::wrong_key, "recovered key does not open record " + std::to_string(match.record_id));
  }
}

// --- flows ------------------------------------------------------------------

RecordId owner_publish(const OwnerActor& owner, EscrowServer& server, ByteView plaintext,
                       std::span<const std::string> keywords, std::span<const std::string> policy,
                       std::uint32_t set_index, RandomSource& rng, Transcript* transcript) {
  const PairingContext& ctx = owner.parameters().ctx;
  DataRecord rec = as_role("owner", [&] { return owner.publish(plaintext, keywords, policy, set_index, rng); });
  record(transcript, wire::encode(ctx, rec));
  return as_role("server", [&] { return server.store(std::move(rec)); });
}

UserRequestResult user_request(const UserActor& user, const OwnerActor& owner,
                               std::span<const AuthorityActor* const> authorities, const EscrowServer& server,
                               std::string_view keyword, const Subset& subset, RandomSource& rng,
                               Transcript* transcript) {
  const PairingContext& ctx = owner.parameters().ctx;
  UserRequestResult result;

  const ConsentBundle consent = as_role("owner", [&] { return owner.consent(keyword, subset); });
  record(transcript, wire::encode(ctx, consent));

  const RequestBlinding blinding = user.begin_request(rng);
  std::vector<CredentialGrant> grants;
  for (const AuthorityActor* aa : authorities) {
    const CredentialRequest req = user.credential_request(blinding, aa->attribute_id());
    record(transcript, wire::encode(ctx, req));
    try {
      grants.push_back(aa->issue(user.gid(), req));
      record(transcript, wire::encode(ctx, grants.back()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unauthorized) throw Error(e.code(), "authority " + aa->attribute_id() + ": " + e.message());
      result.refused_by.push_back(aa->attribute_id());
    }
  }

  const SearchRequest search = user.search_request(consent, blinding, grants);
  record(transcript, wire::encode(ctx, search));
  const SearchResponse response = as_role("server", [&] { return server.search(search); });
  record(transcript, wire::encode(ctx, response));
  result.stats = response.stats;
  result.failures = response.failures;

  const DecryptionTokenSet tokens = user.decryption_tokens(consent, blinding, grants);
  for (const auto& match : response.matches) {
    try {
      result.plaintexts.emplace_back(match.record_id, user.open(match, tokens));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::wrong_key && e.code() != ErrorCode::incomplete_tokens) {
        throw Error(e.code(), "user: " + e.message());
      }
      result.failures.push_back({match.record_id, e.code()});
    }
  }
  return result;
}

RecordId owner_update(const OwnerActor& owner, EscrowServer& server, RecordId id, const Subset& subset,
                      const UpdateSpec& spec, RandomSource& rng, Transcript* transcript) {
  const PairingContext& ctx = owner.parameters().ctx;
  const auto current = server.fetch(id);
  if (!current) fail(ErrorCode::not_found, "server: no record " + std::to_string(id));
  const UpdateRequest req = as_role("owner", [&] { return owner.update_request(*current, subset, spec, rng); });
  record(transcript, wire::encode(ctx, req));
  return as_role("server", [&] { return server.reencrypt(req); });
}

// --- state files ------------------------------------------------------------

std::string encode_owner_state(const PairingContext& ctx, const OwnerSecrets& s,
                               std::span<const AuthorityPublicKeys> authorities) {
  json aas = json::array();
  for (const auto& a : authorities) {
    aas.push_back({{"attribute_id", a.attribute_id}, {"apk", jsonc::put(ctx, a.apk)}, {"apk_dtk", jsonc::put(ctx, a.apk_dtk)}});
  }
  return jsonc::envelope(ctx, "owner-state",
                         {{"sk", jsonc::put(ctx, s.sse.sk)},
                          {"sk_dtk", jsonc::put(ctx, s.dtk.sk_dtk)},
                          {"owner_id", s.owner_id},
                          {"update_id", s.update_id},
                          {"authorities", std::move(aas)}});
}

OwnerState decode_owner_state(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "owner-state");
  OwnerState out;
  out.secrets.sse.sk = jsonc::scalar(ctx, body, "sk");
  out.secrets.dtk.sk_dtk = jsonc::scalar(ctx, body, "sk_dtk");
  out.secrets.owner_id = jsonc::text(body, "owner_id");
  out.secrets.update_id = jsonc::text(body, "update_id");
  for (const auto& a : jsonc::field(body, "authorities")) {
    out.authorities.push_back({jsonc::text(a, "attribute_id"), jsonc::right(ctx, a, "apk"), jsonc::right(ctx, a, "apk_dtk")});
  }
  return out;
}

std::string encode_authority_state(const PairingContext& ctx, const AuthoritySecrets& s) {
  return jsonc::envelope(ctx, "authority-state",
                         {{"attribute_id", s.abe.attribute_id},
                          {"ask", jsonc::put(ctx, s.abe.ask)},
                          {"ask_dtk", jsonc::put(ctx, s.dtk.ask_dtk)},
                          {"members", s.members}});
}

AuthoritySecrets decode_authority_state(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "authority-state");
  const std::string id = jsonc::text(body, "attribute_id");
  AuthoritySecrets out;
  out.abe = attribute_key_pair(ctx, id, jsonc::scalar(ctx, body, "ask"));
  out.dtk = recovery_attribute_key_pair(ctx, id, jsonc::scalar(ctx, body, "ask_dtk"));
  const auto members = jsonc::strings(body, "members");
  out.members = {members.begin(), members.end()};
  return out;
}

std::string encode_user_state(const PairingContext& ctx, const UserState& s) {
  json body = {{"gid", s.gid}};
  if (s.pending) body["pending"] = {{"r", jsonc::put(ctx, s.pending->r)}, {"r_u", jsonc::put(ctx, s.pending->r_u)}};
  json grants = json::array();
  for (const auto& g : s.grants) grants.push_back(jsonc::json::parse(wire::encode(ctx, g)));
  body["grants"] = std::move(grants);
  return jsonc::envelope(ctx, "user-state", std::move(body));
}

UserState decode_user_state(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "user-state");
  UserState out;
  out.gid = jsonc::text(body, "gid");
  if (body.contains("pending")) {
    const json& p = body["pending"];
    RequestBlinding b;
    b.r = jsonc::scalar(ctx, p, "r");
    b.r_u = jsonc::scalar(ctx, p, "r_u");
    b.blinded = blind_identity(ctx, out.gid, b.r);
    b.blinded_dtk = blind_identity(ctx, out.gid, b.r_u).element;
    out.pending = b;
  }
  for (const auto& g : jsonc::field(body, "grants")) out.grants.push_back(wire::decode<CredentialGrant>(ctx, g.dump()));
  return out;
}

}  // namespace tlsaa
