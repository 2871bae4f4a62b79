#include "tlsaa/wire.hpp"

#include "json_codec.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa::wire {
namespace {

using jsonc::json;

template <class T, class F>
json array_of(const std::vector<T>& items, F&& fn) {
  json out = json::array();
  for (const auto& item : items) out.push_back(fn(item));
  return out;
}

template <class F>
auto list(const json& j, const char* key, F&& fn) {
  const json& v = jsonc::field(j, key);
  if (!v.is_array()) fail(ErrorCode::malformed, std::string("field '") + key + "' must be an array");
  std::vector<decltype(fn(v[0]))> out;
  for (const auto& item : v) out.push_back(fn(item));
  return out;
}

json b64(const PairingContext& ctx, const GroupElement& x) { return jsonc::put(ctx, x); }

GroupElement left_item(const PairingContext& ctx, const json& item) {
  if (!item.is_string()) fail(ErrorCode::malformed, "element list must hold strings");
  return ctx.decode_group(Side::left, base64url_decode(item.get<std::string>()));
}
GroupElement right_item(const PairingContext& ctx, const json& item) {
  if (!item.is_string()) fail(ErrorCode::malformed, "element list must hold strings");
  return ctx.decode_group(Side::right, base64url_decode(item.get<std::string>()));
}
GtElement gt_item(const PairingContext& ctx, const json& item) {
  if (!item.is_string()) fail(ErrorCode::malformed, "element list must hold strings");
  return ctx.decode_gt(base64url_decode(item.get<std::string>()));
}

ErrorCode error_code_named(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(kLastErrorCode); ++c) {
    if (to_string(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  fail(ErrorCode::malformed, "unknown error code '" + std::string(name) + "'");
}

// --- layers -------------------------------------------------------------

json to_json(const PairingContext& ctx, const SseRecordElements& e) {
  return {{"stk_transferor", b64(ctx, e.stk_transferor)},
          {"kw_modifier", b64(ctx, e.kw_modifier)},
          {"tagged_keywords", array_of(e.tagged_keywords, [&](const GtElement& t) { return jsonc::put(ctx, t); })},
          {"update_keyword", jsonc::put(ctx, e.update_keyword)}};
}

SseRecordElements sse_from(const PairingContext& ctx, const json& j) {
  SseRecordElements e;
  e.stk_transferor = jsonc::right(ctx, j, "stk_transferor");
  e.kw_modifier = jsonc::right(ctx, j, "kw_modifier");
  e.tagged_keywords = list(j, "tagged_keywords", [&](const json& i) { return gt_item(ctx, i); });
  e.update_keyword = jsonc::gt(ctx, j, "update_keyword");
  return e;
}

json to_json(const PairingContext& ctx, const AccessPolicyElements& e) {
  auto el = [&](const GroupElement& x) { return b64(ctx, x); };
  return {{"attrs", e.attrs},
          {"ac_transferors", array_of(e.ac_transferors, el)},
          {"plcy_modifiers", array_of(e.plcy_modifiers, el)},
          {"plcy", jsonc::put(ctx, e.plcy)}};
}

AccessPolicyElements abe_from(const PairingContext& ctx, const json& j) {
  AccessPolicyElements e;
  e.attrs = jsonc::strings(j, "attrs");
  e.ac_transferors = list(j, "ac_transferors", [&](const json& i) { return right_item(ctx, i); });
  e.plcy_modifiers = list(j, "plcy_modifiers", [&](const json& i) { return right_item(ctx, i); });
  e.plcy = jsonc::gt(ctx, j, "plcy");
  return e;
}

json to_json(const PairingContext& ctx, const KeyRecoveryElements& e) {
  auto el = [&](const GroupElement& x) { return b64(ctx, x); };
  return {{"dtk_transferor", b64(ctx, e.dtk_transferor)},
          {"dtk_owner_modifier", b64(ctx, e.dtk_owner_modifier)},
          {"attrs", e.attrs},
          {"dtk_aa_transferors", array_of(e.dtk_aa_transferors, el)},
          {"dtk_aa_modifiers", array_of(e.dtk_aa_modifiers, el)},
          {"wrapped_key", jsonc::put(ctx, e.wrapped_key)}};
}

KeyRecoveryElements recovery_from(const PairingContext& ctx, const json& j) {
  KeyRecoveryElements e;
  e.dtk_transferor = jsonc::right(ctx, j, "dtk_transferor");
  e.dtk_owner_modifier = jsonc::right(ctx, j, "dtk_owner_modifier");
  e.attrs = jsonc::strings(j, "attrs");
  e.dtk_aa_transferors = list(j, "dtk_aa_transferors", [&](const json& i) { return right_item(ctx, i); });
  e.dtk_aa_modifiers = list(j, "dtk_aa_modifiers", [&](const json& i) { return right_item(ctx, i); });
  e.wrapped_key = jsonc::gt(ctx, j, "wrapped_key");
  return e;
}

json to_json(const PayloadCiphertext& p) { return jsonc::put_bytes(encode_payload(p)); }
PayloadCiphertext payload_from(const json& j, const char* key) { return decode_payload(jsonc::bytes(j, key)); }

json to_json(const PairingContext& ctx, const SearchToken& t) {
  return {{"token", b64(ctx, t.token)}, {"subset", jsonc::put(t.subset)}};
}

SearchToken token_from(const PairingContext& ctx, const json& j) {
  return {jsonc::left(ctx, j, "token"), jsonc::subset(j, "subset")};
}

json to_json(const PairingContext& ctx, const AttributeCredential& c) {
  return {{"attribute_id", c.attribute_id}, {"credential", b64(ctx, c.credential)}};
}

AttributeCredential credential_from(const PairingContext& ctx, const json& j) {
  return {jsonc::text(j, "attribute_id"), jsonc::left(ctx, j, "credential")};
}

json to_json(const PairingContext& ctx, const DecryptToken& t) {
  return {{"attribute_id", t.attribute_id}, {"token", b64(ctx, t.token)}};
}

DecryptToken decrypt_token_from(const PairingContext& ctx, const json& j) {
  return {jsonc::text(j, "attribute_id"), jsonc::left(ctx, j, "token")};
}

json record_json(const PairingContext& ctx, const DataRecord& rec) {
  return {{"record_id", rec.record_id},
          {"set_index", rec.set_index},
          {"sse", to_json(ctx, rec.sse)},
          {"abe", to_json(ctx, rec.abe)},
          {"recovery", to_json(ctx, rec.recovery)},
          {"payload", to_json(rec.payload)}};
}

DataRecord record_from(const PairingContext& ctx, const json& j) {
  DataRecord rec;
  rec.record_id = jsonc::number(j, "record_id");
  const std::uint64_t set = jsonc::number(j, "set_index");
  if (set > UINT32_MAX) fail(ErrorCode::malformed, "set index out of range");
  rec.set_index = static_cast<std::uint32_t>(set);
  rec.sse = sse_from(ctx, jsonc::field(j, "sse"));
  rec.abe = abe_from(ctx, jsonc::field(j, "abe"));
  rec.recovery = recovery_from(ctx, jsonc::field(j, "recovery"));
  rec.payload = payload_from(j, "payload");
  return rec;
}

}  // namespace

std::string message_type(std::string_view text) { return jsonc::text(jsonc::parse_envelope(text), "type"); }

PairingContext message_context(std::string_view text) {
  return PairingContext::from_header(jsonc::bytes(jsonc::parse_envelope(text), "params"));
}

std::string pretty(std::string_view text) { return jsonc::parse_envelope(text).dump(2) + "\n"; }

std::string encode(const ServerParameters& params) {
  return jsonc::envelope(params.ctx, "server-parameters",
                         {{"pks", array_of(params.pks.keys, [&](const GroupElement& x) { return b64(params.ctx, x); })}});
}

ServerParameters decode_server_parameters(std::string_view text) {
  auto [ctx, body] = jsonc::open_any(text, "server-parameters");
  SetPublicKeys pks;
  pks.keys = list(body, "pks", [&](const json& i) { return left_item(ctx, i); });
  if (pks.keys.empty()) fail(ErrorCode::malformed, "server parameters list no data sets");
  return {std::move(ctx), std::move(pks)};
}

std::string encode(const PairingContext& ctx, const DataRecord& rec) {
  return jsonc::envelope(ctx, "record", record_json(ctx, rec));
}

template <>
DataRecord decode<DataRecord>(const PairingContext& ctx, std::string_view text) {
  return record_from(ctx, jsonc::open(ctx, text, "record"));
}

std::string encode(const PairingContext& ctx, const SearchRequest& req) {
  return jsonc::envelope(
      ctx, "search-request",
      {{"token", to_json(ctx, req.token)},
       {"credentials", array_of(req.credentials, [&](const AttributeCredential& c) { return to_json(ctx, c); })},
       {"blinded", b64(ctx, req.blinded.element)}});
}

template <>
SearchRequest decode<SearchRequest>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "search-request");
  SearchRequest req;
  req.token = token_from(ctx, jsonc::field(body, "token"));
  req.credentials = list(body, "credentials", [&](const json& i) { return credential_from(ctx, i); });
  req.blinded = BlindedIdentity{jsonc::left(ctx, body, "blinded")};
  return req;
}

std::string encode(const PairingContext& ctx, const SearchResponse& resp) {
  json matches = json::array();
  for (const auto& m : resp.matches) {
    matches.push_back({{"record_id", m.record_id},
                       {"policy", m.policy},
                       {"recovery", to_json(ctx, m.recovery)},
                       {"payload", to_json(m.payload)},
                       {"subset", jsonc::put(m.subset)}});
  }
  json failures = json::array();
  for (const auto& f : resp.failures) failures.push_back({{"record_id", f.record_id}, {"code", to_string(f.code)}});
  return jsonc::envelope(ctx, "search-response",
                         {{"matches", std::move(matches)},
                          {"failures", std::move(failures)},
                          {"stats",
                           {{"candidates", resp.stats.candidates},
                            {"sse_matches", resp.stats.sse_matches},
                            {"abe_verifications", resp.stats.abe_verifications}}}});
}

template <>
SearchResponse decode<SearchResponse>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "search-response");
  SearchResponse resp;
  resp.matches = list(body, "matches", [&](const json& m) {
    return SearchMatch{jsonc::number(m, "record_id"), jsonc::strings(m, "policy"),
                       recovery_from(ctx, jsonc::field(m, "recovery")), payload_from(m, "payload"),
                       jsonc::subset(m, "subset")};
  });
  resp.failures = list(body, "failures", [&](const json& f) {
    return RecordFailure{jsonc::number(f, "record_id"), error_code_named(jsonc::text(f, "code"))};
  });
  const json& stats = jsonc::field(body, "stats");
  resp.stats.candidates = jsonc::number(stats, "candidates");
  resp.stats.sse_matches = jsonc::number(stats, "sse_matches");
  resp.stats.abe_verifications = jsonc::number(stats, "abe_verifications");
  return resp;
}

std::string encode(const PairingContext& ctx, const UpdateRequest& req) {
  json body = {{"record_id", req.record_id}, {"rtk", to_json(ctx, req.rtk)}};
  if (req.sse) body["sse"] = to_json(ctx, *req.sse);
  if (req.abe) body["abe"] = to_json(ctx, *req.abe);
  if (req.recovery) body["recovery"] = to_json(ctx, *req.recovery);
  if (req.payload) body["payload"] = to_json(*req.payload);
  return jsonc::envelope(ctx, "update-request", std::move(body));
}

template <>
UpdateRequest decode<UpdateRequest>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "update-request");
  UpdateRequest req;
  req.record_id = jsonc::number(body, "record_id");
  req.rtk = token_from(ctx, jsonc::field(body, "rtk"));
  if (body.contains("sse")) req.sse = sse_from(ctx, body["sse"]);
  if (body.contains("abe")) req.abe = abe_from(ctx, body["abe"]);
  if (body.contains("recovery")) req.recovery = recovery_from(ctx, body["recovery"]);
  if (body.contains("payload")) req.payload = payload_from(body, "payload");
  return req;
}

std::string encode(const PairingContext& ctx, const ConsentBundle& bundle) {
  return jsonc::envelope(ctx, "consent",
                         {{"search", to_json(ctx, bundle.search)},
                          {"decrypt_owner_token", b64(ctx, bundle.decrypt_owner_token)}});
}

template <>
ConsentBundle decode<ConsentBundle>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "consent");
  return {token_from(ctx, jsonc::field(body, "search")), jsonc::left(ctx, body, "decrypt_owner_token")};
}

std::string encode(const PairingContext& ctx, const CredentialRequest& req) {
  return jsonc::envelope(ctx, "credential-request",
                         {{"attribute_id", req.attribute_id},
                          {"blinded", b64(ctx, req.blinded.element)},
                          {"blinded_dtk", b64(ctx, req.blinded_dtk)}});
}

template <>
CredentialRequest decode<CredentialRequest>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "credential-request");
  return {jsonc::text(body, "attribute_id"), BlindedIdentity{jsonc::left(ctx, body, "blinded")},
          jsonc::left(ctx, body, "blinded_dtk")};
}

std::string encode(const PairingContext& ctx, const CredentialGrant& grant) {
  return jsonc::envelope(ctx, "credential-grant",
                         {{"credential", to_json(ctx, grant.credential)},
                          {"decrypt_token", to_json(ctx, grant.decrypt_token)}});
}

template <>
CredentialGrant decode<CredentialGrant>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "credential-grant");
  return {credential_from(ctx, jsonc::field(body, "credential")),
          decrypt_token_from(ctx, jsonc::field(body, "decrypt_token"))};
}

std::string encode(const PairingContext& ctx, const AuthorityPublicKeys& keys) {
  return jsonc::envelope(ctx, "authority-public-keys",
                         {{"attribute_id", keys.attribute_id},
                          {"apk", b64(ctx, keys.apk)},
                          {"apk_dtk", b64(ctx, keys.apk_dtk)}});
}

template <>
AuthorityPublicKeys decode<AuthorityPublicKeys>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "authority-public-keys");
  return {jsonc::text(body, "attribute_id"), jsonc::right(ctx, body, "apk"), jsonc::right(ctx, body, "apk_dtk")};
}

std::string encode(const PairingContext& ctx, const DecryptionTokenSet& tokens) {
  return jsonc::envelope(
      ctx, "decryption-tokens",
      {{"owner_token", b64(ctx, tokens.owner_token)},
       {"subset", jsonc::put(tokens.subset)},
       {"aa_tokens", array_of(tokens.aa_tokens, [&](const DecryptToken& t) { return to_json(ctx, t); })},
       {"blinded_r", b64(ctx, tokens.blinded_r)}});
}

template <>
DecryptionTokenSet decode<DecryptionTokenSet>(const PairingContext& ctx, std::string_view text) {
  const json body = jsonc::open(ctx, text, "decryption-tokens");
  DecryptionTokenSet t;
  t.owner_token = jsonc::left(ctx, body, "owner_token");
  t.subset = jsonc::subset(body, "subset");
  t.aa_tokens = list(body, "aa_tokens", [&](const json& i) { return decrypt_token_from(ctx, i); });
  t.blinded_r = jsonc::left(ctx, body, "blinded_r");
  return t;
}

}  // namespace tlsaa::wire
