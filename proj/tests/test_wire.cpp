#include <functional>

#include <json.hpp>

#include "doctest.h"
#include "support/helpers.hpp"
#include "support/world.hpp"
#include "tlsaa/wire.hpp"

using namespace tlsaa;
using testing::World;
using nlohmann::json;

namespace {

// Everything one request produces, captured from a live deployment.
struct Exchange {
  explicit Exchange(PairingContext ctx) : w(std::move(ctx), 3, "wire", {"A1", "A2"}) {
    id = w.publish("wire payload", {"bp", "bq"}, {"A1", "A2"}, 2);
    consent = w.owner.consent("bp", Subset{2, 3});
    blinding = w.user.begin_request(w.rng);
    for (const auto& aa : w.authorities) {
      creq.push_back(w.user.credential_request(blinding, aa->attribute_id()));
      grants.push_back(aa->issue(w.user.gid(), creq.back()));
    }
    sreq = w.user.search_request(consent, blinding, grants);
    tokens = w.user.decryption_tokens(consent, blinding, grants);
    resp = w.server->search(sreq);
    UpdateSpec spec;
    spec.keywords = std::vector<std::string>{"new"};
    spec.plaintext = Bytes{1, 2, 3};
    ureq = w.owner.update_request(*w.server->fetch(id), Subset{2}, spec, w.rng);
  }

  World w;
  RecordId id = 0;
  ConsentBundle consent;
  RequestBlinding blinding;
  std::vector<CredentialRequest> creq;
  std::vector<CredentialGrant> grants;
  SearchRequest sreq;
  DecryptionTokenSet tokens;
  SearchResponse resp;
  UpdateRequest ureq;
};

template <class T>
void check_round_trip(const PairingContext& ctx, const T& value, const std::string& type) {
  const std::string text = wire::encode(ctx, value);
  CAPTURE(type);
  CHECK(wire::message_type(text) == type);
  CHECK(wire::message_context(text).same_parameters(ctx));
  const T back = wire::decode<T>(ctx, text);
  CHECK(wire::encode(ctx, back) == text);
  CHECK(json::parse(wire::pretty(text)) == json::parse(text));
}

std::string with_body(const std::string& text, const std::function<void(json&)>& edit) {
  json j = json::parse(text);
  edit(j);
  return j.dump();
}

void round_trips(const PairingContext& ctx) {
  Exchange x(ctx);
  REQUIRE(x.resp.matches.size() == 1);
  check_round_trip(ctx, *x.w.server->fetch(x.id), "record");
  check_round_trip(ctx, x.sreq, "search-request");
  check_round_trip(ctx, x.resp, "search-response");
  check_round_trip(ctx, x.ureq, "update-request");
  check_round_trip(ctx, x.consent, "consent");
  check_round_trip(ctx, x.creq[0], "credential-request");
  check_round_trip(ctx, x.grants[1], "credential-grant");
  check_round_trip(ctx, x.w.authorities[0]->public_keys(), "authority-public-keys");
  check_round_trip(ctx, x.tokens, "decryption-tokens");

  const std::string ptext = wire::encode(x.w.params);
  CHECK(wire::message_type(ptext) == "server-parameters");
  const ServerParameters p = wire::decode_server_parameters(ptext);
  CHECK(p.ctx.same_parameters(ctx));
  CHECK(wire::encode(p) == ptext);

  // Decoded messages are still fully functional.
  const auto sreq = wire::decode<SearchRequest>(ctx, wire::encode(ctx, x.sreq));
  const auto resp = wire::decode<SearchResponse>(ctx, wire::encode(ctx, x.w.server->search(sreq)));
  const auto tokens = wire::decode<DecryptionTokenSet>(ctx, wire::encode(ctx, x.tokens));
  REQUIRE(resp.matches.size() == 1);
  CHECK(testing::as_string(x.w.user.open(resp.matches[0], tokens)) == "wire payload");
  const auto ureq = wire::decode<UpdateRequest>(ctx, wire::encode(ctx, x.ureq));
  CHECK(x.w.server->reencrypt(ureq) == x.id);
  CHECK(x.w.request("new", Subset{2}).plaintexts.at(0).second == Bytes{1, 2, 3});
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("every message round-trips on the oracle backend") {
  round_trips(PairingContext::oracle(testing::kPropertyQ));
}

TEST_CASE("every message round-trips on the curve backend") { round_trips(PairingContext::curve()); }

TEST_CASE("partial update requests keep absent layers absent") {
  Exchange x(PairingContext::oracle(testing::kPropertyQ));
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"k2"};
  const auto req = x.w.owner.update_request(*x.w.server->fetch(x.id), Subset{2}, spec, x.w.rng);
  const auto back = wire::decode<UpdateRequest>(x.w.ctx(), wire::encode(x.w.ctx(), req));
  CHECK(back.sse.has_value());
  CHECK_FALSE(back.abe.has_value());
  CHECK_FALSE(back.recovery.has_value());
  CHECK_FALSE(back.payload.has_value());
  CHECK(back.rtk.subset == Subset{2});
}

TEST_CASE("search failures keep their codes") {
  World w(PairingContext::oracle(testing::kPropertyQ), 1, "failures");
  const RecordId id = w.publish("p", {"bp"}, {"A1", "A2"}, 1);
  const auto resp = w.server->search(w.search_request("bp", Subset{1}, 1));
  const auto back = wire::decode<SearchResponse>(w.ctx(), wire::encode(w.ctx(), resp));
  CHECK(back.failures == std::vector<RecordFailure>{{id, ErrorCode::incomplete_policy}});
  CHECK(back.stats == resp.stats);
}

TEST_CASE("messages from other parameters are refused") {
  Exchange x(PairingContext::oracle(testing::kPropertyQ));
  const auto other = PairingContext::oracle(101);
  const auto curve = PairingContext::curve();
  const std::string text = wire::encode(x.w.ctx(), x.sreq);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(other, text), ErrorCode::backend_mismatch);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(curve, text), ErrorCode::backend_mismatch);

  const Bytes rec = encode_record(x.w.ctx(), *x.w.server->fetch(x.id));
  CHECK_ERROR_CODE(decode_record(curve, rec), ErrorCode::backend_mismatch);
  CHECK_ERROR_CODE(decode_record(x.w.ctx(), ByteView(rec).first(rec.size() - 1)), ErrorCode::malformed);
}

TEST_CASE("malformed messages are refused") {
  Exchange x(PairingContext::oracle(testing::kPropertyQ));
  const auto& ctx = x.w.ctx();
  const std::string text = wire::encode(ctx, x.sreq);

  CHECK_ERROR_CODE(wire::decode<ConsentBundle>(ctx, text), ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, text.substr(0, text.size() / 2)), ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, "not json"), ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::message_type("[]"), ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, with_body(text, [](json& j) { j["format"] = "other"; })),
                   ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, with_body(text, [](json& j) { j["version"] = 2; })),
                   ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, with_body(text, [](json& j) { j["params"] = "!!"; })),
                   ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, with_body(text, [](json& j) { j["body"].erase("blinded"); })),
                   ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(ctx, with_body(text, [](json& j) { j["body"]["blinded"] = 5; })),
                   ErrorCode::malformed);

  // A right-side element where a left one belongs, and bytes that are no
  // element at all. Oracle encodings carry no side, so this runs on the curve.
  const auto curve = PairingContext::curve();
  const Exchange cx(curve);
  const std::string ctext = wire::encode(curve, cx.sreq);
  const json apk = json::parse(wire::encode(curve, cx.w.authorities[0]->public_keys()))["body"]["apk"];
  CHECK_ERROR_CODE(wire::decode<SearchRequest>(curve, with_body(ctext, [&](json& j) { j["body"]["blinded"] = apk; })),
                   ErrorCode::malformed);
  CHECK_ERROR_CODE(wire::decode<ConsentBundle>(curve, with_body(wire::encode(curve, cx.consent), [](json& j) {
                     j["body"]["decrypt_owner_token"] = "AAAA";
                   })),
                   ErrorCode::malformed);
  const std::string resp = wire::encode(ctx, x.resp);
  CHECK_ERROR_CODE(wire::decode<SearchResponse>(ctx, with_body(resp, [](json& j) {
                     j["body"]["failures"] = json::array({{{"record_id", 1}, {"code", "NoSuchCode"}}});
                   })),
                   ErrorCode::malformed);
}

TEST_CASE("actor state files round-trip and stay separate") {
  Exchange x(PairingContext::oracle(testing::kPropertyQ));
  const auto& ctx = x.w.ctx();
  std::vector<AuthorityPublicKeys> aas;
  for (const auto& [attr, keys] : x.w.owner.authorities()) aas.push_back(keys);

  const std::string owner = encode_owner_state(ctx, x.w.owner.secrets(), aas);
  const OwnerState os = decode_owner_state(ctx, owner);
  CHECK(os.secrets.owner_id == "owner-7f3a");
  CHECK(os.secrets.sse.sk == x.w.owner.secrets().sse.sk);
  CHECK(os.secrets.dtk.sk_dtk == x.w.owner.secrets().dtk.sk_dtk);
  CHECK(os.authorities.size() == 2);
  CHECK(encode_owner_state(ctx, os.secrets, os.authorities) == owner);

  const std::string aa = encode_authority_state(ctx, x.w.authorities[0]->secrets());
  const AuthoritySecrets as = decode_authority_state(ctx, aa);
  CHECK(as.abe.ask == x.w.authorities[0]->secrets().abe.ask);
  CHECK(as.members == std::set<std::string>{"gid-alice"});
  CHECK(encode_authority_state(ctx, as) == aa);

  UserState us{x.w.user.gid(), x.blinding, x.grants};
  const std::string user = encode_user_state(ctx, us);
  const UserState back = decode_user_state(ctx, user);
  REQUIRE(back.pending);
  CHECK(back.pending->r == x.blinding.r);
  CHECK(back.grants.size() == 2);
  CHECK(encode_user_state(ctx, back) == user);

  CHECK_ERROR_CODE(decode_owner_state(ctx, aa), ErrorCode::malformed);
  CHECK_ERROR_CODE(decode_user_state(ctx, owner), ErrorCode::malformed);

  // No state file carries another role's secret scalar.
  const auto has = [&](const std::string& text, const Scalar& s) {
    return text.find(json(base64url_encode(ctx.encode(s))).dump()) != std::string::npos;
  };
  CHECK(has(owner, x.w.owner.secrets().sse.sk));
  for (const auto* text : {&aa, &user}) {
    CHECK_FALSE(has(*text, x.w.owner.secrets().sse.sk));
    CHECK_FALSE(has(*text, x.w.owner.secrets().dtk.sk_dtk));
  }
  for (const auto* text : {&owner, &user}) {
    CHECK_FALSE(has(*text, x.w.authorities[0]->secrets().abe.ask));
    CHECK_FALSE(has(*text, x.w.authorities[0]->secrets().dtk.ask_dtk));
  }
  CHECK(owner.find("gid-alice") == std::string::npos);
}

}  // TEST_SUITE
