#include <algorithm>
#include <random>

#include <json.hpp>

#include "doctest.h"
#include "support/helpers.hpp"
#include "support/world.hpp"
#include "tlsaa/wire.hpp"

using namespace tlsaa;
using testing::World;
using nlohmann::json;

namespace {

struct PlainRecord {
  RecordId id;
  std::set<std::string> keywords;
  std::set<std::string> policy;
  std::uint32_t set;
  std::string text;
};

// Draws a random deployment and query, runs the full flow and compares it
// against the plain-set reading of the access rule.
void run_scenario(const PairingContext& ctx, std::uint64_t seed) {
  std::mt19937_64 pick(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(pick); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(pick); };

  const std::size_t n = uniform(1, 8);
  const std::size_t k = uniform(1, 4);
  std::vector<std::string> attrs;
  for (std::size_t i = 1; i <= k; ++i) attrs.push_back("A" + std::to_string(i));
  World w(ctx, n, "scenario-" + std::to_string(seed), attrs);

  std::set<std::string> held;
  std::vector<std::string> refused;
  for (std::size_t i = 0; i < k; ++i) {
    if (coin(0.7)) {
      held.insert(attrs[i]);
    } else {
      w.revoke(i);
      refused.push_back(attrs[i]);
    }
  }

  const std::vector<std::string> pool{"w0", "w1", "w2", "w3", "w4"};
  std::vector<PlainRecord> db;
  for (std::size_t j = 0, count = uniform(1, 6); j < count; ++j) {
    std::set<std::string> kws, pol;
    while (kws.size() < uniform(1, 3)) kws.insert(pool[uniform(0, pool.size() - 1)]);
    while (pol.empty())
      for (const auto& a : attrs)
        if (coin(0.5)) pol.insert(a);
    const auto set = static_cast<std::uint32_t>(uniform(1, n));
    const std::string text = "record " + std::to_string(seed) + "/" + std::to_string(j);
    const RecordId id = w.publish(text, {kws.begin(), kws.end()}, {pol.begin(), pol.end()}, set);
    db.push_back({id, kws, pol, set, text});
  }

  const std::string keyword = pool[uniform(0, pool.size() - 1)];
  std::vector<std::uint32_t> members;
  while (members.empty())
    for (std::uint32_t i = 1; i <= n; ++i)
      if (coin(0.5)) members.push_back(i);
  const Subset subset(members);

  std::vector<std::pair<RecordId, Bytes>> expected;
  std::vector<RecordFailure> expected_failures;
  SearchStats stats;
  for (const auto& r : db) {
    if (!subset.contains(r.set)) continue;
    ++stats.candidates;
    if (!r.keywords.count(keyword)) continue;
    ++stats.sse_matches;
    if (std::includes(held.begin(), held.end(), r.policy.begin(), r.policy.end())) {
      ++stats.abe_verifications;
      expected.emplace_back(r.id, Bytes(r.text.begin(), r.text.end()));
    } else {
      expected_failures.push_back({r.id, ErrorCode::incomplete_policy});
    }
  }

  const auto result = w.request(keyword, subset);
  CAPTURE(seed);
  CHECK(result.plaintexts == expected);
  CHECK(result.failures == expected_failures);
  CHECK(result.refused_by == refused);
  CHECK(result.stats == stats);
}

std::vector<json> messages_of_type(const Transcript& t, const std::string& type) {
  std::vector<json> out;
  for (const auto& m : t.messages)
    if (wire::message_type(m) == type) out.push_back(json::parse(m)["body"]);
  return out;
}

SearchMatch match_for(const DataRecord& r, const Subset& subset) {
  return {r.record_id, r.abe.attrs, r.recovery, r.payload, subset};
}

PairingContext property_ctx() { return PairingContext::oracle(testing::kPropertyQ); }

}  // namespace

TEST_SUITE("actors") {

TEST_CASE("randomized end-to-end scenarios on the oracle backend") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) run_scenario(property_ctx(), seed);
}

TEST_CASE("randomized end-to-end scenarios on the curve backend") {
  const auto curve = PairingContext::curve();
  for (std::uint64_t seed = 1000; seed < 1004; ++seed) run_scenario(curve, seed);
}

TEST_CASE("a missing attribute yields no data") {
  World w(property_ctx(), 2, "missing-attr", {"A1", "A2"});
  w.revoke(1);
  const RecordId id = w.publish("guarded", {"bp"}, {"A1", "A2"}, 1);
  const auto result = w.request("bp", Subset{1, 2});
  CHECK(result.plaintexts.empty());
  CHECK(result.refused_by == std::vector<std::string>{"A2"});
  CHECK(result.failures == std::vector<RecordFailure>{{id, ErrorCode::incomplete_policy}});

  // A user who is on no roster gets nothing either.
  UserActor mallory(w.params, "gid-mallory");
  const auto handles = w.aa_handles();
  const auto refused = user_request(mallory, w.owner, handles, *w.server, "bp", Subset{1}, w.rng);
  CHECK(refused.plaintexts.empty());
  CHECK(refused.refused_by == std::vector<std::string>{"A1", "A2"});
}

TEST_CASE("credentials of two users do not combine") {
  World w(property_ctx(), 1, "collusion", {"A1", "A2"});
  const RecordId id = w.publish("joint", {"bp"}, {"A1", "A2"}, 1);
  w.revoke(1);
  auto a2 = w.authorities[1]->secrets();
  a2.members = {"gid-bob"};
  w.authorities[1] = std::make_unique<AuthorityActor>(w.ctx(), a2);
  UserActor bob(w.params, "gid-bob");

  const auto consent = w.owner.consent("bp", Subset{1});
  const auto ba = w.user.begin_request(w.rng);
  const auto bb = bob.begin_request(w.rng);
  const auto ga = w.authorities[0]->issue(w.user.gid(), w.user.credential_request(ba, "A1"));
  const auto gb = w.authorities[1]->issue(bob.gid(), bob.credential_request(bb, "A2"));
  CHECK_ERROR_CODE(w.authorities[1]->issue(w.user.gid(), w.user.credential_request(ba, "A2")), ErrorCode::unauthorized);

  const std::vector<CredentialGrant> pooled{ga, gb};
  for (const auto* who : {&ba, &bb}) {
    const auto resp = w.server->search(w.user.search_request(consent, *who, pooled));
    CHECK(resp.matches.empty());
    CHECK(resp.stats.sse_matches == 1);
    const auto tokens = w.user.decryption_tokens(consent, *who, pooled);
    CHECK_ERROR_CODE(w.user.open(match_for(*w.server->fetch(id), Subset{1}), tokens), ErrorCode::wrong_key);
  }
}

TEST_CASE("every request uses a fresh blinded identity") {
  World w(property_ctx(), 2, "fresh", {"A1", "A2"});
  w.publish("x", {"bp"}, {"A1"}, 1);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (int i = 0; i < 5; ++i) {
    Transcript t;
    const auto handles = w.aa_handles();
    user_request(w.user, w.owner, handles, *w.server, "bp", Subset{1}, w.rng, &t);
    std::set<std::string> this_request;
    for (const auto& body : messages_of_type(t, "credential-request")) {
      this_request.insert(body["blinded"].get<std::string>());
      this_request.insert(body["blinded_dtk"].get<std::string>());
    }
    const auto search = messages_of_type(t, "search-request");
    REQUIRE(search.size() == 1);
    CHECK(this_request.count(search[0]["blinded"].get<std::string>()) == 1);
    CHECK(this_request.size() == 2);  // one pair per request, shared by its authorities
    total += this_request.size();
    seen.insert(this_request.begin(), this_request.end());
  }
  CHECK(seen.size() == total);
}

TEST_CASE("messages carry no identity or keyword in the clear") {
  World w(property_ctx(), 2, "clear");
  Transcript t;
  const RecordId id = w.publish("x", {"kw-pediatrics"}, {"A1"}, 1);
  owner_publish(w.owner, *w.server, as_bytes("y"), std::vector<std::string>{"kw-pediatrics"},
                std::vector<std::string>{"A2"}, 2, w.rng, &t);
  const auto handles = w.aa_handles();
  user_request(w.user, w.owner, handles, *w.server, "kw-pediatrics", Subset{1, 2}, w.rng, &t);
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"kw-neurology"};
  owner_update(w.owner, *w.server, id, Subset{1}, spec, w.rng, &t);
  CHECK(t.messages.size() == 9);
  for (const auto& m : t.messages) {
    for (const std::string& secret : {std::string("gid-alice"), std::string("owner-7f3a"), std::string("kw-"),
                                      w.owner.secrets().update_id}) {
      CHECK(m.find(secret) == std::string::npos);
    }
  }
}

TEST_CASE("flows replay deterministically from a seed") {
  auto run = [](std::string_view seed) {
    World w(property_ctx(), 3, seed, {"A1", "A2", "A3"});
    Transcript t;
    const RecordId id = owner_publish(w.owner, *w.server, as_bytes("replay"), std::vector<std::string>{"bp", "bq"},
                                      std::vector<std::string>{"A1", "A3"}, 2, w.rng, &t);
    const auto handles = w.aa_handles();
    user_request(w.user, w.owner, handles, *w.server, "bq", Subset{1, 2}, w.rng, &t);
    UpdateSpec spec;
    spec.plaintext = Bytes{'z'};
    owner_update(w.owner, *w.server, id, Subset{2}, spec, w.rng, &t);
    return t.messages;
  };
  const auto a = run("replay");
  CHECK(a == run("replay"));
  CHECK(a != run("replay-2"));
}

TEST_CASE("keyword rotation retires the old token") {
  World w(property_ctx(), 2, "rotate");
  const RecordId id = w.publish("rotating", {"old"}, {"A1"}, 2);
  const auto stale = w.search_request("old", Subset{2});
  CHECK(w.server->search(stale).matches.size() == 1);

  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"new"};
  CHECK(owner_update(w.owner, *w.server, id, Subset{2}, spec, w.rng) == id);
  CHECK(w.server->search(stale).matches.empty());
  CHECK(w.request("old", Subset{2}).plaintexts.empty());
  const auto fresh = w.request("new", Subset{2});
  REQUIRE(fresh.plaintexts.size() == 1);
  CHECK(testing::as_string(fresh.plaintexts[0].second) == "rotating");
}

TEST_CASE("only the record owner can update") {
  World w(property_ctx(), 2, "intruder");
  const RecordId id = w.publish("mine", {"bp"}, {"A1"}, 1);
  const Bytes before = encode_record(w.ctx(), *w.server->fetch(id));
  // Same public label, different keys.
  OwnerActor intruder(w.params, w.owner.secrets().owner_id, w.rng);
  for (const auto& [attr, keys] : w.owner.authorities()) intruder.add_authority(keys);
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"bp"};
  spec.plaintext = Bytes{'x'};
  try {
    owner_update(intruder, *w.server, id, Subset{1}, spec, w.rng);
    FAIL("update accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::update_rejected);
    CHECK(std::string(e.what()).find("server: ") != std::string::npos);
  }
  CHECK(encode_record(w.ctx(), *w.server->fetch(id)) == before);
  CHECK_ERROR_CODE(owner_update(w.owner, *w.server, 42, Subset{1}, spec, w.rng), ErrorCode::not_found);
}

TEST_CASE("a no-op update refreshes every element") {
  World w(property_ctx(), 2, "noop", {"A1", "A2"});
  const RecordId id = w.publish("same", {"bp", "bq"}, {"A1", "A2"}, 1);
  const DataRecord before = *w.server->fetch(id);
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"bp", "bq"};
  spec.plaintext = Bytes{'s', 'a', 'm', 'e'};
  spec.policy = std::vector<std::string>{"A1", "A2"};
  owner_update(w.owner, *w.server, id, Subset{1}, spec, w.rng);
  const DataRecord after = *w.server->fetch(id);
  CHECK_FALSE(testing::share_elements(w.ctx(), before, after));
  CHECK(encode_payload(before.payload) != encode_payload(after.payload));
  for (const char* kw : {"bp", "bq"}) CHECK(testing::as_string(w.request(kw, Subset{1}).plaintexts.at(0).second) == "same");
}

TEST_CASE("policy updates change who can read") {
  World w(property_ctx(), 1, "policy", {"A1", "A2"});
  w.revoke(1);
  const RecordId id = w.publish("open to A1", {"bp"}, {"A1"}, 1);
  CHECK(w.request("bp", Subset{1}).plaintexts.size() == 1);

  UpdateSpec only_policy;
  only_policy.policy = std::vector<std::string>{"A1", "A2"};
  CHECK_ERROR_CODE(owner_update(w.owner, *w.server, id, Subset{1}, only_policy, w.rng), ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(owner_update(w.owner, *w.server, id, Subset{1}, UpdateSpec{}, w.rng), ErrorCode::invalid_argument);

  UpdateSpec tighten = only_policy;
  tighten.plaintext = Bytes{'A', '1', '+', 'A', '2'};
  owner_update(w.owner, *w.server, id, Subset{1}, tighten, w.rng);
  const auto result = w.request("bp", Subset{1});
  CHECK(result.plaintexts.empty());
  CHECK(result.failures == std::vector<RecordFailure>{{id, ErrorCode::incomplete_policy}});
  CHECK(w.server->fetch(id)->abe.attrs == std::vector<std::string>{"A1", "A2"});
}

TEST_CASE("role errors name the failing role") {
  World w(property_ctx(), 2, "roles");
  auto expect = [](auto&& fn, ErrorCode code, const std::string& prefix) {
    try {
      fn();
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
      CHECK(std::string(e.what()).find(prefix) != std::string::npos);
    }
  };
  expect([&] { w.publish("x", {"bp"}, {"A9"}, 1); }, ErrorCode::missing_apk, "owner: ");
  expect([&] { w.publish("x", {}, {"A1"}, 1); }, ErrorCode::invalid_argument, "owner: ");
  expect([&] { w.publish("x", {"bp"}, {"A1"}, 3); }, ErrorCode::bad_set_index, "owner: ");
  expect([&] { w.request("bp", Subset{}); }, ErrorCode::empty_subset, "owner: ");

  const auto b = w.user.begin_request(w.rng);
  CHECK_ERROR_CODE(w.authorities[0]->issue(w.user.gid(), w.user.credential_request(b, "A2")), ErrorCode::bad_attribute);
  CHECK_ERROR_CODE(UserActor(w.params, ""), ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(OwnerActor(w.params, "", w.rng), ErrorCode::invalid_argument);
}

TEST_CASE("actors restored from state files keep working") {
  World w(property_ctx(), 2, "restore", {"A1", "A2"});
  const RecordId id = w.publish("persisted", {"bp"}, {"A1", "A2"}, 2);
  std::vector<AuthorityPublicKeys> aas;
  for (const auto& [attr, keys] : w.owner.authorities()) aas.push_back(keys);
  const OwnerState os = decode_owner_state(w.ctx(), encode_owner_state(w.ctx(), w.owner.secrets(), aas));
  OwnerActor owner(w.params, os.secrets);
  for (const auto& k : os.authorities) owner.add_authority(k);
  std::vector<std::unique_ptr<AuthorityActor>> restored;
  std::vector<const AuthorityActor*> handles;
  for (const auto& aa : w.authorities) {
    restored.push_back(std::make_unique<AuthorityActor>(
        w.ctx(), decode_authority_state(w.ctx(), encode_authority_state(w.ctx(), aa->secrets()))));
    handles.push_back(restored.back().get());
  }
  const auto result = user_request(w.user, owner, handles, *w.server, "bp", Subset{2}, w.rng);
  REQUIRE(result.plaintexts.size() == 1);
  CHECK(testing::as_string(result.plaintexts[0].second) == "persisted");
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"bq"};
  CHECK(owner_update(owner, *w.server, id, Subset{1, 2}, spec, w.rng) == id);
}

}  // TEST_SUITE
