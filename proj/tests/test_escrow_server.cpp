#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "support/helpers.hpp"
#include "support/world.hpp"
#include "tlsaa/record_store.hpp"
#include "tlsaa/wire.hpp"

using namespace tlsaa;
using testing::World;
using testing::share_elements;

namespace {

PairingContext property_ctx() { return PairingContext::oracle(testing::kPropertyQ); }

std::vector<RecordId> ids_of(const SearchResponse& r) {
  std::vector<RecordId> out;
  for (const auto& m : r.matches) out.push_back(m.record_id);
  return out;
}

bool same_response(const PairingContext& ctx, const SearchResponse& a, const SearchResponse& b) {
  if (ids_of(a) != ids_of(b) || a.failures != b.failures || !(a.stats == b.stats)) return false;
  for (std::size_t i = 0; i < a.matches.size(); ++i) {
    if (encode_payload(a.matches[i].payload) != encode_payload(b.matches[i].payload)) return false;
    if (!(ctx.encode(a.matches[i].recovery.wrapped_key) == ctx.encode(b.matches[i].recovery.wrapped_key))) return false;
  }
  return true;
}

std::filesystem::path temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tlsaa-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("escrow_server") {

TEST_CASE("store and fetch") {
  World w(property_ctx(), 3, "store");
  const RecordId a = w.publish("first", {"heart"}, {"A1"}, 1);
  const RecordId b = w.publish("first", {"heart"}, {"A1"}, 1);
  CHECK(a != b);
  CHECK(w.server->size() == 2);
  CHECK(w.server->ids() == std::vector<RecordId>{a, b});
  const auto ra = w.server->fetch(a);
  const auto rb = w.server->fetch(b);
  REQUIRE(ra);
  REQUIRE(rb);
  CHECK(ra->record_id == a);
  CHECK(encode_record(w.ctx(), *ra) == encode_record(w.ctx(), *w.server->fetch(a)));
  CHECK_FALSE(share_elements(w.ctx(), *ra, *rb));
  CHECK_FALSE(w.server->fetch(999).has_value());

  // Stored record decodes from bytes alone and the user recovers it locally.
  const DataRecord copy = decode_record(w.ctx(), encode_record(w.ctx(), *ra));
  CHECK(encode_record(w.ctx(), copy) == encode_record(w.ctx(), *ra));
}

TEST_CASE("malformed records are refused") {
  World w(property_ctx(), 3, "bad-records");
  DataRecord rec = w.owner.publish(as_bytes("x"), std::vector<std::string>{"k"}, std::vector<std::string>{"A1"}, 2, w.rng);
  for (std::uint32_t set : {0u, 4u}) {
    DataRecord bad = rec;
    bad.set_index = set;
    CHECK_ERROR_CODE(w.server->store(bad), ErrorCode::bad_record);
  }
  DataRecord no_tags = rec;
  no_tags.sse.tagged_keywords.clear();
  CHECK_ERROR_CODE(w.server->store(no_tags), ErrorCode::bad_record);
  DataRecord no_abe = rec;
  no_abe.abe = {};
  CHECK_ERROR_CODE(w.server->store(no_abe), ErrorCode::bad_record);
  DataRecord mismatched = rec;
  mismatched.recovery.attrs = {"A2"};
  CHECK_ERROR_CODE(w.server->store(mismatched), ErrorCode::bad_record);
  DataRecord foreign = rec;
  foreign.sse.kw_modifier = PairingContext::curve().generator(Side::right);
  CHECK_ERROR_CODE(w.server->store(foreign), ErrorCode::bad_record);
  CHECK(w.server->size() == 0);
  CHECK_NOTHROW(w.server->store(rec));
}

TEST_CASE("three-record database returns exactly the qualifying record") {
  World w(property_ctx(), 2, "three", {"A1", "A2", "A3"});
  w.revoke(2);  // the user holds A1 and A2 only
  const RecordId r1 = w.publish("record one", {"bp", "x"}, {"A1", "A2"}, 1);
  w.publish("record two", {"bq"}, {"A1"}, 2);
  const RecordId r3 = w.publish("record three", {"bp"}, {"A3"}, 2);

  const auto result = w.request("bp", Subset{1, 2});
  REQUIRE(result.plaintexts.size() == 1);
  CHECK(result.plaintexts[0].first == r1);
  CHECK(testing::as_string(result.plaintexts[0].second) == "record one");
  CHECK(result.refused_by == std::vector<std::string>{"A3"});
  CHECK(result.failures == std::vector<RecordFailure>{{r3, ErrorCode::incomplete_policy}});
  CHECK(result.stats.candidates == 3);
  CHECK(result.stats.sse_matches == 2);
  CHECK(result.stats.abe_verifications == 1);
}

TEST_CASE("subset excludes other sets before any ABE work") {
  World w(property_ctx(), 3, "exclude");
  w.publish("p", {"bp"}, {"A1", "A2"}, 1);
  w.publish("q", {"other"}, {"A1"}, 3);
  const auto before = w.server->abe_verification_count();
  const auto resp = w.server->search(w.search_request("bp", Subset{2, 3}));
  CHECK(resp.matches.empty());
  CHECK(resp.stats.candidates == 1);
  CHECK(resp.stats.sse_matches == 0);
  CHECK(resp.stats.abe_verifications == 0);
  CHECK(w.server->abe_verification_count() == before);

  CHECK(w.server->search(w.search_request("bp", Subset{1})).matches.size() == 1);
  CHECK(w.server->abe_verification_count() == before + 1);
}

TEST_CASE("missing credential is a per-record failure") {
  World w(property_ctx(), 2, "missing");
  const RecordId a = w.publish("needs both", {"bp"}, {"A1", "A2"}, 1);
  const RecordId b = w.publish("needs A1", {"bp"}, {"A1"}, 2);
  const auto resp = w.server->search(w.search_request("bp", Subset{1, 2}, 1));
  CHECK(ids_of(resp) == std::vector<RecordId>{b});
  CHECK(resp.failures == std::vector<RecordFailure>{{a, ErrorCode::incomplete_policy}});
  CHECK(resp.stats.abe_verifications <= resp.stats.sse_matches);
}

TEST_CASE("search requests are validated") {
  World w(property_ctx(), 2, "validate");
  auto req = w.search_request("bp", Subset{1});
  req.token.subset = Subset{};
  CHECK_ERROR_CODE(w.server->search(req), ErrorCode::empty_subset);
  req.token.subset = Subset{3};
  CHECK_ERROR_CODE(w.server->search(req), ErrorCode::bad_set_index);
  req = w.search_request("bp", Subset{1});
  req.token.token = w.ctx().generator(Side::right);
  CHECK_ERROR_CODE(w.server->search(req), ErrorCode::malformed);
}

TEST_CASE("re-encryption gate") {
  World w(property_ctx(), 3, "gate");
  const RecordId id = w.publish("v1", {"bp"}, {"A1", "A2"}, 2);
  const Bytes original = encode_record(w.ctx(), *w.server->fetch(id));
  const auto& sk = w.owner.secrets().sse;
  const auto& pks = w.params.pks;

  auto expect_rejected = [&](UpdateRequest req) {
    req.record_id = id;
    req.sse = sse_encrypt(w.ctx(), sk, std::vector<std::string>{"evil"}, "o", "u", w.ctx().random_scalar(w.rng));
    CHECK_ERROR_CODE(w.server->reencrypt(req), ErrorCode::update_rejected);
    CHECK(encode_record(w.ctx(), *w.server->fetch(id)) == original);
  };
  UpdateRequest base;
  base.rtk = consent_search_token(w.ctx(), sk, "bp", Subset{2}, pks);
  expect_rejected(base);
  base.rtk = consent_search_token(w.ctx(), sk, w.owner.secrets().owner_id, Subset{2}, pks);
  expect_rejected(base);
  base.rtk = make_update_token(w.ctx(), sk, w.owner.secrets().update_id, Subset{2}, pks);
  base.rtk.subset = Subset{1, 2};
  expect_rejected(base);
  base.rtk = make_update_token(w.ctx(), sk, w.owner.secrets().update_id, Subset{1}, pks);
  expect_rejected(base);
  CHECK_ERROR_CODE(make_update_token(w.ctx(), sk, w.owner.secrets().update_id, Subset{9}, pks),
                   ErrorCode::bad_set_index);
  base.rtk.subset = Subset{9};
  expect_rejected(base);

  // A valid RTk with an incomplete replacement is refused as a bad record.
  UpdateRequest partial;
  partial.record_id = id;
  partial.rtk = make_update_token(w.ctx(), sk, w.owner.secrets().update_id, Subset{2}, pks);
  CHECK_ERROR_CODE(w.server->reencrypt(partial), ErrorCode::bad_record);
  partial.abe = w.server->fetch(id)->abe;
  partial.abe->attrs = {"A1"};
  partial.abe->ac_transferors.pop_back();
  partial.abe->plcy_modifiers.pop_back();
  CHECK_ERROR_CODE(w.server->reencrypt(partial), ErrorCode::bad_record);
  CHECK(encode_record(w.ctx(), *w.server->fetch(id)) == original);
  UpdateRequest missing = partial;
  missing.record_id = 77;
  CHECK_ERROR_CODE(w.server->reencrypt(missing), ErrorCode::not_found);

  // The owner's own update over a superset of the record's set goes through.
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"bq"};
  CHECK(owner_update(w.owner, *w.server, id, Subset{2, 3}, spec, w.rng) == id);
  const auto after = *w.server->fetch(id);
  CHECK_FALSE(encode_record(w.ctx(), after) == original);
  CHECK(w.request("bp", Subset{2}).plaintexts.empty());
  CHECK(testing::as_string(w.request("bq", Subset{2}).plaintexts.at(0).second) == "v1");
}

TEST_CASE("parallel search equals the serial reference") {
  World w(property_ctx(), 4, "parallel");
  for (int i = 0; i < 120; ++i) {
    w.publish("doc " + std::to_string(i), {i % 3 ? "bp" : "bq", "k" + std::to_string(i)},
              i % 4 ? std::vector<std::string>{"A1"} : std::vector<std::string>{"A1", "A2"},
              static_cast<std::uint32_t>(1 + i % 4));
  }
  for (const auto& subset : {Subset{1}, Subset{1, 2, 3, 4}, Subset{2, 4}}) {
    for (std::size_t creds : {std::size_t{1}, std::size_t{2}}) {
      const auto req = w.search_request("bp", subset, creds);
      const auto serial = w.server->search_serial(req);
      for (int workers : {1, 2, 4}) CHECK(same_response(w.ctx(), serial, w.server->search(req, workers)));
      CHECK(serial.stats.abe_verifications <= serial.stats.sse_matches);
    }
  }
}

TEST_CASE("concurrent searches only ever see whole records") {
  World w(property_ctx(), 1, "concurrent", {"A1"});
  const RecordId id = w.publish("version 0", {"bp"}, {"A1"}, 1);
  const auto consent = w.owner.consent("bp", Subset{1});
  const auto b = w.user.begin_request(w.rng);
  const std::vector<CredentialGrant> grants{
      w.authorities[0]->issue(w.user.gid(), w.user.credential_request(b, "A1"))};
  const auto req = w.user.search_request(consent, b, grants);
  const auto tokens = w.user.decryption_tokens(consent, b, grants);

  std::atomic<bool> done{false};
  std::atomic<int> opened{0}, broken{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      while (!done) {
        try {
          for (const auto& m : w.server->search(req, 1).matches) {
            const auto text = testing::as_string(w.user.open(m, tokens));
            if (text.rfind("version ", 0) != 0) ++broken;
            ++opened;
          }
        } catch (...) {
          ++broken;
        }
      }
    });
  }
  SeededRandom update_rng(std::string_view("updates"));
  for (int v = 1; v <= 30; ++v) {
    UpdateSpec spec;
    spec.keywords = std::vector<std::string>{"bp"};
    const std::string text = "version " + std::to_string(v);
    spec.plaintext = Bytes(text.begin(), text.end());
    owner_update(w.owner, *w.server, id, Subset{1}, spec, update_rng);
  }
  done = true;
  for (auto& t : readers) t.join();
  CHECK(broken == 0);
  CHECK(opened > 0);
  CHECK(testing::as_string(w.request("bp", Subset{1}).plaintexts.at(0).second) == "version 30");
}

TEST_CASE("server state and logs hold no plaintext identifiers") {
  std::vector<std::string> lines;
  std::mutex m;
  const auto path = temp_path("hygiene");
  {
    World w(property_ctx(), 2, "hygiene", {"A1", "A2"}, [&](std::string_view l) {
      std::lock_guard lock(m);
      lines.emplace_back(l);
    });
    w.server = EscrowServer::create(path, w.params, [&](std::string_view l) {
      std::lock_guard lock(m);
      lines.emplace_back(l);
    });
    const RecordId id = w.publish("SECRET-PAYLOAD-TEXT", {"kw-cardiology", "kw-oncology"}, {"A1", "A2"}, 1);
    CHECK(w.request("kw-cardiology", Subset{1}).plaintexts.size() == 1);
    UpdateSpec spec;
    spec.keywords = std::vector<std::string>{"kw-radiology"};
    owner_update(w.owner, *w.server, id, Subset{1}, spec, w.rng);
    CHECK_THROWS(owner_update(OwnerActor(w.params, "intruder", w.rng), *w.server, id, Subset{1}, spec, w.rng));

    std::ifstream in(path, std::ios::binary);
    const std::string store((std::istreambuf_iterator<char>(in)), {});
    std::string server_text = store;
    for (const auto& l : lines) server_text += l + "\n";
    server_text += wire::encode(w.params);
    for (const std::string secret : {std::string("SECRET-PAYLOAD"), std::string("kw-cardiology"),
                                     std::string("kw-oncology"), std::string("kw-radiology"), w.user.gid(),
                                     w.owner.secrets().owner_id, w.owner.secrets().update_id}) {
      CAPTURE(secret);
      CHECK(server_text.find(secret) == std::string::npos);
    }
    CHECK_FALSE(lines.empty());
  }
  std::filesystem::remove_all(path);
}

TEST_CASE("file-backed store survives reopening") {
  const auto path = temp_path("reopen");
  World w(property_ctx(), 2, "reopen");
  w.server = EscrowServer::create(path, w.params);
  const RecordId a = w.publish("alpha", {"bp"}, {"A1"}, 1);
  const RecordId b = w.publish("beta", {"bp"}, {"A2"}, 2);
  UpdateSpec spec;
  spec.plaintext = Bytes{'g', 'a', 'm', 'm', 'a'};
  owner_update(w.owner, *w.server, b, Subset{2}, spec, w.rng);
  const Bytes rec_a = encode_record(w.ctx(), *w.server->fetch(a));
  const Bytes rec_b = encode_record(w.ctx(), *w.server->fetch(b));
  CHECK_ERROR_CODE(EscrowServer::create(path, w.params), ErrorCode::io);

  w.server = EscrowServer::open(path);
  CHECK(w.server->ids() == std::vector<RecordId>{a, b});
  CHECK(encode_record(w.ctx(), *w.server->fetch(a)) == rec_a);
  CHECK(encode_record(w.ctx(), *w.server->fetch(b)) == rec_b);
  const RecordId c = w.publish("delta", {"bp"}, {"A1"}, 1);
  CHECK(c > b);
  const auto result = w.request("bp", Subset{1, 2});
  REQUIRE(result.plaintexts.size() == 3);
  CHECK(testing::as_string(result.plaintexts[1].second) == "gamma");

  w.server = EscrowServer::open(path);
  CHECK(w.server->size() == 3);
  CHECK_ERROR_CODE(EscrowServer::open(path.string() + ".missing"), ErrorCode::io);
  std::filesystem::remove_all(path);
}

}  // TEST_SUITE
