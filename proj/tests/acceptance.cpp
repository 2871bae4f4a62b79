// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "support/exponent_oracle.hpp"
#include "support/params.hpp"
#include "support/world.hpp"
#include "tlsaa/actors.hpp"
#include "tlsaa/wire.hpp"

using namespace tlsaa;
using oracle::dlog;
using oracle::inverse;
using oracle::mod;
using oracle::s;
using testing::World;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Named boolean checks; the first few failures are kept for the report.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) {
      ++failed_;
      if (first_failures_.size() < 5) first_failures_.push_back(what);
    }
  }
  template <class F>
  void expect_code(F&& fn, ErrorCode code, const std::string& what) {
    bool ok = false;
    try {
      fn();
    } catch (const Error& e) {
      ok = e.code() == code;
    }
    expect(ok, what);
  }
  std::size_t total() const { return total_; }
  std::size_t failed() const { return failed_; }
  std::string failures() const {
    std::string out;
    for (const auto& f : first_failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  std::size_t total_ = 0, failed_ = 0;
  std::vector<std::string> first_failures_;
};

struct Outcome {
  bool ok;
  std::string detail;
};

Outcome from(const Checks& c, const std::string& detail) {
  std::ostringstream os;
  os << detail << ", " << c.total() - c.failed() << "/" << c.total() << " checks";
  if (c.failed()) os << " [" << c.failures() << "]";
  return {c.failed() == 0, os.str()};
}

std::mt19937_64& picker() {
  static std::mt19937_64 gen(20240601);
  return gen;
}

std::size_t uniform(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(picker());
}

Subset random_subset(std::size_t n) {
  std::vector<std::uint32_t> m;
  while (m.empty())
    for (std::uint32_t i = 1; i <= n; ++i)
      if (uniform(0, 1)) m.push_back(i);
  return Subset(m);
}

std::vector<std::string> attribute_names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= k; ++i) out.push_back("A" + std::to_string(i));
  return out;
}

// g^e by repeated multiplication; never touches the library's exponentiation.
GroupElement brute_power(const PairingContext& ctx, Side side, std::uint64_t e) {
  GroupElement acc = ctx.identity(side);
  for (std::uint64_t i = 0; i < e; ++i) acc = ctx.mul(acc, ctx.generator(side));
  return acc;
}

GtElement brute_gt(const PairingContext& ctx, std::uint64_t e) {
  GtElement acc = ctx.gt_identity();
  for (std::uint64_t i = 0; i < e; ++i) acc = ctx.gt_mul(acc, ctx.gt_generator());
  return acc;
}

// Byte-exact comparison against the brute-force power, plus the brute-force log.
bool is_power(const PairingContext& ctx, const GroupElement& x, std::uint64_t e) {
  return ctx.encode(x) == ctx.encode(brute_power(ctx, x.side(), e)) && dlog(ctx, x) == e;
}
bool is_power(const PairingContext& ctx, const GtElement& x, std::uint64_t e) {
  return ctx.encode(x) == ctx.encode(brute_gt(ctx, e)) && dlog(ctx, x) == e;
}

PairingContext property_ctx() { return PairingContext::oracle(testing::kPropertyQ); }

// --- 1. worked vectors --------------------------------------------------------

void pairing_vectors(Checks& c) {
  const auto ctx = oracle::worked_context();
  const auto plain = PairingContext::oracle(oracle::kQ);
  c.expect(is_power(ctx, ctx.pair(brute_power(ctx, Side::left, 2), brute_power(ctx, Side::right, 3)), mod(2 * 3)),
           "pair(g^2,g^3)=gT^6");
  bool symmetric = true;
  std::vector<GroupElement> left, right;
  for (std::uint64_t e = 0; e < oracle::kQ; ++e) {
    left.push_back(e ? ctx.mul(left.back(), ctx.generator(Side::left)) : ctx.identity(Side::left));
    right.push_back(e ? ctx.mul(right.back(), ctx.generator(Side::right)) : ctx.identity(Side::right));
  }
  for (std::uint64_t u = 0; u < oracle::kQ; ++u)
    for (std::uint64_t v = 0; v < oracle::kQ; ++v)
      symmetric = symmetric && ctx.encode(ctx.pair(left[u], right[v])) == ctx.encode(ctx.pair(left[v], right[u]));
  c.expect(symmetric, "pair(g^u,g^v)=pair(g^v,g^u) for all u,v");
  c.expect(!(plain.hash_to_group(HashDomain::keyword, "bp") == plain.hash_to_group(HashDomain::gid, "bp")),
           "H_keyword(bp) != H_gid(bp)");
  c.expect(!(PairingContext::curve().hash_to_group(HashDomain::keyword, "bp") ==
             PairingContext::curve().hash_to_group(HashDomain::gid, "bp")),
           "curve H_keyword(bp) != H_gid(bp)");
  c.expect(is_power(ctx, ctx.hash_to_group(HashDomain::keyword, "bp"), 5), "fixture H(bp)=g^5");
  c.expect(inverse(7) == 29 && mod(7 * 29) == 1 && ctx.inverse(s(7)) == s(29), "inverse(7)=29");
  c.expect(is_power(ctx, ctx.mul(brute_power(ctx, Side::left, 70), brute_power(ctx, Side::left, 35)), mod(105)) &&
               mod(105) == 4,
           "g^70*g^35=g^4");
  c.expect(is_power(ctx, ctx.gt_div(brute_gt(ctx, 88), brute_gt(ctx, 80)), mod(88 - 80)), "gT^88/gT^80=gT^8");
}

void sse_vectors(Checks& c) {
  const auto ctx = oracle::worked_context();
  const Scalar a[] = {s(10), s(20)};
  const SetPublicKeys pks = make_set_public_keys(ctx, a);
  c.expect(is_power(ctx, pks.at(1), 10) && is_power(ctx, pks.at(2), 20), "pk=(g^10,g^20)");
  SeededRandom r1(std::uint64_t{1}), r2(std::uint64_t{2});
  const auto p1 = server_setup(property_ctx(), 2, r1), p2 = server_setup(property_ctx(), 2, r2);
  c.expect(!(p1.pks.at(1) == p2.pks.at(1)) && !(p1.pks.at(2) == p2.pks.at(2)), "fresh setups differ");

  const OwnerSseKey owner{s(7)};
  const std::vector<std::string> kws{"bp"};
  const auto e = sse_encrypt(ctx, owner, kws, "owner", "update", s(3));
  c.expect(mod(3 * inverse(7)) == 87 && is_power(ctx, e.stk_transferor, 87), "stk_transferor=g^87");
  c.expect(is_power(ctx, e.kw_modifier, 3), "kw_modifier=g^3");
  c.expect(is_power(ctx, e.tagged_keywords.at(0), mod(5 * 3)), "tagged=gT^15");
  const auto fresh = sse_encrypt(ctx, owner, kws, "owner", "update", s(4));
  c.expect(!(fresh.stk_transferor == e.stk_transferor) && !(fresh.kw_modifier == e.kw_modifier) &&
               !(fresh.tagged_keywords[0] == e.tagged_keywords[0]) && !(fresh.update_keyword == e.update_keyword),
           "fresh r changes every element");

  const auto t1 = consent_search_token(ctx, owner, "bp", Subset{1}, pks);
  const auto t12 = consent_search_token(ctx, owner, "bp", Subset{1, 2}, pks);
  c.expect(mod((10 + 5) * 7) == 4 && is_power(ctx, t1.token, 4), "token S={1} g^4");
  c.expect(mod((30 + 5) * 7) == 43 && is_power(ctx, t12.token, 43), "token S={1,2} g^43");
  c.expect(is_power(ctx, ctx.pair(t1.token, e.stk_transferor), mod(4 * 87)) && mod(4 * 87) == 45, "lhs gT^45");
  c.expect(sse_match(ctx, e, t1, 0, pks), "match true");
  SearchToken lying = t1;
  lying.subset = Subset{2};
  c.expect(mod(20 * 3 + 15) == 75 && !sse_match(ctx, e, lying, 0, pks), "S'={2} false");
  c.expect(!sse_match(ctx, e, consent_search_token(ctx, owner, "bq", Subset{1}, pks), 0, pks), "H(w')=g^6 false");
}

void abe_vectors(Checks& c) {
  const auto ctx = oracle::worked_context();
  const auto a1 = attribute_key_pair(ctx, "A1", s(11));
  const auto a2 = attribute_key_pair(ctx, "A2", s(13));
  c.expect(inverse(11) == 46 && is_power(ctx, a1.apk, 46), "apk=g^46");
  SeededRandom r1(std::uint64_t{1}), r2(std::uint64_t{2});
  const auto k1 = aa_setup(property_ctx(), "A1", r1), k2 = aa_setup(property_ctx(), "A1", r2);
  c.expect(!(k1.ask == k2.ask) && !(k1.apk == k2.apk), "fresh AA setups differ");

  const auto blinded = blind_identity(ctx, "alice", s(2));
  const auto c1 = issue_credential(ctx, a1, blinded);
  const auto c2 = issue_credential(ctx, a2, blinded);
  c.expect(is_power(ctx, c1.credential, mod((1 + 18) * 11)) && mod(19 * 11) == 7, "cred A1 g^7");
  c.expect(is_power(ctx, c2.credential, mod((1 + 18) * 13)) && mod(19 * 13) == 45, "cred A2 g^45");

  const std::vector<std::string> attrs{"A1", "A2"};
  const std::vector<AttributePublicKey> apks{a1.public_key(), a2.public_key()};
  const Scalar nonces[] = {s(4), s(6)};
  const auto pol = abe_policy_encrypt(ctx, attrs, apks, nonces);
  c.expect(is_power(ctx, pol.ac_transferors.at(0), mod(4 * inverse(11))) && mod(4 * 46) == 83, "transferor g^83");
  c.expect(inverse(13) == 70 && is_power(ctx, pol.ac_transferors.at(1), mod(6 * 70)) && mod(6 * 70) == 16,
           "transferor g^16");
  c.expect(is_power(ctx, pol.plcy_modifiers.at(0), 4) && is_power(ctx, pol.plcy_modifiers.at(1), 6), "modifiers");
  c.expect(is_power(ctx, pol.plcy, 10), "plcy gT^10");

  const std::vector<AttributeCredential> creds{c1, c2};
  const auto lhs = ctx.gt_mul(ctx.pair(c1.credential, pol.ac_transferors[0]), ctx.pair(c2.credential, pol.ac_transferors[1]));
  c.expect(mod(7 * 83 + 45 * 16) == 89 && is_power(ctx, lhs, 89), "lhs gT^89");
  c.expect(mod(10 + 18 * 4 + 18 * 6) == 89, "rhs gT^89");
  c.expect(abe_verify(ctx, pol, creds, blinded), "verify true");
  const auto other = blind_identity(ctx, "alice", s(3));
  c.expect(is_power(ctx, other.element, 27), "blinded' g^27");
  const std::vector<AttributeCredential> mixed{c1, issue_credential(ctx, a2, other)};
  c.expect(!abe_verify(ctx, pol, mixed, blinded) && !abe_verify(ctx, pol, mixed, other), "mixed nonce false");
  const std::vector<AttributeCredential> basic{issue_credential_basic(ctx, a1), issue_credential_basic(ctx, a2)};
  c.expect(is_power(ctx, basic[0].credential, 11) && is_power(ctx, basic[1].credential, 13), "basic creds");
  c.expect(abe_verify_basic(ctx, pol, basic) && mod(11 * 83 + 13 * 16) == 10, "basic verify true");
}

void recovery_vectors(Checks& c) {
  const auto ctx = oracle::worked_context();
  const Scalar a[] = {s(10), s(20)};
  const SetPublicKeys pks = make_set_public_keys(ctx, a);
  const OwnerRecoveryKey owner{s(5)};
  const auto a1 = recovery_attribute_key_pair(ctx, "A1", s(17));
  const auto a2 = recovery_attribute_key_pair(ctx, "A2", s(19));
  const std::vector<std::string> attrs{"A1", "A2"};
  const std::vector<RecoveryAttributePublicKey> apks{a1.public_key(), a2.public_key()};
  const KeyMask m{brute_gt(ctx, 50)};
  const auto e = wrap_key(ctx, owner, attrs, apks, RecoveryNonces{s(8), {s(12), s(14)}}, m);
  c.expect(inverse(5) == 81 && mod(8 * 81) == 42 && is_power(ctx, e.dtk_transferor, 42), "dtk_transferor g^42");
  c.expect(is_power(ctx, e.dtk_owner_modifier, 8), "owner modifier g^8");
  c.expect(inverse(17) == 6 && is_power(ctx, e.dtk_aa_transferors.at(0), mod(12 * 6)) && mod(72) == 72,
           "aa transferor g^72");
  c.expect(inverse(19) == 16 && is_power(ctx, e.dtk_aa_transferors.at(1), mod(14 * 16)) && mod(224) == 22,
           "aa transferor g^22");
  c.expect(is_power(ctx, e.dtk_aa_modifiers.at(0), 12) && is_power(ctx, e.dtk_aa_modifiers.at(1), 14), "aa modifiers");
  c.expect(is_power(ctx, e.wrapped_key, mod(50 + 12 + 14 + 8)) && mod(84) == 84, "wrapped gT^84");

  const auto o1 = consent_decrypt_token(ctx, owner, Subset{1}, pks);
  c.expect(is_power(ctx, o1, mod(11 * 5)) && mod(55) == 55, "owner token g^55");
  c.expect(is_power(ctx, consent_decrypt_token(ctx, owner, Subset{1, 2}, pks), mod(31 * 5)) && mod(155) == 54,
           "owner token g^54");

  const GroupElement blinded = ctx.exp(ctx.hash_to_group(HashDomain::gid, "alice"), s(8));
  c.expect(is_power(ctx, blinded, mod(9 * 8)), "H(GID)^8=g^72");
  const auto t1 = issue_decrypt_token(ctx, a1, blinded);
  const auto t2 = issue_decrypt_token(ctx, a2, blinded);
  c.expect(is_power(ctx, t1.token, mod(73 * 17)) && mod(1241) == 29, "aa token g^29");
  c.expect(is_power(ctx, t2.token, mod(73 * 19)) && mod(1387) == 74, "aa token g^74");

  const auto owner_side = ctx.gt_div(ctx.pair(o1, e.dtk_transferor), ctx.pair(pks.at(1), e.dtk_owner_modifier));
  c.expect(is_power(ctx, ctx.pair(o1, e.dtk_transferor), mod(55 * 42)) && mod(55 * 42) == 88, "gT^88");
  c.expect(is_power(ctx, ctx.pair(pks.at(1), e.dtk_owner_modifier), 80), "gT^80");
  c.expect(is_power(ctx, owner_side, 8), "owner side gT^8");
  const auto aa_side = ctx.gt_div(
      ctx.gt_mul(ctx.pair(t1.token, e.dtk_aa_transferors[0]), ctx.pair(t2.token, e.dtk_aa_transferors[1])),
      ctx.gt_mul(ctx.pair(blinded, e.dtk_aa_modifiers[0]), ctx.pair(blinded, e.dtk_aa_modifiers[1])));
  c.expect(mod(29 * 72 + 74 * 22 - 72 * 12 - 72 * 14) == 26 && is_power(ctx, aa_side, 26), "aa side gT^26");
  const DecryptionTokenSet tokens{o1, Subset{1}, {t1, t2}, blinded};
  c.expect(is_power(ctx, recover_key(ctx, e, tokens, pks).element, mod(84 - 34)), "recovered gT^50");

  const GroupElement foreign = ctx.exp(ctx.hash_to_group(HashDomain::gid, "mallory"), s(5));
  const DecryptionTokenSet mixed{
      o1, Subset{1}, {issue_decrypt_token(ctx, a1, foreign), issue_decrypt_token(ctx, a2, foreign)}, blinded};
  c.expect(!(recover_key(ctx, e, mixed, pks) == m), "other GID tokens do not recover");
}

void payload_vectors(Checks& c) {
  const auto ctx = oracle::worked_context();
  c.expect(derive_key(ctx, KeyMask{brute_gt(ctx, 50)}) != derive_key(ctx, KeyMask{brute_gt(ctx, 51)}),
           "masks 50/51 give different keys");
  SeededRandom rng(std::string_view("payload"));
  Bytes big(1 << 20);
  rng.fill(big);
  const auto key = derive_key(ctx, KeyMask{brute_gt(ctx, 50)});
  const auto ct = encrypt_payload(key, big, rng);
  c.expect(decrypt_payload(key, ct) == big, "1 MiB round trip");
  c.expect_code([&] { decrypt_payload(derive_key(ctx, KeyMask{brute_gt(ctx, 51)}), ct); },
                ErrorCode::authentication_failure, "wrong mask fails authentication");
}

// The integration examples need room for random nonces, so they run on the
// same oracle at a large prime.
void integration_vectors(Checks& c) {
  {
    World w(property_ctx(), 3, "c1-store");
    const RecordId a = w.publish("same", {"bp"}, {"A1"}, 1);
    const RecordId b = w.publish("same", {"bp"}, {"A1"}, 1);
    c.expect(a != b && !testing::share_elements(w.ctx(), *w.server->fetch(a), *w.server->fetch(b)),
             "two stores share no element");
  }
  {
    World w(property_ctx(), 2, "c1-three", {"A1", "A2", "A3"});
    w.revoke(2);
    const RecordId r1 = w.publish("one", {"bp"}, {"A1", "A2"}, 1);
    w.publish("two", {"bq"}, {"A1"}, 2);
    w.publish("three", {"bp"}, {"A3"}, 2);
    const auto res = w.request("bp", Subset{1, 2});
    c.expect(res.plaintexts.size() == 1 && res.plaintexts[0].first == r1 &&
                 testing::as_string(res.plaintexts[0].second) == "one",
             "three-record database returns one record");
    const auto before = w.server->abe_verification_count();
    const auto none = w.server->search(w.search_request("bp", Subset{2}, 2));
    const auto none2 = w.server->search(w.search_request("zz", Subset{1}, 2));
    c.expect(none.matches.empty() && none2.matches.empty() && w.server->abe_verification_count() == before &&
                 none.stats.abe_verifications == 0,
             "excluded set: empty response, zero ABE verifications");
    (void)none;
  }
  {
    World w(property_ctx(), 2, "c1-rtk");
    const RecordId id = w.publish("x", {"bp"}, {"A1"}, 1);
    const Bytes before = encode_record(w.ctx(), *w.server->fetch(id));
    UpdateSpec spec;
    spec.keywords = std::vector<std::string>{"bq"};
    auto req = w.owner.update_request(*w.server->fetch(id), Subset{1}, spec, w.rng);
    auto as_search = req;
    as_search.rtk = consent_search_token(w.ctx(), w.owner.secrets().sse, "bp", Subset{1}, w.params.pks);
    c.expect_code([&] { w.server->reencrypt(as_search); }, ErrorCode::update_rejected, "search token as RTk");
    auto wrong = req;
    wrong.rtk.subset = Subset{1, 2};
    c.expect_code([&] { w.server->reencrypt(wrong); }, ErrorCode::update_rejected, "wrong subset RTk");
    c.expect(encode_record(w.ctx(), *w.server->fetch(id)) == before, "rejections leave record intact");
    c.expect(w.server->reencrypt(req) == id && encode_record(w.ctx(), *w.server->fetch(id)) != before,
             "valid RTk replaces elements");
  }
  {
    World w(property_ctx(), 2, "c1-actors", {"A1", "A2"});
    const RecordId id = w.publish("round trip", {"bp"}, {"A1", "A2"}, 1);
    const auto ok = w.request("bp", Subset{1});
    c.expect(ok.plaintexts.size() == 1 && testing::as_string(ok.plaintexts[0].second) == "round trip",
             "qualified user recovers plaintext");
    Transcript t1, t2;
    const auto handles = w.aa_handles();
    user_request(w.user, w.owner, handles, *w.server, "bp", Subset{1}, w.rng, &t1);
    user_request(w.user, w.owner, handles, *w.server, "bp", Subset{1}, w.rng, &t2);
    const auto blinded = [](const Transcript& t) {
      for (const auto& m : t.messages)
        if (wire::message_type(m) == "search-request") return m.substr(m.find("\"blinded\""), 100);
      return std::string();
    };
    c.expect(!blinded(t1).empty() && blinded(t1) != blinded(t2), "distinct blinded identities");

    const DataRecord before = *w.server->fetch(id);
    UpdateSpec noop;
    noop.keywords = std::vector<std::string>{"bp"};
    noop.plaintext = Bytes{'r', 'o', 'u', 'n', 'd', ' ', 't', 'r', 'i', 'p'};
    owner_update(w.owner, *w.server, id, Subset{1}, noop, w.rng);
    c.expect(!testing::share_elements(w.ctx(), before, *w.server->fetch(id)), "no-op update changes every element");

    const auto stale = w.search_request("bp", Subset{1});
    UpdateSpec rotate;
    rotate.keywords = std::vector<std::string>{"hr"};
    owner_update(w.owner, *w.server, id, Subset{1}, rotate, w.rng);
    c.expect(w.server->search(stale).matches.empty() && w.request("hr", Subset{1}).plaintexts.size() == 1,
             "keyword rotation");

    OwnerActor intruder(w.params, w.owner.secrets().owner_id, w.rng);
    c.expect_code([&] { owner_update(intruder, *w.server, id, Subset{1}, rotate, w.rng); },
                  ErrorCode::update_rejected, "non-owner update");
    c.expect_code([&] { w.publish("x", {}, {"A1"}, 1); }, ErrorCode::invalid_argument, "empty keywords rejected");

    w.revoke(1);
    c.expect(w.request("hr", Subset{1}).plaintexts.empty(), "missing attribute yields nothing");
  }
}

Outcome criterion_worked_vectors() {
  Checks c;
  pairing_vectors(c);
  sse_vectors(c);
  abe_vectors(c);
  recovery_vectors(c);
  payload_vectors(c);
  integration_vectors(c);
  return from(c, "q=101 brute-force oracle");
}

// --- 2, 3. SSE ----------------------------------------------------------------

struct SseFixture {
  SetPublicKeys pks;
  OwnerSseKey owner;
  std::vector<std::string> keywords;
  SseRecordElements elems;
  Subset subset;

  SseFixture(const PairingContext& ctx, RandomSource& rng) {
    const std::size_t n = uniform(1, 8);
    pks = server_setup(ctx, n, rng).pks;
    owner = OwnerSseKey::generate(ctx, rng);
    for (std::size_t i = 0, k = uniform(1, 4); i < k; ++i) keywords.push_back("kw-" + std::to_string(rng.next_u64()));
    elems = sse_encrypt(ctx, owner, keywords, "owner-x", "update-x", ctx.random_scalar(rng));
    subset = random_subset(n);
  }
};

void sse_trials(const PairingContext& ctx, int trials, Checks& c) {
  SeededRandom rng(std::string_view("sse-trials"));
  for (int t = 0; t < trials; ++t) {
    SseFixture f(ctx, rng);
    const std::size_t idx = uniform(0, f.keywords.size() - 1);
    const auto token = consent_search_token(ctx, f.owner, f.keywords[idx], f.subset, f.pks);
    const auto hit = sse_match_any(ctx, f.elems, token.token, f.pks.product(ctx, f.subset));
    c.expect(hit == idx && sse_match(ctx, f.elems, token, idx, f.pks), "completeness");
    const auto miss = consent_search_token(ctx, f.owner, "other-" + std::to_string(rng.next_u64()), f.subset, f.pks);
    c.expect(!sse_match_any(ctx, f.elems, miss.token, f.pks.product(ctx, f.subset)), "soundness");
  }
}

Outcome criterion_sse() {
  Checks c;
  sse_trials(property_ctx(), 500, c);
  sse_trials(PairingContext::curve(), 100, c);
  return from(c, "oracle q=2^61-1 500+500, curve 100+100");
}

void subset_trials(const PairingContext& ctx, int trials, Checks& c) {
  SeededRandom rng(std::string_view("subset-trials"));
  for (int t = 0; t < trials; ++t) {
    SseFixture f(ctx, rng);
    if (f.pks.size() == 1) f = SseFixture(ctx, rng);  // need room for S' != S
    while (f.pks.size() == 1) f = SseFixture(ctx, rng);
    const std::size_t idx = uniform(0, f.keywords.size() - 1);
    auto token = consent_search_token(ctx, f.owner, f.keywords[idx], f.subset, f.pks);
    Subset other = random_subset(f.pks.size());
    while (other == f.subset) other = random_subset(f.pks.size());
    token.subset = other;
    c.expect(!sse_match(ctx, f.elems, token, idx, f.pks) &&
                 !sse_match_any(ctx, f.elems, token.token, f.pks.product(ctx, other)),
             "S' != S must fail");
  }
}

Outcome criterion_subset_binding() {
  Checks c;
  subset_trials(property_ctx(), 500, c);
  subset_trials(PairingContext::curve(), 50, c);
  return from(c, "oracle 500, curve 50");
}

// --- 4. anti-collusion -------------------------------------------------------

void collusion_trials(const PairingContext& ctx, int trials, Checks& c) {
  SeededRandom rng(std::string_view("collusion-trials"));
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = uniform(2, 4);
    const auto attrs = attribute_names(k);
    std::vector<AttributeKeyPair> keys;
    std::vector<AttributePublicKey> apks;
    std::vector<RecoveryAttributeKeyPair> dkeys;
    std::vector<RecoveryAttributePublicKey> dapks;
    std::vector<Scalar> nonces;
    for (const auto& a : attrs) {
      keys.push_back(aa_setup(ctx, a, rng));
      apks.push_back(keys.back().public_key());
      dkeys.push_back(recovery_aa_setup(ctx, keys.back(), rng));
      dapks.push_back(dkeys.back().public_key());
      nonces.push_back(ctx.random_scalar(rng));
    }
    // Each attribute's credential comes from one of the two users, both present.
    std::vector<int> from_v(k);
    do {
      for (auto& x : from_v) x = static_cast<int>(uniform(0, 1));
    } while (std::count(from_v.begin(), from_v.end(), 1) == 0 || std::count(from_v.begin(), from_v.end(), 0) == 0);

    const auto pol = abe_policy_encrypt(ctx, attrs, apks, nonces);
    const std::string gu = "gid-u-" + std::to_string(t), gv = "gid-v-" + std::to_string(t);
    const auto bu = blind_identity(ctx, gu, ctx.random_scalar(rng));
    const auto bv = blind_identity(ctx, gv, ctx.random_scalar(rng));
    std::vector<AttributeCredential> honest, mixed;
    for (std::size_t i = 0; i < k; ++i) {
      honest.push_back(issue_credential(ctx, keys[i], bu));
      mixed.push_back(issue_credential(ctx, keys[i], from_v[i] ? bv : bu));
    }
    c.expect(abe_verify(ctx, pol, honest, bu), "honest credentials verify");
    c.expect(!abe_verify(ctx, pol, mixed, bu) && !abe_verify(ctx, pol, mixed, bv), "mixed credentials fail");

    const std::size_t n = uniform(1, 4);
    const auto pks = server_setup(ctx, n, rng).pks;
    const auto sse = OwnerSseKey::generate(ctx, rng);
    const auto owner = OwnerRecoveryKey::generate(ctx, sse, rng);
    std::vector<Scalar> sn;
    for (std::size_t i = 0; i < k; ++i) sn.push_back(ctx.random_scalar(rng));
    const KeyMask m{ctx.random_gt(rng)};
    const auto elems = wrap_key(ctx, owner, attrs, dapks, RecoveryNonces{ctx.random_scalar(rng), sn}, m);
    const auto payload = encrypt_payload(derive_key(ctx, m), as_bytes("collusion"), rng);
    const Subset subset = random_subset(n);
    const auto ru = blind_identity(ctx, gu, ctx.random_scalar(rng)).element;
    const auto rv = blind_identity(ctx, gv, ctx.random_scalar(rng)).element;
    DecryptionTokenSet good{consent_decrypt_token(ctx, owner, subset, pks), subset, {}, ru};
    DecryptionTokenSet bad = good;
    for (std::size_t i = 0; i < k; ++i) {
      good.aa_tokens.push_back(issue_decrypt_token(ctx, dkeys[i], ru));
      bad.aa_tokens.push_back(issue_decrypt_token(ctx, dkeys[i], from_v[i] ? rv : ru));
    }
    c.expect(recover_key(ctx, elems, good, pks) == m, "honest tokens recover");
    for (const auto& blinded : {ru, rv}) {
      bad.blinded_r = blinded;
      const KeyMask got = recover_key(ctx, elems, bad, pks);
      c.expect(!(got == m), "mixed tokens do not recover");
      c.expect_code([&] { decrypt_payload(derive_key(ctx, got), payload); }, ErrorCode::authentication_failure,
                    "mixed tokens fail authentication");
    }
  }
}

Outcome criterion_collusion() {
  Checks c;
  collusion_trials(property_ctx(), 500, c);
  collusion_trials(PairingContext::curve(), 10, c);
  return from(c, "oracle 500 credential + 500 token trials, curve 10");
}

// --- 5. key recovery round trip -------------------------------------------------

void recovery_trials(const PairingContext& ctx, int trials, Checks& c) {
  SeededRandom rng(std::string_view("recovery-trials"));
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = uniform(1, 8), k = uniform(1, 4);
    const auto attrs = attribute_names(k);
    const auto pks = server_setup(ctx, n, rng).pks;
    const auto sse = OwnerSseKey::generate(ctx, rng);
    const auto owner = OwnerRecoveryKey::generate(ctx, sse, rng);
    std::vector<RecoveryAttributeKeyPair> dkeys;
    std::vector<RecoveryAttributePublicKey> dapks;
    std::vector<Scalar> sn;
    for (const auto& a : attrs) {
      dkeys.push_back(recovery_aa_setup(ctx, aa_setup(ctx, a, rng), rng));
      dapks.push_back(dkeys.back().public_key());
      sn.push_back(ctx.random_scalar(rng));
    }
    const KeyMask m{ctx.random_gt(rng)};
    const auto elems = wrap_key(ctx, owner, attrs, dapks, RecoveryNonces{ctx.random_scalar(rng), sn}, m);
    Bytes plain(uniform(0, 256));
    rng.fill(plain);
    const auto payload = encrypt_payload(derive_key(ctx, m), plain, rng);

    const Subset subset = random_subset(n);
    const auto blinded = blind_identity(ctx, "gid-" + std::to_string(t), ctx.random_scalar(rng)).element;
    DecryptionTokenSet tokens{consent_decrypt_token(ctx, owner, subset, pks), subset, {}, blinded};
    for (const auto& d : dkeys) tokens.aa_tokens.push_back(issue_decrypt_token(ctx, d, blinded));
    const KeyMask got = recover_key(ctx, elems, tokens, pks);
    c.expect(got == m, "mask recovered");
    c.expect(decrypt_payload(derive_key(ctx, got), payload) == plain, "payload decrypts");

    // Every single-token substitution must break authentication.
    const auto rejects = [&](const DecryptionTokenSet& wrong, const std::string& what) {
      c.expect_code([&] { decrypt_payload(derive_key(ctx, recover_key(ctx, elems, wrong, pks)), payload); },
                    ErrorCode::authentication_failure, what);
    };
    auto w = tokens;
    w.owner_token = ctx.exp(w.owner_token, ctx.random_scalar(rng));
    rejects(w, "wrong owner token");
    for (std::size_t i = 0; i < k; ++i) {
      w = tokens;
      w.aa_tokens[i] = issue_decrypt_token(ctx, recovery_aa_setup(ctx, aa_setup(ctx, attrs[i], rng), rng), blinded);
      rejects(w, "wrong aa token");
    }
    w = tokens;
    w.blinded_r = ctx.exp(blinded, ctx.random_scalar(rng));
    rejects(w, "wrong blinded identity");
    if (n > 1) {
      w = tokens;
      Subset other = random_subset(n);
      while (other == subset) other = random_subset(n);
      w.subset = other;
      rejects(w, "wrong subset");
    }
  }
}

Outcome criterion_recovery() {
  Checks c;
  recovery_trials(property_ctx(), 500, c);
  recovery_trials(PairingContext::curve(), 10, c);
  return from(c, "oracle 500 parameter sets, curve 10");
}

// --- 6. pipeline ordering -------------------------------------------------------

Outcome criterion_pipeline() {
  Checks c;
  const auto attrs = attribute_names(4);
  World w(property_ctx(), 4, "pipeline", attrs, {});
  const std::vector<std::string> pool{"k0", "k1", "k2", "k3", "k4", "k5", "k6", "k7"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> kws{pool[uniform(0, 7)], pool[uniform(0, 7)]};
    std::vector<std::string> pol;
    for (const auto& a : attrs)
      if (uniform(0, 2) == 0) pol.push_back(a);
    if (pol.empty()) pol.push_back(attrs[uniform(0, 3)]);
    if (kws[0] == kws[1]) kws.pop_back();
    w.publish("r" + std::to_string(i), kws, pol, static_cast<std::uint32_t>(uniform(1, 4)));
  }
  std::size_t searches = 0, sse_total = 0, abe_total = 0;
  for (int q = 0; q < 200; ++q) {
    const auto consent = w.owner.consent(pool[uniform(0, 7)], random_subset(4));
    const auto b = w.user.begin_request(w.rng);
    std::vector<CredentialGrant> grants;
    for (const auto& aa : w.authorities)
      if (uniform(0, 3)) grants.push_back(aa->issue(w.user.gid(), w.user.credential_request(b, aa->attribute_id())));
    const auto before = w.server->abe_verification_count();
    const auto resp = w.server->search(w.user.search_request(consent, b, grants));
    ++searches;
    sse_total += resp.stats.sse_matches;
    abe_total += resp.stats.abe_verifications;
    c.expect(resp.stats.abe_verifications <= resp.stats.sse_matches, "ABE <= SSE");
    c.expect(w.server->abe_verification_count() - before == resp.stats.abe_verifications, "counter agrees");
    c.expect(resp.matches.size() + resp.failures.size() <= resp.stats.sse_matches, "results only from SSE hits");
  }
  std::ostringstream os;
  os << "1000 records, " << searches << " searches, " << abe_total << " ABE vs " << sse_total << " SSE";
  return from(c, os.str());
}

// --- 7. scaling -----------------------------------------------------------------

bool same_response(const PairingContext& ctx, const SearchResponse& a, const SearchResponse& b) {
  if (a.matches.size() != b.matches.size() || a.failures != b.failures || !(a.stats == b.stats)) return false;
  for (std::size_t i = 0; i < a.matches.size(); ++i) {
    const auto& x = a.matches[i];
    const auto& y = b.matches[i];
    if (x.record_id != y.record_id || encode_payload(x.payload) != encode_payload(y.payload) ||
        ctx.encode(x.recovery.wrapped_key) != ctx.encode(y.recovery.wrapped_key))
      return false;
  }
  return true;
}

Outcome criterion_scaling() {
  Checks c;
  World w(property_ctx(), 2, "scaling", {"A1", "A2"});
  const auto req = w.search_request("bp", Subset{1, 2});
  const std::size_t sizes[] = {1000, 2000, 4000, 8000};
  constexpr int kReps = 15;
  std::vector<double> xs, ys;
  std::size_t published = 0;
  for (const std::size_t n : sizes) {
    for (; published < n; ++published) {
      const bool hit = published % 4 == 0;
      w.publish("p", {hit ? "bp" : "other"}, published % 2 ? std::vector<std::string>{"A1"}
                                                           : std::vector<std::string>{"A1", "A2"},
                static_cast<std::uint32_t>(1 + published % 2));
    }
    std::vector<double> times;
    SearchResponse serial;
    for (int r = 0; r < kReps; ++r) {
      const auto t0 = Clock::now();
      serial = w.server->search_serial(req);
      times.push_back(seconds_since(t0));
    }
    std::nth_element(times.begin(), times.begin() + kReps / 2, times.end());
    xs.push_back(static_cast<double>(n));
    ys.push_back(times[kReps / 2]);
    c.expect(serial.stats.candidates == n && serial.matches.size() == n / 4, "search covers every record");
    c.expect(same_response(w.ctx(), serial, w.server->search(req, 4)), "4 workers match serial");
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
  c.expect(r2 >= 0.95, "linear fit R^2 >= 0.95");
  std::ostringstream os;
  os.precision(4);
  os << "oracle backend, median of " << kReps << ": ";
  for (std::size_t i = 0; i < xs.size(); ++i) os << xs[i] << "->" << ys[i] * 1e3 << "ms ";
  os << "R^2=" << r2 << " (>= 0.95)";
  return from(c, os.str());
}

// --- 8. re-encryption gate --------------------------------------------------------

std::vector<Subset> all_subsets(std::size_t n) {
  std::vector<Subset> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::uint32_t> m;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) m.push_back(i + 1);
    out.emplace_back(m);
  }
  return out;
}

Outcome criterion_gate() {
  Checks c;
  constexpr std::size_t kSets = 3;
  World w(property_ctx(), kSets, "gate", {"A1", "A2"});
  std::vector<RecordId> ids;
  std::map<RecordId, std::vector<std::string>> keywords;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> kws{"kw" + std::to_string(i), "shared"};
    ids.push_back(w.publish("r" + std::to_string(i), kws, {"A1"}, static_cast<std::uint32_t>(1 + i % kSets)));
    keywords[ids.back()] = kws;
  }
  const auto snapshot = [&] {
    std::map<RecordId, Bytes> out;
    for (auto id : ids) out[id] = encode_record(w.ctx(), *w.server->fetch(id));
    return out;
  };
  const auto& sk = w.owner.secrets().sse;
  const auto& pks = w.params.pks;
  const auto subsets = all_subsets(kSets);
  std::size_t rejected = 0, accepted = 0;

  auto state = snapshot();
  for (auto id : ids) {
    const DataRecord current = *w.server->fetch(id);
    UpdateSpec spec;
    spec.keywords = std::vector<std::string>{"replaced"};
    spec.plaintext = Bytes{'x'};
    const UpdateRequest base = w.owner.update_request(current, Subset{current.set_index}, spec, w.rng);
    const auto reject = [&](UpdateRequest req, const std::string& what) {
      c.expect_code([&] { w.server->reencrypt(req); }, ErrorCode::update_rejected, what);
      ++rejected;
    };
    for (const auto& subset : subsets) {
      auto kws = keywords[id];
      kws.push_back(w.owner.secrets().owner_id);
      for (const auto& kw : kws) {
        auto req = base;
        req.rtk = consent_search_token(w.ctx(), sk, kw, subset, pks);
        reject(req, "search token as RTk");
      }
      if (!subset.contains(current.set_index)) {
        auto req = base;
        req.rtk = make_update_token(w.ctx(), sk, w.owner.secrets().update_id, subset, pks);
        reject(req, "RTk over a subset without the record");
      }
      for (const auto& declared : subsets) {
        if (declared == subset || !subset.contains(current.set_index)) continue;
        auto req = base;
        req.rtk = make_update_token(w.ctx(), sk, w.owner.secrets().update_id, subset, pks);
        req.rtk.subset = declared;
        reject(req, "RTk with a wrong declared subset");
      }
    }
    c.expect(snapshot() == state, "rejections leave every record byte-identical");
  }
  for (auto id : ids) {
    for (const auto& subset : subsets) {
      const DataRecord current = *w.server->fetch(id);
      if (!subset.contains(current.set_index)) continue;
      UpdateSpec spec;
      spec.keywords = std::vector<std::string>{"v" + std::to_string(accepted)};
      const auto req = w.owner.update_request(current, subset, spec, w.rng);
      c.expect(w.server->reencrypt(req) == id, "valid RTk accepted");
      ++accepted;
      auto next = snapshot();
      c.expect(next[id] != state[id], "accepted update replaces elements");
      state[id] = next[id];
      c.expect(next == state, "other records untouched");
    }
  }
  std::ostringstream os;
  os << "20 records, " << rejected << " rejected, " << accepted << " accepted";
  return from(c, os.str());
}

// --- 9. backend equivalence ---------------------------------------------------------

std::vector<bool> equivalence_script(const PairingContext& ctx) {
  std::vector<bool> out;
  std::mt19937_64 pick(99);
  auto u = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(pick); };
  const auto attrs = attribute_names(3);
  World w(ctx, 3, "equivalence", attrs);
  w.authorities[0]->enroll("gid-bob");
  UserActor bob(w.params, "gid-bob");
  const std::vector<std::string> pool{"bp", "bq", "hr"};

  std::vector<RecordId> ids;
  for (int i = 0; i < 6; ++i) {
    std::vector<std::string> pol;
    for (const auto& a : attrs)
      if (u(0, 1)) pol.push_back(a);
    if (pol.empty()) pol.push_back("A1");
    ids.push_back(w.publish("e" + std::to_string(i), {pool[u(0, 2)]}, pol, static_cast<std::uint32_t>(u(1, 3))));
  }
  const auto handles = w.aa_handles();
  const auto record_outcomes = [&](const UserRequestResult& r) {
    for (auto id : ids) {
      out.push_back(std::any_of(r.plaintexts.begin(), r.plaintexts.end(), [&](const auto& p) { return p.first == id; }));
      out.push_back(std::any_of(r.failures.begin(), r.failures.end(), [&](const auto& f) { return f.record_id == id; }));
    }
  };
  for (int q = 0; q < 6; ++q) {
    const auto& who = q % 2 ? bob : w.user;
    record_outcomes(user_request(who, w.owner, handles, *w.server, pool[u(0, 2)], random_subset(3), w.rng));
  }

  // Layer-level outcomes: subset binding, collusion and recovery with pooled tokens.
  const auto consent = w.owner.consent("bp", Subset{1, 2, 3});
  const auto ba = w.user.begin_request(w.rng);
  const auto bb = bob.begin_request(w.rng);
  std::vector<CredentialGrant> alice, pooled;
  for (const auto& aa : w.authorities) alice.push_back(aa->issue(w.user.gid(), w.user.credential_request(ba, aa->attribute_id())));
  pooled = alice;
  pooled[0] = w.authorities[0]->issue(bob.gid(), bob.credential_request(bb, "A1"));
  for (auto id : ids) {
    const DataRecord r = *w.server->fetch(id);
    const auto req = w.user.search_request(consent, ba, alice);
    out.push_back(sse_match_any(ctx, r.sse, req.token.token, w.params.pks.product(ctx, req.token.subset)).has_value());
    SearchToken lying = req.token;
    lying.subset = Subset{r.set_index};
    out.push_back(sse_match_any(ctx, r.sse, lying.token, w.params.pks.product(ctx, lying.subset)).has_value());
    std::vector<AttributeCredential> creds, mixed;
    for (const auto& attr : r.abe.attrs) {
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i] != attr) continue;
        creds.push_back(alice[i].credential);
        mixed.push_back(pooled[i].credential);
      }
    }
    out.push_back(abe_verify(ctx, r.abe, creds, ba.blinded));
    out.push_back(abe_verify(ctx, r.abe, mixed, ba.blinded));
    const SearchMatch match{r.record_id, r.abe.attrs, r.recovery, r.payload, consent.search.subset};
    for (const auto* grants : {&alice, &pooled}) {
      bool opened = false;
      try {
        w.user.open(match, w.user.decryption_tokens(consent, ba, *grants));
        opened = true;
      } catch (const Error&) {
      }
      out.push_back(opened);
    }
  }

  // Update gate.
  UpdateSpec spec;
  spec.keywords = std::vector<std::string>{"hr"};
  for (auto id : {ids[0], ids[3]}) {
    const DataRecord r = *w.server->fetch(id);
    auto req = w.owner.update_request(r, Subset{r.set_index}, spec, w.rng);
    auto forged = req;
    forged.rtk = consent_search_token(ctx, w.owner.secrets().sse, "bp", Subset{r.set_index}, w.params.pks);
    bool forged_ok = true;
    try {
      w.server->reencrypt(forged);
    } catch (const Error&) {
      forged_ok = false;
    }
    out.push_back(forged_ok);
    out.push_back(w.server->reencrypt(req) == id);
  }
  record_outcomes(user_request(w.user, w.owner, handles, *w.server, "hr", Subset{1, 2, 3}, w.rng));
  return out;
}

Outcome criterion_equivalence() {
  Checks c;
  picker().seed(7);
  const auto oracle_out = equivalence_script(property_ctx());
  picker().seed(7);
  const auto curve_out = equivalence_script(PairingContext::curve());
  const auto trues = std::count(oracle_out.begin(), oracle_out.end(), true);
  c.expect(oracle_out == curve_out, "identical outcomes");
  c.expect(trues > 0 && trues < static_cast<long>(oracle_out.size()), "script exercises both outcomes");
  std::ostringstream os;
  os << oracle_out.size() << " outcomes (" << trues << " true)";
  return from(c, os.str());
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no limit
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "worked vectors", 1.0, criterion_worked_vectors},
      {2, "SSE completeness and soundness", 30.0, criterion_sse},
      {3, "subset binding", 0, criterion_subset_binding},
      {4, "anti-collusion", 0, criterion_collusion},
      {5, "key-recovery round trip", 0, criterion_recovery},
      {6, "pipeline ordering", 0, criterion_pipeline},
      {7, "linear search scaling", 120.0, criterion_scaling},
      {8, "re-encryption gate", 0, criterion_gate},
      {9, "backend equivalence", 0, criterion_equivalence},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool in_time = cr.limit_s == 0 || dt < cr.limit_s;
    const bool ok = o.ok && in_time;
    failed += !ok;
    char timing[96];
    if (cr.limit_s > 0)
      std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s%s)", dt, cr.limit_s, in_time ? "" : ", EXCEEDED");
    else
      std::snprintf(timing, sizeof timing, "%.2f s", dt);
    std::cout << (ok ? "PASS" : "FAIL") << " [" << cr.id << "] " << cr.name << ": " << o.detail << "; " << timing
              << std::endl;
  }
  return failed ? 1 : 0;
}
