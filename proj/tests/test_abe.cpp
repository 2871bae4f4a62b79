#include "doctest.h"
#include "support/exponent_oracle.hpp"
#include "support/helpers.hpp"
#include "tlsaa/abe.hpp"

using namespace tlsaa;
using oracle::dlog;
using oracle::s;

namespace {

struct Worked {
  PairingContext ctx = oracle::worked_context();
  AttributeKeyPair a1 = attribute_key_pair(ctx, "A1", s(11));
  AttributeKeyPair a2 = attribute_key_pair(ctx, "A2", s(13));
  std::vector<std::string> attrs{"A1", "A2"};
  std::vector<AttributePublicKey> apks{a1.public_key(), a2.public_key()};
  BlindedIdentity blinded = blind_identity(ctx, "alice", s(2));

  AccessPolicyElements policy() const {
    const Scalar nonces[] = {s(4), s(6)};
    return abe_policy_encrypt(ctx, attrs, apks, nonces);
  }
};

}  // namespace

TEST_SUITE("abe") {

TEST_CASE("attribute key pairs") {
  const auto ctx = oracle::worked_context();
  CHECK(dlog(ctx, attribute_key_pair(ctx, "A1", s(11)).apk) == oracle::inverse(11));
  CHECK(dlog(ctx, attribute_key_pair(ctx, "A1", s(11)).apk) == 46);
  CHECK(attribute_key_pair(ctx, "A1", s(1)).apk == ctx.generator(Side::right));
  CHECK(attribute_key_pair(ctx, "A1", s(1)).apk.side() == Side::right);
  CHECK_ERROR_CODE(attribute_key_pair(ctx, "A1", s(0)), ErrorCode::non_invertible);

  const auto big = PairingContext::oracle(testing::kPropertyQ);
  SeededRandom r1(std::uint64_t{1}), r2(std::uint64_t{2});
  const auto k1 = aa_setup(big, "A1", r1);
  const auto k2 = aa_setup(big, "A1", r2);
  CHECK_FALSE(k1.ask == k2.ask);
  CHECK_FALSE(k1.apk == k2.apk);
  CHECK(big.exp(k1.apk, k1.ask) == big.generator(Side::right));
}

TEST_CASE("worked vector: credentials") {
  Worked w;
  CHECK(dlog(w.ctx, w.blinded.element) == 18);
  const auto c1 = issue_credential(w.ctx, w.a1, w.blinded);
  const auto c2 = issue_credential(w.ctx, w.a2, w.blinded);
  CHECK(c1.attribute_id == "A1");
  CHECK(dlog(w.ctx, c1.credential) == oracle::mod((1 + 18) * 11));
  CHECK(dlog(w.ctx, c1.credential) == 7);
  CHECK(dlog(w.ctx, c2.credential) == 45);
  CHECK(dlog(w.ctx, issue_credential_basic(w.ctx, w.a1).credential) == 11);

  CHECK_ERROR_CODE(issue_credential(w.ctx, w.a1, BlindedIdentity{w.ctx.identity(Side::left)}),
                   ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(issue_credential(w.ctx, w.a1, BlindedIdentity{w.ctx.generator(Side::right)}),
                   ErrorCode::invalid_argument);
}

TEST_CASE("worked vector: policy elements") {
  Worked w;
  const auto p = w.policy();
  CHECK(p.attrs == w.attrs);
  REQUIRE(p.ac_transferors.size() == 2);
  CHECK(dlog(w.ctx, p.ac_transferors[0]) == oracle::mod(4 * oracle::inverse(11)));
  CHECK(dlog(w.ctx, p.ac_transferors[0]) == 83);
  CHECK(oracle::inverse(13) == 70);
  CHECK(dlog(w.ctx, p.ac_transferors[1]) == 16);
  CHECK(dlog(w.ctx, p.plcy_modifiers[0]) == 4);
  CHECK(dlog(w.ctx, p.plcy_modifiers[1]) == 6);
  CHECK(dlog(w.ctx, p.plcy) == 10);

  // Input order does not matter; elements follow the sorted attribute list.
  const std::vector<std::string> reversed{"A2", "A1"};
  const Scalar rn[] = {s(6), s(4)};
  const auto q = abe_policy_encrypt(w.ctx, reversed, w.apks, rn);
  CHECK(q.attrs == w.attrs);
  CHECK(q.ac_transferors == p.ac_transferors);

  const std::vector<std::string> single{"A1"};
  const Scalar one[] = {s(1)};
  const auto u = abe_policy_encrypt(w.ctx, single, w.apks, one);
  CHECK(u.ac_transferors[0] == w.a1.apk);
  CHECK(u.plcy_modifiers[0] == w.ctx.generator(Side::right));
  CHECK(u.plcy == w.ctx.gt_generator());

  const Scalar zero[] = {s(0)};
  CHECK_ERROR_CODE(abe_policy_encrypt(w.ctx, single, w.apks, zero), ErrorCode::invalid_argument);
  const std::vector<std::string> unknown{"A9"};
  CHECK_ERROR_CODE(abe_policy_encrypt(w.ctx, unknown, w.apks, one), ErrorCode::bad_attribute);
  const std::vector<std::string> dup{"A1", "A1"};
  const Scalar two[] = {s(1), s(2)};
  CHECK_ERROR_CODE(abe_policy_encrypt(w.ctx, dup, w.apks, two), ErrorCode::bad_attribute);
}

TEST_CASE("worked vector: verification") {
  Worked w;
  const auto p = w.policy();
  const std::vector<AttributeCredential> creds{issue_credential(w.ctx, w.a1, w.blinded),
                                               issue_credential(w.ctx, w.a2, w.blinded)};
  const auto lhs = w.ctx.gt_mul(w.ctx.pair(creds[0].credential, p.ac_transferors[0]),
                                w.ctx.pair(creds[1].credential, p.ac_transferors[1]));
  CHECK(dlog(w.ctx, lhs) == oracle::mod(7 * 83 + 45 * 16));
  CHECK(dlog(w.ctx, lhs) == 89);
  CHECK(oracle::mod(10 + 18 * 4 + 18 * 6) == 89);
  CHECK(abe_verify(w.ctx, p, creds, w.blinded));

  // Credential order is irrelevant; matching is by attribute id.
  const std::vector<AttributeCredential> swapped{creds[1], creds[0]};
  CHECK(abe_verify(w.ctx, p, swapped, w.blinded));

  const auto blinded3 = blind_identity(w.ctx, "alice", s(3));
  CHECK(dlog(w.ctx, blinded3.element) == 27);
  const std::vector<AttributeCredential> mixed{creds[0], issue_credential(w.ctx, w.a2, blinded3)};
  CHECK_FALSE(abe_verify(w.ctx, p, mixed, w.blinded));
  CHECK_FALSE(abe_verify(w.ctx, p, mixed, blinded3));

  const std::vector<AttributeCredential> partial{creds[0]};
  CHECK_ERROR_CODE(abe_verify(w.ctx, p, partial, w.blinded), ErrorCode::incomplete_policy);

  const std::vector<AttributeCredential> basic{issue_credential_basic(w.ctx, w.a1),
                                               issue_credential_basic(w.ctx, w.a2)};
  CHECK(dlog(w.ctx, basic[1].credential) == 13);
  CHECK(abe_verify_basic(w.ctx, p, basic));
  CHECK_FALSE(abe_verify_basic(w.ctx, p, creds));
}

TEST_CASE("basic mode equals advanced mode with identity blinding") {
  Worked w;
  const auto p = w.policy();
  const std::vector<AttributeCredential> basic{issue_credential_basic(w.ctx, w.a1),
                                               issue_credential_basic(w.ctx, w.a2)};
  CHECK(abe_verify(w.ctx, p, basic, BlindedIdentity{w.ctx.identity(Side::left)}));
}

TEST_CASE("completeness and anti-collusion on random parameters") {
  for (const auto& [ctx, trials] :
       {std::pair{PairingContext::oracle(testing::kPropertyQ), 500}, std::pair{PairingContext::curve(), 10}}) {
    CAPTURE(to_string(ctx.backend()));
    SeededRandom rng(std::string_view("abe-props"));
    int bad = 0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t k = 1 + rng.next_u64() % 4;
      std::vector<AttributeKeyPair> kps;
      std::vector<AttributePublicKey> apks;
      std::vector<std::string> attrs;
      std::vector<Scalar> nonces;
      for (std::size_t i = 0; i < k; ++i) {
        kps.push_back(aa_setup(ctx, "attr" + std::to_string(i), rng));
        apks.push_back(kps.back().public_key());
        attrs.push_back(kps.back().attribute_id);
        nonces.push_back(ctx.random_scalar(rng));
      }
      const auto policy = abe_policy_encrypt(ctx, attrs, apks, nonces);
      const std::string gid = "user-" + std::to_string(rng.next_u64());
      const auto u = blind_identity(ctx, gid, ctx.random_scalar(rng));
      // Second identity: same GID with a new nonce, or a different GID.
      const auto v = blind_identity(ctx, (t & 1) ? gid : gid + "-other", ctx.random_scalar(rng));
      CHECK_FALSE(u.element == v.element);
      std::vector<AttributeCredential> good, mixed;
      const std::size_t swap_at = rng.next_u64() % k;
      for (std::size_t i = 0; i < k; ++i) {
        good.push_back(issue_credential(ctx, kps[i], u));
        mixed.push_back(i == swap_at ? issue_credential(ctx, kps[i], v) : good.back());
      }
      if (!abe_verify(ctx, policy, good, u)) ++bad;
      if (abe_verify(ctx, policy, mixed, u)) ++bad;
      if (k > 1 && abe_verify(ctx, policy, mixed, v)) ++bad;
    }
    CHECK(bad == 0);
  }
}

}  // TEST_SUITE
