#include "doctest.h"
#include "support/exponent_oracle.hpp"
#include "support/helpers.hpp"
#include "tlsaa/key_recovery.hpp"

using namespace tlsaa;
using oracle::dlog;
using oracle::s;

namespace {

struct Worked {
  PairingContext ctx = oracle::worked_context();
  SetPublicKeys pks = [this] {
    const Scalar a[] = {s(10), s(20)};
    return make_set_public_keys(ctx, a);
  }();
  OwnerRecoveryKey owner{s(5)};
  RecoveryAttributeKeyPair a1 = recovery_attribute_key_pair(ctx, "A1", s(17));
  RecoveryAttributeKeyPair a2 = recovery_attribute_key_pair(ctx, "A2", s(19));
  std::vector<std::string> attrs{"A1", "A2"};
  std::vector<RecoveryAttributePublicKey> apks{a1.public_key(), a2.public_key()};
  KeyMask mask{ctx.gt_exp(ctx.gt_generator(), s(50))};

  KeyRecoveryElements wrap(const KeyMask& m) const {
    return wrap_key(ctx, owner, attrs, apks, RecoveryNonces{s(8), {s(12), s(14)}}, m);
  }

  DecryptionTokenSet tokens(std::string_view gid, std::uint64_t ru, const Subset& subset) const {
    DecryptionTokenSet t;
    t.blinded_r = ctx.exp(ctx.hash_to_group(HashDomain::gid, gid), s(ru));
    t.owner_token = consent_decrypt_token(ctx, owner, subset, pks);
    t.subset = subset;
    t.aa_tokens = {issue_decrypt_token(ctx, a1, t.blinded_r), issue_decrypt_token(ctx, a2, t.blinded_r)};
    return t;
  }
};

}  // namespace

TEST_SUITE("key_recovery") {

TEST_CASE("worked vector: wrapping") {
  Worked w;
  const auto e = w.wrap(w.mask);
  CHECK(oracle::inverse(5) == 81);
  CHECK(dlog(w.ctx, e.dtk_transferor) == oracle::mod(8 * 81));
  CHECK(dlog(w.ctx, e.dtk_transferor) == 42);
  CHECK(dlog(w.ctx, e.dtk_owner_modifier) == 8);
  REQUIRE(e.dtk_aa_transferors.size() == 2);
  CHECK(dlog(w.ctx, e.dtk_aa_transferors[0]) == 72);
  CHECK(dlog(w.ctx, e.dtk_aa_transferors[1]) == oracle::mod(14 * oracle::inverse(19)));
  CHECK(dlog(w.ctx, e.dtk_aa_transferors[1]) == 22);
  CHECK(dlog(w.ctx, e.dtk_aa_modifiers[0]) == 12);
  CHECK(dlog(w.ctx, e.dtk_aa_modifiers[1]) == 14);
  CHECK(dlog(w.ctx, e.wrapped_key) == 84);
  CHECK(e.attrs == w.attrs);

  const auto id = w.wrap(KeyMask{w.ctx.gt_identity()});
  CHECK(dlog(w.ctx, id.wrapped_key) == 12 + 14 + 8);

  const std::vector<std::string> single{"A1"};
  const auto unit = wrap_key(w.ctx, w.owner, single, w.apks, RecoveryNonces{s(1), {s(1)}}, w.mask);
  CHECK(unit.wrapped_key == w.ctx.gt_mul(w.mask.element, w.ctx.gt_exp(w.ctx.gt_generator(), s(2))));
}

TEST_CASE("wrap preconditions") {
  Worked w;
  const Scalar reused[] = {s(3), s(12)};
  CHECK_ERROR_CODE(wrap_key(w.ctx, w.owner, w.attrs, w.apks, RecoveryNonces{s(8), {s(12), s(14)}}, w.mask, reused),
                   ErrorCode::nonce_reuse);
  const Scalar reused_r[] = {s(8)};
  CHECK_ERROR_CODE(wrap_key(w.ctx, w.owner, w.attrs, w.apks, RecoveryNonces{s(8), {s(12), s(14)}}, w.mask, reused_r),
                   ErrorCode::nonce_reuse);
  const Scalar unrelated[] = {s(3), s(4), s(6)};
  CHECK_NOTHROW(wrap_key(w.ctx, w.owner, w.attrs, w.apks, RecoveryNonces{s(8), {s(12), s(14)}}, w.mask, unrelated));
  CHECK_ERROR_CODE(wrap_key(w.ctx, w.owner, w.attrs, w.apks, RecoveryNonces{s(0), {s(12), s(14)}}, w.mask),
                   ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(wrap_key(w.ctx, w.owner, w.attrs, w.apks, RecoveryNonces{s(8), {s(12)}}, w.mask),
                   ErrorCode::invalid_argument);
  const std::vector<std::string> unknown{"A1", "A7"};
  CHECK_ERROR_CODE(wrap_key(w.ctx, w.owner, unknown, w.apks, RecoveryNonces{s(8), {s(12), s(14)}}, w.mask),
                   ErrorCode::bad_attribute);
}

TEST_CASE("worked vector: tokens") {
  Worked w;
  CHECK(dlog(w.ctx, consent_decrypt_token(w.ctx, w.owner, Subset{1}, w.pks)) == 55);
  CHECK(dlog(w.ctx, consent_decrypt_token(w.ctx, w.owner, Subset{1, 2}, w.pks)) == 54);
  CHECK(dlog(w.ctx, consent_decrypt_token(w.ctx, OwnerRecoveryKey{s(1)}, Subset{1}, w.pks)) == 11);
  CHECK_ERROR_CODE(consent_decrypt_token(w.ctx, w.owner, Subset{}, w.pks), ErrorCode::empty_subset);

  const auto t = w.tokens("alice", 8, Subset{1});
  CHECK(dlog(w.ctx, t.blinded_r) == 72);
  CHECK(t.aa_tokens[0].attribute_id == "A1");
  CHECK(dlog(w.ctx, t.aa_tokens[0].token) == oracle::mod(73 * 17));
  CHECK(dlog(w.ctx, t.aa_tokens[0].token) == 29);
  CHECK(dlog(w.ctx, t.aa_tokens[1].token) == 74);
  CHECK(dlog(w.ctx, issue_decrypt_token_basic(w.ctx, w.a1).token) == 17);
  CHECK_ERROR_CODE(issue_decrypt_token(w.ctx, w.a1, w.ctx.identity(Side::left)), ErrorCode::invalid_argument);
}

TEST_CASE("worked vector: recovery") {
  Worked w;
  const auto e = w.wrap(w.mask);
  const auto t = w.tokens("alice", 8, Subset{1});

  // Intermediate exponents, computed by the test oracle.
  const auto owner_side = w.ctx.gt_div(w.ctx.pair(t.owner_token, e.dtk_transferor),
                                       w.ctx.pair(w.pks.product(w.ctx, Subset{1}), e.dtk_owner_modifier));
  CHECK(oracle::mod(55 * 42) == 88);
  CHECK(dlog(w.ctx, owner_side) == 8);
  const auto aa_side = w.ctx.gt_div(
      w.ctx.gt_mul(w.ctx.pair(t.aa_tokens[0].token, e.dtk_aa_transferors[0]),
                   w.ctx.pair(t.aa_tokens[1].token, e.dtk_aa_transferors[1])),
      w.ctx.gt_mul(w.ctx.pair(t.blinded_r, e.dtk_aa_modifiers[0]), w.ctx.pair(t.blinded_r, e.dtk_aa_modifiers[1])));
  CHECK(dlog(w.ctx, aa_side) == 26);

  const KeyMask m = recover_key(w.ctx, e, t, w.pks);
  CHECK(dlog(w.ctx, m.element) == 50);
  CHECK(m == w.mask);

  // Subset {1,2} tokens work for this record as well.
  CHECK(recover_key(w.ctx, e, w.tokens("alice", 8, Subset{1, 2}), w.pks) == w.mask);

  CHECK(recover_key(w.ctx, w.wrap(KeyMask{w.ctx.gt_identity()}), t, w.pks).element == w.ctx.gt_identity());

  // Tokens under a different GID mixed with alice's: residual factor stays.
  auto mixed = t;
  mixed.aa_tokens[1] = w.tokens("mallory", 8, Subset{1}).aa_tokens[1];
  CHECK_FALSE(recover_key(w.ctx, e, mixed, w.pks) == w.mask);

  auto incomplete = t;
  incomplete.aa_tokens.pop_back();
  CHECK_ERROR_CODE(recover_key(w.ctx, e, incomplete, w.pks), ErrorCode::incomplete_tokens);

  const std::vector<DecryptToken> basic{issue_decrypt_token_basic(w.ctx, w.a1), issue_decrypt_token_basic(w.ctx, w.a2)};
  CHECK(recover_key_basic(w.ctx, e, consent_decrypt_token_basic(w.ctx, w.owner), basic) == w.mask);
  CHECK(dlog(w.ctx, consent_decrypt_token_basic(w.ctx, w.owner)) == 5);
}

TEST_CASE("generated recovery keys differ from the search-layer keys") {
  // q = 3 leaves two nonzero scalars, so a collision would be drawn often.
  const auto ctx = PairingContext::oracle(3);
  SeededRandom rng(std::uint64_t{3});
  for (int i = 0; i < 100; ++i) {
    const auto sse = OwnerSseKey::generate(ctx, rng);
    CHECK_FALSE(OwnerRecoveryKey::generate(ctx, sse, rng).sk_dtk == sse.sk);
    const auto abe = aa_setup(ctx, "A", rng);
    CHECK_FALSE(recovery_aa_setup(ctx, abe, rng).ask_dtk == abe.ask);
  }
}

TEST_CASE("round trip, layer separation and collusion on random parameters") {
  for (const auto& [ctx, trials] :
       {std::pair{PairingContext::oracle(testing::kPropertyQ), 500}, std::pair{PairingContext::curve(), 5}}) {
    CAPTURE(to_string(ctx.backend()));
    SeededRandom rng(std::string_view("recovery-props"));
    int bad = 0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = 1 + rng.next_u64() % 8;
      const auto params = server_setup(ctx, n, rng);
      const auto sse = OwnerSseKey::generate(ctx, rng);
      const auto owner = OwnerRecoveryKey::generate(ctx, sse, rng);
      const std::size_t k = 1 + rng.next_u64() % 4;
      std::vector<AttributeKeyPair> abe;
      std::vector<RecoveryAttributeKeyPair> kps;
      std::vector<RecoveryAttributePublicKey> apks;
      std::vector<std::string> attrs;
      RecoveryNonces nonces{ctx.random_scalar(rng), {}};
      for (std::size_t i = 0; i < k; ++i) {
        abe.push_back(aa_setup(ctx, "attr" + std::to_string(i), rng));
        kps.push_back(recovery_aa_setup(ctx, abe.back(), rng));
        apks.push_back(kps.back().public_key());
        attrs.push_back(kps.back().attribute_id);
        nonces.attributes.push_back(ctx.random_scalar(rng));
      }
      const KeyMask mask{ctx.random_gt(rng)};
      const auto elems = wrap_key(ctx, owner, attrs, apks, nonces, mask);
      const Subset subset{static_cast<std::uint32_t>(1 + rng.next_u64() % n)};

      const auto gid = "user-" + std::to_string(rng.next_u64());
      DecryptionTokenSet tokens;
      tokens.blinded_r = ctx.exp(ctx.hash_to_group(HashDomain::gid, gid), ctx.random_scalar(rng));
      tokens.owner_token = consent_decrypt_token(ctx, owner, subset, params.pks);
      tokens.subset = subset;
      for (const auto& kp : kps) tokens.aa_tokens.push_back(issue_decrypt_token(ctx, kp, tokens.blinded_r));
      if (!(recover_key(ctx, elems, tokens, params.pks) == mask)) ++bad;

      // Search-layer secrets in place of recovery secrets.
      auto sse_owner = tokens;
      sse_owner.owner_token = ctx.exp(ctx.mul(params.pks.product(ctx, subset), ctx.generator(Side::left)), sse.sk);
      if (recover_key(ctx, elems, sse_owner, params.pks) == mask) ++bad;
      auto abe_tokens = tokens;
      const std::size_t pick = rng.next_u64() % k;
      abe_tokens.aa_tokens[pick].token = issue_credential(ctx, abe[pick], BlindedIdentity{tokens.blinded_r}).credential;
      if (recover_key(ctx, elems, abe_tokens, params.pks) == mask) ++bad;

      // One token bound to another blinded identity.
      const auto other = ctx.exp(ctx.hash_to_group(HashDomain::gid, (t & 1) ? gid : gid + "x"), ctx.random_scalar(rng));
      auto mixed = tokens;
      mixed.aa_tokens[pick] = issue_decrypt_token(ctx, kps[pick], other);
      if (recover_key(ctx, elems, mixed, params.pks) == mask) ++bad;
    }
    CHECK(bad == 0);
  }
}

}  // TEST_SUITE
