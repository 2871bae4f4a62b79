#include "doctest.h"
#include "support/exponent_oracle.hpp"
#include "support/helpers.hpp"
#include "tlsaa/payload.hpp"

using namespace tlsaa;
using oracle::s;

namespace {

KeyMask mask_of(const PairingContext& ctx, std::uint64_t e) { return {ctx.gt_exp(ctx.gt_generator(), s(e))}; }

Bytes random_bytes(RandomSource& rng, std::size_t n) {
  Bytes out(n);
  rng.fill(out);
  return out;
}

}  // namespace

TEST_SUITE("payload") {

TEST_CASE("key derivation") {
  for (const auto& ctx : {oracle::worked_context(), PairingContext::curve()}) {
    CHECK(derive_key(ctx, mask_of(ctx, 50)) == derive_key(ctx, mask_of(ctx, 50)));
    CHECK_FALSE(derive_key(ctx, mask_of(ctx, 50)) == derive_key(ctx, mask_of(ctx, 51)));
    const SymmetricKey id = derive_key(ctx, KeyMask{ctx.gt_identity()});
    CHECK_FALSE(id == SymmetricKey{});
  }
  // Same exponent, different backend: unrelated keys.
  CHECK_FALSE(derive_key(oracle::worked_context(), mask_of(oracle::worked_context(), 50)) ==
              derive_key(PairingContext::curve(), mask_of(PairingContext::curve(), 50)));
}

TEST_CASE("round trips") {
  const auto ctx = oracle::worked_context();
  SeededRandom rng(std::string_view("payload"));
  const SymmetricKey key = derive_key(ctx, mask_of(ctx, 50));

  const auto empty = encrypt_payload(key, {}, rng);
  CHECK(empty.body.size() == kPayloadTagSize);
  CHECK(decrypt_payload(key, empty).empty());

  const Bytes big = random_bytes(rng, 1u << 20);
  const auto ct = encrypt_payload(key, big, rng);
  CHECK(ct.body.size() == big.size() + kPayloadTagSize);
  CHECK(decrypt_payload(key, ct) == big);

  for (std::size_t n : {1u, 15u, 16u, 17u, 1000u, (1u << 16) + 3, 1u << 20}) {
    const Bytes p = random_bytes(rng, n);
    CHECK(decrypt_payload(key, decode_payload(encode_payload(encrypt_payload(key, p, rng)))) == p);
  }
  CHECK_FALSE(encrypt_payload(key, big, rng).nonce == ct.nonce);
}

TEST_CASE("wrong key or tampering fails authentication") {
  const auto ctx = oracle::worked_context();
  SeededRandom rng(std::string_view("tamper"));
  const SymmetricKey key = derive_key(ctx, mask_of(ctx, 50));
  const Bytes p = random_bytes(rng, 100);
  const auto ct = encrypt_payload(key, p, rng);
  CHECK_ERROR_CODE(decrypt_payload(derive_key(ctx, mask_of(ctx, 51)), ct), ErrorCode::authentication_failure);

  auto flipped = ct;
  flipped.body[3] ^= 1;
  CHECK_ERROR_CODE(decrypt_payload(key, flipped), ErrorCode::authentication_failure);
  auto renonced = ct;
  renonced.nonce[0] ^= 1;
  CHECK_ERROR_CODE(decrypt_payload(key, renonced), ErrorCode::authentication_failure);
  auto truncated = ct;
  truncated.body.resize(kPayloadTagSize - 1);
  CHECK_ERROR_CODE(decrypt_payload(key, truncated), ErrorCode::authentication_failure);
}

TEST_CASE("envelope layout") {
  const auto ctx = oracle::worked_context();
  SeededRandom rng(std::string_view("envelope"));
  const SymmetricKey key = derive_key(ctx, mask_of(ctx, 7));
  const Bytes p{'a', 'b', 'c'};
  const auto ct = encrypt_payload(key, p, rng);
  const Bytes env = encode_payload(ct);
  REQUIRE(env.size() == 1 + 12 + 3 + 16);
  CHECK(env[0] == static_cast<std::uint8_t>(PayloadScheme::aes256_gcm));
  CHECK(std::equal(ct.nonce.begin(), ct.nonce.end(), env.begin() + 1));
  CHECK(decode_payload(env) == ct);

  Bytes bad_scheme = env;
  bad_scheme[0] = 9;
  CHECK_ERROR_CODE(decode_payload(bad_scheme), ErrorCode::malformed);
  CHECK_ERROR_CODE(decode_payload(Bytes(20, 1)), ErrorCode::malformed);
}

}  // TEST_SUITE
