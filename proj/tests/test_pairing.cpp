#include "doctest.h"
#include "support/exponent_oracle.hpp"
#include "support/helpers.hpp"
#include "tlsaa/pairing.hpp"

using namespace tlsaa;
using oracle::dlog;
using oracle::s;

TEST_SUITE("pairing") {

TEST_CASE("oracle pairing multiplies exponents") {
  const auto ctx = PairingContext::oracle(oracle::kQ);
  const auto gt = ctx.pair(ctx.exp_generator(Side::left, s(2)), ctx.exp_generator(Side::right, s(3)));
  CHECK(dlog(ctx, gt) == 6);

  const auto y = ctx.exp_generator(Side::right, s(77));
  CHECK(ctx.is_identity(ctx.pair(ctx.exp_generator(Side::left, s(0)), y)));

  for (std::uint64_t u : {3u, 17u, 90u}) {
    for (std::uint64_t v : {5u, 44u}) {
      CHECK(ctx.pair(ctx.exp_generator(Side::left, s(u)), ctx.exp_generator(Side::right, s(v))) ==
            ctx.pair(ctx.exp_generator(Side::left, s(v)), ctx.exp_generator(Side::right, s(u))));
    }
  }
}

TEST_CASE("scalar inverse") {
  const auto ctx = PairingContext::oracle(oracle::kQ);
  CHECK(oracle::inverse(7) == 29);
  CHECK(ctx.inverse(s(7)) == s(29));
  CHECK(ctx.inverse(s(1)) == s(1));
  CHECK_ERROR_CODE(ctx.inverse(s(0)), ErrorCode::non_invertible);
  for (std::uint64_t a = 1; a < oracle::kQ; ++a) CHECK(ctx.inverse(s(a)) == s(oracle::inverse(a)));

  const auto curve = PairingContext::curve();
  SystemRandom rng;
  for (int i = 0; i < 20; ++i) {
    const Scalar a = curve.random_scalar(rng);
    CHECK(curve.mul(a, curve.inverse(a)) == Scalar::from_u64(1));
  }
  CHECK_ERROR_CODE(curve.inverse(Scalar{}), ErrorCode::non_invertible);
}

TEST_CASE("group and target group laws at q = 101") {
  const auto ctx = PairingContext::oracle(oracle::kQ);
  const auto prod = ctx.mul(ctx.exp_generator(Side::left, s(70)), ctx.exp_generator(Side::left, s(35)));
  CHECK(dlog(ctx, prod) == 4);

  const auto x = ctx.exp_generator(Side::right, s(58));
  CHECK(ctx.exp(x, s(1)) == x);

  const auto q = ctx.gt_div(ctx.gt_exp(ctx.gt_generator(), s(88)), ctx.gt_exp(ctx.gt_generator(), s(80)));
  CHECK(dlog(ctx, q) == 8);
}

TEST_CASE("sides are never mixed") {
  for (const auto& ctx : {PairingContext::oracle(oracle::kQ), PairingContext::curve()}) {
    const auto l = ctx.generator(Side::left);
    const auto r = ctx.generator(Side::right);
    CHECK_ERROR_CODE(ctx.mul(l, r), ErrorCode::side_mismatch);
    CHECK_ERROR_CODE(ctx.pair(r, l), ErrorCode::side_mismatch);
    CHECK_ERROR_CODE(ctx.pair(l, l), ErrorCode::side_mismatch);
    CHECK_ERROR_CODE(ctx.exp(GroupElement{}, s(2)), ErrorCode::malformed);
  }
  const auto oracle_ctx = PairingContext::oracle(oracle::kQ);
  const auto curve = PairingContext::curve();
  CHECK_ERROR_CODE(curve.mul(oracle_ctx.generator(Side::left), curve.generator(Side::left)),
                   ErrorCode::backend_mismatch);
}

TEST_CASE("hash to group is deterministic and domain separated") {
  for (const auto& ctx : {PairingContext::oracle(testing::kPropertyQ), PairingContext::curve()}) {
    const auto a = ctx.hash_to_group(HashDomain::keyword, "bp");
    CHECK(a == ctx.hash_to_group(HashDomain::keyword, "bp"));
    CHECK(a.side() == Side::left);
    CHECK_FALSE(a == ctx.hash_to_group(HashDomain::gid, "bp"));
    CHECK_FALSE(a == ctx.hash_to_group(HashDomain::update_id, "bp"));
    CHECK_FALSE(a == ctx.hash_to_group(HashDomain::keyword, "bq"));
    CHECK_FALSE(ctx.is_identity(a));
  }
  const auto worked = oracle::worked_context();
  CHECK(dlog(worked, worked.hash_to_group(HashDomain::keyword, "bp")) == 5);
  // Overrides apply per domain only.
  CHECK(dlog(worked, worked.hash_to_group(HashDomain::gid, "bp")) != 5);
}

TEST_CASE("bilinearity, multiplicativity and non-degeneracy") {
  SeededRandom rng(std::string_view("bilinear"));
  struct Case {
    PairingContext ctx;
    int trials;
  };
  for (const auto& [ctx, trials] : {Case{PairingContext::oracle(testing::kPropertyQ), 1000},
                                    Case{PairingContext::curve(), 1000}}) {
    CAPTURE(to_string(ctx.backend()));
    const auto g1 = ctx.generator(Side::left);
    const auto g2 = ctx.generator(Side::right);
    const auto base = ctx.pair(g1, g2);
    CHECK_FALSE(ctx.is_identity(base));
    CHECK(base == ctx.gt_generator());
    int failures = 0;
    for (int i = 0; i < trials; ++i) {
      const Scalar u = ctx.random_scalar(rng);
      const Scalar v = ctx.random_scalar(rng);
      if (!(ctx.pair(ctx.exp(g1, u), ctx.exp(g2, v)) == ctx.gt_exp(base, ctx.mul(u, v)))) ++failures;
    }
    CHECK(failures == 0);

    for (int i = 0; i < 20; ++i) {
      const auto x1 = ctx.exp(g1, ctx.random_scalar(rng));
      const auto x2 = ctx.exp(g1, ctx.random_scalar(rng));
      const auto y = ctx.exp(g2, ctx.random_scalar(rng));
      CHECK(ctx.pair(ctx.mul(x1, x2), y) == ctx.gt_mul(ctx.pair(x1, y), ctx.pair(x2, y)));
      const auto y2 = ctx.exp(g2, ctx.random_scalar(rng));
      CHECK(ctx.pair(x1, ctx.mul(y, y2)) == ctx.gt_mul(ctx.pair(x1, y), ctx.pair(x1, y2)));
      const std::pair<GroupElement, GroupElement> terms[] = {{x1, y}, {x2, y2}};
      CHECK(ctx.pair_product(terms) == ctx.gt_mul(ctx.pair(x1, y), ctx.pair(x2, y2)));
    }
  }
}

TEST_CASE("identity elements pair to the GT identity on the curve") {
  const auto ctx = PairingContext::curve();
  CHECK(ctx.is_identity(ctx.pair(ctx.identity(Side::left), ctx.generator(Side::right))));
  CHECK(ctx.is_identity(ctx.pair(ctx.generator(Side::left), ctx.identity(Side::right))));
  CHECK(ctx.is_identity(ctx.exp_generator(Side::left, Scalar{})));
  CHECK(ctx.is_identity(ctx.gt_exp(ctx.gt_generator(), Scalar{})));
  // GT has order r: raising the generator to r lands on the identity.
  CHECK(ctx.is_identity(ctx.gt_exp(ctx.gt_generator(), ctx.order())));
}

TEST_CASE("canonical encodings round-trip and equal elements encode equally") {
  SeededRandom rng(std::string_view("encode"));
  for (const auto& ctx : {PairingContext::oracle(testing::kPropertyQ), PairingContext::curve()}) {
    CAPTURE(to_string(ctx.backend()));
    for (int i = 0; i < 10; ++i) {
      const Scalar a = ctx.random_scalar(rng);
      const Scalar b = ctx.random_scalar(rng);
      CHECK(ctx.decode_scalar(ctx.encode(a)) == a);
      for (Side side : {Side::left, Side::right}) {
        const auto x = ctx.exp_generator(side, a);
        const auto bytes = ctx.encode(x);
        CHECK(bytes.size() == ctx.group_size(side));
        CHECK(ctx.decode_group(side, bytes) == x);
      }
      // Two routes to e(g,g)^{ab} must serialize identically.
      const auto route1 = ctx.pair(ctx.exp_generator(Side::left, a), ctx.exp_generator(Side::right, b));
      const auto route2 = ctx.gt_exp(ctx.gt_exp(ctx.gt_generator(), b), a);
      CHECK(ctx.encode(route1) == ctx.encode(route2));
      CHECK(ctx.decode_gt(ctx.encode(route1)) == route1);
    }
    CHECK(ctx.decode_group(Side::left, ctx.encode(ctx.identity(Side::left))) == ctx.identity(Side::left));
    Bytes garbage(ctx.gt_size(), 0xff);
    CHECK_ERROR_CODE(ctx.decode_gt(garbage), ErrorCode::malformed);
    CHECK_ERROR_CODE(ctx.decode_group(Side::left, Bytes(3, 0)), ErrorCode::malformed);
    CHECK_ERROR_CODE(ctx.decode_scalar(Bytes(ctx.scalar_size(), 0xff)), ErrorCode::malformed);
  }
  const auto curve = PairingContext::curve();
  Bytes bad_point(curve.group_size(Side::left), 0x11);
  CHECK_ERROR_CODE(curve.decode_group(Side::left, bad_point), ErrorCode::malformed);
}

TEST_CASE("parameter header round-trips and pins the backend") {
  for (const auto& ctx : {PairingContext::oracle(oracle::kQ), PairingContext::oracle(testing::kPropertyQ),
                          PairingContext::curve()}) {
    const Bytes header = ctx.header();
    const auto back = PairingContext::from_header(header);
    CHECK(back.backend() == ctx.backend());
    CHECK(back.order() == ctx.order());
    CHECK(back.same_parameters(ctx));
    Bytes tampered = header;
    tampered.back() ^= 1;
    CHECK_ERROR_CODE(PairingContext::from_header(tampered), ErrorCode::malformed);
  }
  CHECK_FALSE(PairingContext::oracle(oracle::kQ).same_parameters(PairingContext::oracle(103)));
  CHECK_ERROR_CODE(PairingContext::oracle(100), ErrorCode::invalid_argument);
}

TEST_CASE("random scalars are nonzero and reduced") {
  SeededRandom rng(std::uint64_t{7});
  const auto ctx = PairingContext::oracle(oracle::kQ);
  bool seen[oracle::kQ] = {};
  for (int i = 0; i < 5000; ++i) {
    const Scalar x = ctx.random_scalar(rng);
    REQUIRE(ctx.is_valid(x));
    REQUIRE_FALSE(x.is_zero());
    seen[x.low()] = true;
  }
  CHECK_FALSE(seen[0]);
  for (std::uint64_t v = 1; v < oracle::kQ; ++v) CHECK(seen[v]);
}

TEST_CASE("seeded randomness is reproducible") {
  SeededRandom a(std::string_view("seed")), b(std::string_view("seed")), c(std::string_view("other"));
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
}

}  // TEST_SUITE
