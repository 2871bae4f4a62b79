#include <set>

#include "doctest.h"
#include "support/exponent_oracle.hpp"
#include "support/helpers.hpp"
#include "tlsaa/sse.hpp"

using namespace tlsaa;
using oracle::dlog;
using oracle::s;

namespace {

const std::vector<std::string> kBp{"bp"};

SetPublicKeys worked_pks(const PairingContext& ctx) {
  const Scalar a[] = {s(10), s(20)};
  return make_set_public_keys(ctx, a);
}

}  // namespace

TEST_SUITE("sse") {

TEST_CASE("subset parsing and validation") {
  const Subset a = Subset::parse("3,1,3");
  CHECK(a.indices() == std::vector<std::uint32_t>{1, 3});
  CHECK(a.to_string() == "1,3");
  CHECK(a.contains(3));
  CHECK_FALSE(a.contains(2));
  CHECK_NOTHROW(a.validate(3));
  CHECK_ERROR_CODE(a.validate(2), ErrorCode::bad_set_index);
  CHECK_ERROR_CODE(Subset{0}.validate(5), ErrorCode::bad_set_index);
  CHECK_ERROR_CODE(Subset{}.validate(5), ErrorCode::empty_subset);
  CHECK_ERROR_CODE(Subset::parse("1,,2"), ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(Subset::parse("x"), ErrorCode::invalid_argument);
}

TEST_CASE("server setup") {
  const auto ctx = oracle::worked_context();
  const auto pks = worked_pks(ctx);
  REQUIRE(pks.size() == 2);
  CHECK(dlog(ctx, pks.at(1)) == 10);
  CHECK(dlog(ctx, pks.at(2)) == 20);
  CHECK_ERROR_CODE(pks.at(3), ErrorCode::bad_set_index);

  SeededRandom rng1(std::uint64_t{1}), rng2(std::uint64_t{2});
  const auto one = server_setup(ctx, 1, rng1);
  CHECK(one.pks.size() == 1);
  const auto p1 = server_setup(PairingContext::oracle(testing::kPropertyQ), 4, rng1);
  const auto p2 = server_setup(PairingContext::oracle(testing::kPropertyQ), 4, rng2);
  for (std::uint32_t i = 1; i <= 4; ++i) {
    CHECK_FALSE(p1.pks.at(i) == p2.pks.at(i));
    for (std::uint32_t j = i + 1; j <= 4; ++j) CHECK_FALSE(p1.pks.at(i) == p1.pks.at(j));
  }
  CHECK_ERROR_CODE(server_setup(ctx, 0, rng1), ErrorCode::invalid_argument);
  const Scalar dup[] = {s(4), s(4)};
  CHECK_ERROR_CODE(make_set_public_keys(ctx, dup), ErrorCode::invalid_argument);
}

TEST_CASE("worked vector: encryption, tokens and match") {
  const auto ctx = oracle::worked_context();
  const auto pks = worked_pks(ctx);
  const OwnerSseKey owner{s(7)};
  const auto elems = sse_encrypt(ctx, owner, kBp, "owner-1", "rtk-1", s(3));

  // Expected exponents from the test-side oracle, not the library.
  CHECK(dlog(ctx, elems.stk_transferor) == oracle::mod(3 * oracle::inverse(7)));
  CHECK(dlog(ctx, elems.stk_transferor) == 87);
  CHECK(dlog(ctx, elems.kw_modifier) == 3);
  REQUIRE(elems.tagged_keywords.size() == 2);
  CHECK(dlog(ctx, elems.tagged_keywords[0]) == 15);
  const auto owner_h = dlog(ctx, ctx.hash_to_group(HashDomain::keyword, "owner-1"));
  CHECK(dlog(ctx, elems.tagged_keywords[1]) == oracle::mod(owner_h * 3));
  const auto upd_h = dlog(ctx, ctx.hash_to_group(HashDomain::update_id, "rtk-1"));
  CHECK(dlog(ctx, elems.update_keyword) == oracle::mod(upd_h * 3));
  CHECK(elems.stk_transferor.side() == Side::right);
  CHECK(elems.kw_modifier.side() == Side::right);

  const auto t1 = consent_search_token(ctx, owner, "bp", Subset{1}, pks);
  CHECK(t1.token.side() == Side::left);
  CHECK(dlog(ctx, t1.token) == 4);
  const auto t12 = consent_search_token(ctx, owner, "bp", Subset{1, 2}, pks);
  CHECK(dlog(ctx, t12.token) == 43);
  CHECK(consent_search_token(ctx, owner, "bp", Subset{1}, pks).token == t1.token);

  CHECK(dlog(ctx, ctx.pair(t1.token, elems.stk_transferor)) == 45);
  CHECK(sse_match(ctx, elems, t1, 0, pks));
  CHECK(sse_match(ctx, elems, t12, 0, pks));
  CHECK(sse_match_any(ctx, elems, t1.token, pks.product(ctx, t1.subset)) == std::optional<std::size_t>(0));

  SearchToken lying = t1;
  lying.subset = Subset{2};
  CHECK(oracle::mod(20 * 3 + 15) == 75);
  CHECK_FALSE(sse_match(ctx, elems, lying, 0, pks));
  CHECK_FALSE(sse_match_any(ctx, elems, lying.token, pks.product(ctx, lying.subset)).has_value());

  const auto other = consent_search_token(ctx, owner, "bq", Subset{1}, pks);
  CHECK(dlog(ctx, other.token) == oracle::mod((10 + 6) * 7));
  CHECK_FALSE(sse_match(ctx, elems, other, 0, pks));

  // The owner id is searchable as one more tag.
  const auto by_owner = consent_search_token(ctx, owner, "owner-1", Subset{1}, pks);
  CHECK(sse_match_any(ctx, elems, by_owner.token, pks.product(ctx, Subset{1})) == std::optional<std::size_t>(1));

  CHECK_ERROR_CODE(consent_search_token(ctx, owner, "bp", Subset{}, pks), ErrorCode::empty_subset);
  CHECK_ERROR_CODE(consent_search_token(ctx, owner, "bp", Subset{3}, pks), ErrorCode::bad_set_index);
}

TEST_CASE("unit key and nonce") {
  const auto ctx = oracle::worked_context();
  const auto elems = sse_encrypt(ctx, OwnerSseKey{s(1)}, kBp, "o", "u", s(1));
  CHECK(elems.stk_transferor == ctx.generator(Side::right));
  CHECK(elems.kw_modifier == ctx.generator(Side::right));
  CHECK(elems.tagged_keywords[0] == ctx.pair(ctx.hash_to_group(HashDomain::keyword, "bp"), ctx.generator(Side::right)));
}

TEST_CASE("encryption preconditions") {
  const auto ctx = oracle::worked_context();
  const std::vector<std::string> none;
  CHECK_ERROR_CODE(sse_encrypt(ctx, OwnerSseKey{s(7)}, none, "o", "u", s(3)), ErrorCode::invalid_argument);
  CHECK_ERROR_CODE(sse_encrypt(ctx, OwnerSseKey{s(7)}, kBp, "o", "u", s(0)), ErrorCode::non_invertible);
  CHECK_ERROR_CODE(sse_encrypt(ctx, OwnerSseKey{s(0)}, kBp, "o", "u", s(3)), ErrorCode::non_invertible);
}

TEST_CASE("fresh nonce changes every element") {
  const auto ctx = PairingContext::oracle(testing::kPropertyQ);
  SeededRandom rng(std::string_view("unlink"));
  const auto owner = OwnerSseKey::generate(ctx, rng);
  const std::vector<std::string> kws{"alpha", "beta", "gamma"};
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = sse_encrypt(ctx, owner, kws, "o", "u", ctx.random_scalar(rng));
    const auto b = sse_encrypt(ctx, owner, kws, "o", "u", ctx.random_scalar(rng));
    std::set<Bytes> left{ctx.encode(a.stk_transferor), ctx.encode(a.kw_modifier)};
    std::set<Bytes> gt{ctx.encode(a.update_keyword)};
    for (const auto& t : a.tagged_keywords) gt.insert(ctx.encode(t));
    CHECK_FALSE(left.count(ctx.encode(b.stk_transferor)));
    CHECK_FALSE(left.count(ctx.encode(b.kw_modifier)));
    CHECK_FALSE(gt.count(ctx.encode(b.update_keyword)));
    for (const auto& t : b.tagged_keywords) CHECK_FALSE(gt.count(ctx.encode(t)));
  }
}

TEST_CASE("completeness, soundness and subset binding on random parameters") {
  for (const auto& [ctx, trials] :
       {std::pair{PairingContext::oracle(testing::kPropertyQ), 500}, std::pair{PairingContext::curve(), 20}}) {
    CAPTURE(to_string(ctx.backend()));
    SeededRandom rng(std::string_view("sse-props"));
    int bad = 0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = 1 + rng.next_u64() % 8;
      const auto params = server_setup(ctx, n, rng);
      const auto owner = OwnerSseKey::generate(ctx, rng);
      const std::string w = "kw-" + std::to_string(rng.next_u64());
      const std::vector<std::string> kws{w};
      const auto elems = sse_encrypt(ctx, owner, kws, "owner", "upd", ctx.random_scalar(rng));
      std::vector<std::uint32_t> idx;
      for (std::uint32_t i = 1; i <= n; ++i)
        if (rng.next_u64() & 1) idx.push_back(i);
      if (idx.empty()) idx.push_back(1);
      const Subset subset(idx);
      const auto token = consent_search_token(ctx, owner, w, subset, params.pks);
      if (!sse_match(ctx, elems, token, 0, params.pks)) ++bad;
      const auto wrong = consent_search_token(ctx, owner, w + "'", subset, params.pks);
      if (sse_match(ctx, elems, wrong, 0, params.pks)) ++bad;
      if (n > 1) {
        // Flip one membership bit; S' != S and never empty since n > 1.
        std::vector<std::uint32_t> other;
        const auto flip = static_cast<std::uint32_t>(1 + rng.next_u64() % n);
        for (std::uint32_t i = 1; i <= n; ++i)
          if (subset.contains(i) != (i == flip)) other.push_back(i);
        if (other.empty()) other.push_back(flip == 1 ? 2 : 1);
        SearchToken lying = token;
        lying.subset = Subset(other);
        if (sse_match(ctx, elems, lying, 0, params.pks)) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("keyword soundness is exhaustive over a small universe") {
  const auto ctx = PairingContext::oracle(testing::kPropertyQ);
  SeededRandom rng(std::string_view("universe"));
  const auto params = server_setup(ctx, 3, rng);
  const auto owner = OwnerSseKey::generate(ctx, rng);
  const std::vector<std::string> universe{"bp", "bq", "heart", "lung", "x", "y", "z", "owner-ish"};
  std::vector<SseRecordElements> records;
  for (const auto& w : universe) records.push_back(sse_encrypt(ctx, owner, std::vector{w}, "o", "u", ctx.random_scalar(rng)));
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const auto token = consent_search_token(ctx, owner, universe[i], Subset{1, 3}, params.pks);
    for (std::size_t j = 0; j < universe.size(); ++j) CHECK(sse_match(ctx, records[j], token, 0, params.pks) == (i == j));
  }
}

TEST_CASE("update token uses its own hash domain") {
  const auto ctx = oracle::worked_context();
  const auto pks = worked_pks(ctx);
  const OwnerSseKey owner{s(7)};
  const auto elems = sse_encrypt(ctx, owner, kBp, "owner-1", "rtk-1", s(3));
  CHECK(verify_update_token(ctx, elems, make_update_token(ctx, owner, "rtk-1", Subset{1}, pks), pks));
  CHECK_FALSE(verify_update_token(ctx, elems, consent_search_token(ctx, owner, "rtk-1", Subset{1}, pks), pks));
  CHECK_FALSE(verify_update_token(ctx, elems, consent_search_token(ctx, owner, "bp", Subset{1}, pks), pks));
  SearchToken lying = make_update_token(ctx, owner, "rtk-1", Subset{1}, pks);
  lying.subset = Subset{1, 2};
  CHECK_FALSE(verify_update_token(ctx, elems, lying, pks));
  CHECK_FALSE(verify_update_token(ctx, elems, make_update_token(ctx, OwnerSseKey{s(8)}, "rtk-1", Subset{1}, pks), pks));
}

TEST_CASE("basic mode is advanced mode without the subset modifier") {
  const auto ctx = oracle::worked_context();
  const auto pks = worked_pks(ctx);
  const OwnerSseKey owner{s(7)};
  const auto elems = sse_encrypt(ctx, owner, kBp, "owner-1", "rtk-1", s(3));
  const auto basic = consent_search_token_basic(ctx, owner, "bp");
  CHECK(dlog(ctx, basic) == oracle::mod(5 * 7));
  CHECK(sse_match_basic(ctx, elems, basic, 0));
  CHECK_FALSE(sse_match_basic(ctx, elems, consent_search_token_basic(ctx, owner, "bq"), 0));
  // Advanced token = basic token · (∏ pk)^sk.
  const auto adv = consent_search_token(ctx, owner, "bp", Subset{1, 2}, pks);
  CHECK(adv.token == ctx.mul(basic, ctx.exp(pks.product(ctx, Subset{1, 2}), owner.sk)));
  CHECK_ERROR_CODE(sse_match_basic(ctx, elems, basic, 5), ErrorCode::invalid_argument);
}

}  // TEST_SUITE
