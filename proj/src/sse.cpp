#include "tlsaa/sse.hpp"

#include <algorithm>
#include <charconv>

#include "tlsaa/errors.hpp"

namespace tlsaa {

Subset::Subset(std::vector<std::uint32_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

Subset Subset::parse(std::string_view text) {
  std::vector<std::uint32_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty()) {
      fail(ErrorCode::invalid_argument, "bad subset item '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return Subset(std::move(out));
}

std::string Subset::to_string() const {
  std::string out;
  for (auto i : indices_) {
    if (!out.empty()) out += ',';
    out += std::to_string(i);
  }
  return out;
}

bool Subset::contains(std::uint32_t index) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

void Subset::validate(std::size_t n) const {
  if (indices_.empty()) fail(ErrorCode::empty_subset, "subset is empty");
  if (indices_.front() == 0 || indices_.back() > n) {
    fail(ErrorCode::bad_set_index, "subset {" + to_string() + "} outside 1.." + std::to_string(n));
  }
}

const GroupElement& SetPublicKeys::at(std::uint32_t index) const {
  if (index == 0 || index > keys.size()) fail(ErrorCode::bad_set_index, "no set " + std::to_string(index));
  return keys[index - 1];
}

GroupElement SetPublicKeys::product(const PairingContext& ctx, const Subset& subset) const {
  subset.validate(keys.size());
  GroupElement acc = at(subset.indices().front());
  for (std::size_t k = 1; k < subset.indices().size(); ++k) acc = ctx.mul(acc, at(subset.indices()[k]));
  return acc;
}

SetPublicKeys make_set_public_keys(const PairingContext& ctx, std::span<const Scalar> exponents) {
  if (exponents.empty()) fail(ErrorCode::invalid_argument, "need at least one data set");
  SetPublicKeys pks;
  for (const Scalar& a : exponents) {
    if (a.is_zero() || !ctx.is_valid(a)) fail(ErrorCode::invalid_argument, "set exponent must be in [1, q)");
    GroupElement pk = ctx.exp_generator(Side::left, a);
    if (std::find(pks.keys.begin(), pks.keys.end(), pk) != pks.keys.end()) {
      fail(ErrorCode::invalid_argument, "set public keys must be distinct");
    }
    pks.keys.push_back(std::move(pk));
  }
  return pks;
}

ServerParameters server_setup(const PairingContext& ctx, std::size_t n, RandomSource& rng) {
  if (n == 0) fail(ErrorCode::invalid_argument, "need at least one data set");
  std::vector<Scalar> exponents;
  while (exponents.size() < n) {
    Scalar a = ctx.random_scalar(rng);
    if (std::find(exponents.begin(), exponents.end(), a) == exponents.end()) exponents.push_back(a);
  }
  return {ctx, make_set_public_keys(ctx, exponents)};
}

OwnerSseKey OwnerSseKey::generate(const PairingContext& ctx, RandomSource& rng) {
  return {ctx.random_scalar(rng)};
}

SseRecordElements sse_encrypt(const PairingContext& ctx, const OwnerSseKey& owner,
                              std::span<const std::string> keywords, std::string_view owner_id,
                              std::string_view update_id, const Scalar& r) {
  if (keywords.empty()) fail(ErrorCode::invalid_argument, "a record needs at least one keyword");
  if (owner_id.empty() || update_id.empty()) fail(ErrorCode::invalid_argument, "owner id and update id required");
  if (r.is_zero()) fail(ErrorCode::non_invertible, "zero record nonce");
  const Scalar r_over_sk = ctx.mul(r, ctx.inverse(owner.sk));

  SseRecordElements out;
  out.stk_transferor = ctx.exp_generator(Side::right, r_over_sk);
  out.kw_modifier = ctx.exp_generator(Side::right, r);
  // e(H(w), g)^r == e(H(w), g^r)
  out.tagged_keywords.reserve(keywords.size() + 1);
  for (const auto& w : keywords) {
    out.tagged_keywords.push_back(ctx.pair(ctx.hash_to_group(HashDomain::keyword, w), out.kw_modifier));
  }
  out.tagged_keywords.push_back(ctx.pair(ctx.hash_to_group(HashDomain::keyword, owner_id), out.kw_modifier));
  out.update_keyword = ctx.pair(ctx.hash_to_group(HashDomain::update_id, update_id), out.kw_modifier);
  return out;
}

namespace {

SearchToken subset_token(const PairingContext& ctx, const OwnerSseKey& owner, HashDomain domain,
                         std::string_view word, const Subset& subset, const SetPublicKeys& pks) {
  const GroupElement base = ctx.mul(pks.product(ctx, subset), ctx.hash_to_group(domain, word));
  return {ctx.exp(base, owner.sk), subset};
}

bool subset_check(const PairingContext& ctx, const SseRecordElements& elems, const SearchToken& token,
                  const GtElement& expected_tag, const SetPublicKeys& pks) {
  const GroupElement product = pks.product(ctx, token.subset);
  const GtElement lhs = ctx.pair(token.token, elems.stk_transferor);
  return lhs == ctx.gt_mul(ctx.pair(product, elems.kw_modifier), expected_tag);
}

}  // namespace

SearchToken consent_search_token(const PairingContext& ctx, const OwnerSseKey& owner,
                                 std::string_view keyword, const Subset& subset,
                                 const SetPublicKeys& pks) {
  return subset_token(ctx, owner, HashDomain::keyword, keyword, subset, pks);
}

SearchToken make_update_token(const PairingContext& ctx, const OwnerSseKey& owner,
                              std::string_view update_id, const Subset& subset,
                              const SetPublicKeys& pks) {
  return subset_token(ctx, owner, HashDomain::update_id, update_id, subset, pks);
}

bool sse_match(const PairingContext& ctx, const SseRecordElements& elems, const SearchToken& token,
               std::size_t keyword_index, const SetPublicKeys& pks) {
  if (keyword_index >= elems.tagged_keywords.size()) fail(ErrorCode::invalid_argument, "no such tagged keyword");
  return subset_check(ctx, elems, token, elems.tagged_keywords[keyword_index], pks);
}

std::optional<std::size_t> sse_match_any(const PairingContext& ctx, const SseRecordElements& elems,
                                         const GroupElement& token, const GroupElement& subset_product) {
  // pair(token, g^{r/sk}) / pair(∏pk, g^r) is the candidate tag.
  const GtElement tag =
      ctx.gt_div(ctx.pair(token, elems.stk_transferor), ctx.pair(subset_product, elems.kw_modifier));
  for (std::size_t j = 0; j < elems.tagged_keywords.size(); ++j) {
    if (elems.tagged_keywords[j] == tag) return j;
  }
  return std::nullopt;
}

bool verify_update_token(const PairingContext& ctx, const SseRecordElements& elems, const SearchToken& rtk,
                         const SetPublicKeys& pks) {
  return subset_check(ctx, elems, rtk, elems.update_keyword, pks);
}

GroupElement consent_search_token_basic(const PairingContext& ctx, const OwnerSseKey& owner,
                                        std::string_view keyword) {
  return ctx.exp(ctx.hash_to_group(HashDomain::keyword, keyword), owner.sk);
}

bool sse_match_basic(const PairingContext& ctx, const SseRecordElements& elems, const GroupElement& token,
                     std::size_t keyword_index) {
  if (keyword_index >= elems.tagged_keywords.size()) fail(ErrorCode::invalid_argument, "no such tagged keyword");
  return ctx.pair(token, elems.stk_transferor) == elems.tagged_keywords[keyword_index];
}

void validate(const PairingContext& ctx, const SseRecordElements& elems) {
  const bool ok = ctx.is_valid(elems.stk_transferor) && elems.stk_transferor.side() == Side::right &&
                  ctx.is_valid(elems.kw_modifier) && elems.kw_modifier.side() == Side::right &&
                  !elems.tagged_keywords.empty() && ctx.is_valid(elems.update_keyword) &&
                  std::all_of(elems.tagged_keywords.begin(), elems.tagged_keywords.end(),
                              [&](const GtElement& t) { return ctx.is_valid(t); });
  if (!ok) fail(ErrorCode::bad_record, "incomplete SSE elements");
}

}  // namespace tlsaa
