#include "tlsaa/key_recovery.hpp"

#include <algorithm>
#include <numeric>

#include "tlsaa/errors.hpp"

namespace tlsaa {

OwnerRecoveryKey OwnerRecoveryKey::generate(const PairingContext& ctx, const OwnerSseKey& sse, RandomSource& rng) {
  for (;;) {
    Scalar s = ctx.random_scalar(rng);
    if (s != sse.sk) return {s};
  }
}

RecoveryAttributeKeyPair recovery_attribute_key_pair(const PairingContext& ctx, std::string attribute_id,
                                                     const Scalar& ask_dtk) {
  if (attribute_id.empty()) fail(ErrorCode::bad_attribute, "empty attribute id");
  return {std::move(attribute_id), ask_dtk, ctx.exp_generator(Side::right, ctx.inverse(ask_dtk))};
}

RecoveryAttributeKeyPair recovery_aa_setup(const PairingContext& ctx, const AttributeKeyPair& abe, RandomSource& rng) {
  for (;;) {
    Scalar s = ctx.random_scalar(rng);
    if (s != abe.ask) return recovery_attribute_key_pair(ctx, abe.attribute_id, s);
  }
}

KeyRecoveryElements wrap_key(const PairingContext& ctx, const OwnerRecoveryKey& owner,
                             std::span<const std::string> policy,
                             std::span<const RecoveryAttributePublicKey> apks, const RecoveryNonces& nonces,
                             const KeyMask& mask, std::span<const Scalar> other_layer_nonces) {
  if (policy.size() != nonces.attributes.size()) fail(ErrorCode::invalid_argument, "one nonce per policy attribute");
  canonical_policy(policy);
  auto reused = [&](const Scalar& s) {
    return std::find(other_layer_nonces.begin(), other_layer_nonces.end(), s) != other_layer_nonces.end();
  };
  if (nonces.owner.is_zero()) fail(ErrorCode::invalid_argument, "zero recovery nonce");
  if (reused(nonces.owner)) fail(ErrorCode::nonce_reuse, "recovery nonce r' reused from another layer");

  KeyRecoveryElements out;
  out.dtk_transferor = ctx.exp_generator(Side::right, ctx.mul(nonces.owner, ctx.inverse(owner.sk_dtk)));
  out.dtk_owner_modifier = ctx.exp_generator(Side::right, nonces.owner);

  std::vector<std::size_t> order(policy.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return policy[a] < policy[b]; });

  Scalar exponent = nonces.owner;
  for (std::size_t k : order) {
    const Scalar& s = nonces.attributes[k];
    if (s.is_zero()) fail(ErrorCode::invalid_argument, "zero recovery nonce for " + policy[k]);
    if (reused(s)) fail(ErrorCode::nonce_reuse, "recovery nonce for " + policy[k] + " reused from another layer");
    auto it = std::find_if(apks.begin(), apks.end(),
                           [&](const RecoveryAttributePublicKey& p) { return p.attribute_id == policy[k]; });
    if (it == apks.end()) fail(ErrorCode::bad_attribute, "no recovery public key for attribute " + policy[k]);
    out.attrs.push_back(policy[k]);
    out.dtk_aa_transferors.push_back(ctx.exp(it->apk_dtk, s));
    out.dtk_aa_modifiers.push_back(ctx.exp_generator(Side::right, s));
    exponent = ctx.add(exponent, s);
  }
  out.wrapped_key = ctx.gt_mul(mask.element, ctx.gt_exp(ctx.gt_generator(), exponent));
  return out;
}

GroupElement consent_decrypt_token(const PairingContext& ctx, const OwnerRecoveryKey& owner, const Subset& subset,
                                   const SetPublicKeys& pks) {
  return ctx.exp(ctx.mul(pks.product(ctx, subset), ctx.generator(Side::left)), owner.sk_dtk);
}

GroupElement consent_decrypt_token_basic(const PairingContext& ctx, const OwnerRecoveryKey& owner) {
  return ctx.exp_generator(Side::left, owner.sk_dtk);
}

DecryptToken issue_decrypt_token(const PairingContext& ctx, const RecoveryAttributeKeyPair& kp,
                                 const GroupElement& blinded_r) {
  if (blinded_r.side() != Side::left || ctx.is_identity(blinded_r)) {
    fail(ErrorCode::invalid_argument, "blinded identity must be a non-identity left element");
  }
  return {kp.attribute_id, ctx.exp(ctx.mul(ctx.generator(Side::left), blinded_r), kp.ask_dtk)};
}

DecryptToken issue_decrypt_token_basic(const PairingContext& ctx, const RecoveryAttributeKeyPair& kp) {
  return {kp.attribute_id, ctx.exp_generator(Side::left, kp.ask_dtk)};
}

namespace {

const DecryptToken& token_for(std::span<const DecryptToken> tokens, const std::string& attr) {
  auto it = std::find_if(tokens.begin(), tokens.end(), [&](const DecryptToken& t) { return t.attribute_id == attr; });
  if (it == tokens.end()) fail(ErrorCode::incomplete_tokens, "no decrypt token for attribute " + attr);
  return *it;
}

}  // namespace

KeyMask recover_key(const PairingContext& ctx, const KeyRecoveryElements& elems, const DecryptionTokenSet& tokens,
                    const SetPublicKeys& pks) {
  if (!ctx.is_valid(tokens.owner_token) || !ctx.is_valid(tokens.blinded_r)) {
    fail(ErrorCode::incomplete_tokens, "owner decrypt token or blinded identity missing");
  }
  if (tokens.subset.empty()) fail(ErrorCode::incomplete_tokens, "decrypt tokens carry no subset");

  // e(g,g)^{r'} = pair(DTk'_o, g^{r'/sk'}) / pair(∏pk, g^{r'})
  std::vector<std::pair<GroupElement, GroupElement>> num, den;
  num.emplace_back(tokens.owner_token, elems.dtk_transferor);
  den.emplace_back(pks.product(ctx, tokens.subset), elems.dtk_owner_modifier);
  // e(g,g)^{Σ s'_i} = ∏ pair(DTk_AA_i, g^{s'_i/a'_i}) / ∏ pair(H(GID)^{r'_u}, g^{s'_i})
  for (std::size_t i = 0; i < elems.attrs.size(); ++i) {
    num.emplace_back(token_for(tokens.aa_tokens, elems.attrs[i]).token, elems.dtk_aa_transferors[i]);
    den.emplace_back(tokens.blinded_r, elems.dtk_aa_modifiers[i]);
  }
  const GtElement blinding = ctx.gt_div(ctx.pair_product(num), ctx.pair_product(den));
  return {ctx.gt_div(elems.wrapped_key, blinding)};
}

KeyMask recover_key_basic(const PairingContext& ctx, const KeyRecoveryElements& elems,
                          const GroupElement& owner_token, std::span<const DecryptToken> aa_tokens) {
  std::vector<std::pair<GroupElement, GroupElement>> terms;
  terms.emplace_back(owner_token, elems.dtk_transferor);
  for (std::size_t i = 0; i < elems.attrs.size(); ++i) {
    terms.emplace_back(token_for(aa_tokens, elems.attrs[i]).token, elems.dtk_aa_transferors[i]);
  }
  return {ctx.gt_div(elems.wrapped_key, ctx.pair_product(terms))};
}

void validate(const PairingContext& ctx, const KeyRecoveryElements& elems) {
  const std::size_t n = elems.attrs.size();
  bool ok = n > 0 && elems.dtk_aa_transferors.size() == n && elems.dtk_aa_modifiers.size() == n &&
            ctx.is_valid(elems.dtk_transferor) && elems.dtk_transferor.side() == Side::right &&
            ctx.is_valid(elems.dtk_owner_modifier) && elems.dtk_owner_modifier.side() == Side::right &&
            ctx.is_valid(elems.wrapped_key) && std::is_sorted(elems.attrs.begin(), elems.attrs.end()) &&
            std::adjacent_find(elems.attrs.begin(), elems.attrs.end()) == elems.attrs.end();
  for (std::size_t i = 0; ok && i < n; ++i) {
    ok = ctx.is_valid(elems.dtk_aa_transferors[i]) && elems.dtk_aa_transferors[i].side() == Side::right &&
         ctx.is_valid(elems.dtk_aa_modifiers[i]) && elems.dtk_aa_modifiers[i].side() == Side::right;
  }
  if (!ok) fail(ErrorCode::bad_record, "incomplete key recovery elements");
}

}  // namespace tlsaa
