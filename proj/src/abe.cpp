#include "tlsaa/abe.hpp"

#include <algorithm>
#include <numeric>

#include "tlsaa/errors.hpp"

namespace tlsaa {

AttributeKeyPair attribute_key_pair(const PairingContext& ctx, std::string attribute_id, const Scalar& ask) {
  if (attribute_id.empty()) fail(ErrorCode::bad_attribute, "empty attribute id");
  return {std::move(attribute_id), ask, ctx.exp_generator(Side::right, ctx.inverse(ask))};
}

AttributeKeyPair aa_setup(const PairingContext& ctx, std::string attribute_id, RandomSource& rng) {
  return attribute_key_pair(ctx, std::move(attribute_id), ctx.random_scalar(rng));
}

BlindedIdentity blind_identity(const PairingContext& ctx, std::string_view gid, const Scalar& r) {
  if (r.is_zero()) fail(ErrorCode::invalid_argument, "zero blinding nonce");
  return {ctx.exp(ctx.hash_to_group(HashDomain::gid, gid), r)};
}

AttributeCredential issue_credential(const PairingContext& ctx, const AttributeKeyPair& kp,
                                     const BlindedIdentity& blinded) {
  if (blinded.element.side() != Side::left || ctx.is_identity(blinded.element)) {
    fail(ErrorCode::invalid_argument, "blinded identity must be a non-identity left element");
  }
  return {kp.attribute_id, ctx.exp(ctx.mul(ctx.generator(Side::left), blinded.element), kp.ask)};
}

AttributeCredential issue_credential_basic(const PairingContext& ctx, const AttributeKeyPair& kp) {
  return {kp.attribute_id, ctx.exp_generator(Side::left, kp.ask)};
}

std::vector<std::string> canonical_policy(std::span<const std::string> attrs) {
  std::vector<std::string> out(attrs.begin(), attrs.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) fail(ErrorCode::bad_attribute, "duplicate policy attribute");
  if (out.empty()) fail(ErrorCode::bad_attribute, "empty policy");
  return out;
}

AccessPolicyElements abe_policy_encrypt(const PairingContext& ctx, std::span<const std::string> attrs,
                                        std::span<const AttributePublicKey> apks,
                                        std::span<const Scalar> nonces) {
  if (attrs.size() != nonces.size()) fail(ErrorCode::invalid_argument, "one nonce per policy attribute");
  canonical_policy(attrs);

  std::vector<std::size_t> order(attrs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return attrs[a] < attrs[b]; });

  AccessPolicyElements out;
  Scalar sum;
  for (std::size_t k : order) {
    const Scalar& s = nonces[k];
    if (s.is_zero()) fail(ErrorCode::invalid_argument, "zero policy nonce for " + attrs[k]);
    auto it = std::find_if(apks.begin(), apks.end(), [&](const AttributePublicKey& p) { return p.attribute_id == attrs[k]; });
    if (it == apks.end()) fail(ErrorCode::bad_attribute, "no public key for attribute " + attrs[k]);
    out.attrs.push_back(attrs[k]);
    out.ac_transferors.push_back(ctx.exp(it->apk, s));
    out.plcy_modifiers.push_back(ctx.exp_generator(Side::right, s));
    sum = ctx.add(sum, s);
  }
  out.plcy = ctx.gt_exp(ctx.gt_generator(), sum);
  return out;
}

namespace {

const AttributeCredential& credential_for(std::span<const AttributeCredential> creds, const std::string& attr) {
  auto it = std::find_if(creds.begin(), creds.end(), [&](const AttributeCredential& c) { return c.attribute_id == attr; });
  if (it == creds.end()) fail(ErrorCode::incomplete_policy, "no credential for attribute " + attr);
  return *it;
}

}  // namespace

bool abe_verify(const PairingContext& ctx, const AccessPolicyElements& elems,
                std::span<const AttributeCredential> creds, const BlindedIdentity& blinded) {
  std::vector<std::pair<GroupElement, GroupElement>> lhs, modifier;
  lhs.reserve(elems.attrs.size());
  modifier.reserve(elems.attrs.size());
  for (std::size_t i = 0; i < elems.attrs.size(); ++i) {
    lhs.emplace_back(credential_for(creds, elems.attrs[i]).credential, elems.ac_transferors[i]);
    modifier.emplace_back(blinded.element, elems.plcy_modifiers[i]);
  }
  return ctx.pair_product(lhs) == ctx.gt_mul(elems.plcy, ctx.pair_product(modifier));
}

bool abe_verify_basic(const PairingContext& ctx, const AccessPolicyElements& elems,
                      std::span<const AttributeCredential> creds) {
  std::vector<std::pair<GroupElement, GroupElement>> lhs;
  for (std::size_t i = 0; i < elems.attrs.size(); ++i) {
    lhs.emplace_back(credential_for(creds, elems.attrs[i]).credential, elems.ac_transferors[i]);
  }
  return ctx.pair_product(lhs) == elems.plcy;
}

void validate(const PairingContext& ctx, const AccessPolicyElements& elems) {
  const std::size_t n = elems.attrs.size();
  bool ok = n > 0 && elems.ac_transferors.size() == n && elems.plcy_modifiers.size() == n && ctx.is_valid(elems.plcy) &&
            std::is_sorted(elems.attrs.begin(), elems.attrs.end()) &&
            std::adjacent_find(elems.attrs.begin(), elems.attrs.end()) == elems.attrs.end();
  for (std::size_t i = 0; ok && i < n; ++i) {
    ok = ctx.is_valid(elems.ac_transferors[i]) && elems.ac_transferors[i].side() == Side::right &&
         ctx.is_valid(elems.plcy_modifiers[i]) && elems.plcy_modifiers[i].side() == Side::right;
  }
  if (!ok) fail(ErrorCode::bad_record, "incomplete access policy elements");
}

}  // namespace tlsaa
