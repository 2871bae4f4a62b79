#pragma once

// A small deployment: one server, one owner, a few authorities and a user
// holding every attribute. Randomness is seeded so runs are reproducible.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tlsaa/actors.hpp"

namespace testing {

struct World {
  World(tlsaa::PairingContext ctx, std::size_t n_sets, std::string_view seed,
        std::vector<std::string> attributes = {"A1", "A2"}, tlsaa::EscrowServer::LogSink log = {})
      : rng(seed),
        params(tlsaa::server_setup(ctx, n_sets, rng)),
        server(std::make_unique<tlsaa::EscrowServer>(params, std::move(log))),
        owner(params, "owner-7f3a", rng),
        user(params, "gid-alice") {
    for (auto& attr : attributes) {
      authorities.push_back(std::make_unique<tlsaa::AuthorityActor>(params.ctx, attr, rng));
      authorities.back()->enroll(user.gid());
      owner.add_authority(authorities.back()->public_keys());
    }
  }

  const tlsaa::PairingContext& ctx() const { return params.ctx; }

  std::vector<const tlsaa::AuthorityActor*> aa_handles() const {
    std::vector<const tlsaa::AuthorityActor*> out;
    for (const auto& a : authorities) out.push_back(a.get());
    return out;
  }

  tlsaa::RecordId publish(std::string_view plaintext, std::vector<std::string> keywords,
                          std::vector<std::string> policy, std::uint32_t set) {
    return tlsaa::owner_publish(owner, *server, tlsaa::as_bytes(plaintext), keywords, policy, set, rng);
  }

  tlsaa::UserRequestResult request(std::string_view keyword, const tlsaa::Subset& subset) {
    const auto handles = aa_handles();
    return tlsaa::user_request(user, owner, handles, *server, keyword, subset, rng);
  }

  /// A search request built by the user for `keyword` over `subset`.
  tlsaa::SearchRequest search_request(std::string_view keyword, const tlsaa::Subset& subset,
                                      std::size_t credential_count = SIZE_MAX) {
    const auto consent = owner.consent(keyword, subset);
    const auto b = user.begin_request(rng);
    std::vector<tlsaa::CredentialGrant> grants;
    for (std::size_t i = 0; i < authorities.size() && i < credential_count; ++i) {
      grants.push_back(authorities[i]->issue(user.gid(), user.credential_request(b, authorities[i]->attribute_id())));
    }
    return user.search_request(consent, b, grants);
  }

  /// Drops the user from authority `i`'s roster.
  void revoke(std::size_t i) {
    auto secrets = authorities[i]->secrets();
    secrets.members.clear();
    authorities[i] = std::make_unique<tlsaa::AuthorityActor>(params.ctx, std::move(secrets));
  }

  tlsaa::SeededRandom rng;
  tlsaa::ServerParameters params;
  std::unique_ptr<tlsaa::EscrowServer> server;
  tlsaa::OwnerActor owner;
  std::vector<std::unique_ptr<tlsaa::AuthorityActor>> authorities;
  tlsaa::UserActor user;
};

/// Canonical bytes of every group and target element in a record.
inline std::set<tlsaa::Bytes> element_bytes(const tlsaa::PairingContext& ctx, const tlsaa::DataRecord& r) {
  std::set<tlsaa::Bytes> out{ctx.encode(r.sse.stk_transferor),       ctx.encode(r.sse.kw_modifier),
                             ctx.encode(r.sse.update_keyword),       ctx.encode(r.abe.plcy),
                             ctx.encode(r.recovery.dtk_transferor),  ctx.encode(r.recovery.dtk_owner_modifier),
                             ctx.encode(r.recovery.wrapped_key)};
  for (const auto& t : r.sse.tagged_keywords) out.insert(ctx.encode(t));
  for (const auto& x : r.abe.ac_transferors) out.insert(ctx.encode(x));
  for (const auto& x : r.abe.plcy_modifiers) out.insert(ctx.encode(x));
  for (const auto& x : r.recovery.dtk_aa_transferors) out.insert(ctx.encode(x));
  for (const auto& x : r.recovery.dtk_aa_modifiers) out.insert(ctx.encode(x));
  return out;
}

inline bool share_elements(const tlsaa::PairingContext& ctx, const tlsaa::DataRecord& a, const tlsaa::DataRecord& b) {
  const auto ea = element_bytes(ctx, a);
  for (const auto& x : element_bytes(ctx, b))
    if (ea.count(x)) return true;
  return false;
}

inline std::string as_string(const tlsaa::Bytes& b) { return {b.begin(), b.end()}; }

}  // namespace testing
