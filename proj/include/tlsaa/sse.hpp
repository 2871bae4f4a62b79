#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsaa/pairing.hpp"

namespace tlsaa {

/// Sorted, duplicate-free set of 1-based data-set indices.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::vector<std::uint32_t> indices);
  Subset(std::initializer_list<std::uint32_t> indices) : Subset(std::vector<std::uint32_t>(indices)) {}

  /// Parses "1,3,5".
  static Subset parse(std::string_view text);
  std::string to_string() const;

  const std::vector<std::uint32_t>& indices() const noexcept { return indices_; }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::uint32_t index) const noexcept;

  /// Throws EmptySubset or BadSetIndex against n published sets.
  void validate(std::size_t n) const;

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  std::vector<std::uint32_t> indices_;
};

/// Published per-set keys pk_i = g^{a_i} (left group), index i = 1..n.
struct SetPublicKeys {
  std::vector<GroupElement> keys;

  std::size_t size() const noexcept { return keys.size(); }
  const GroupElement& at(std::uint32_t index) const;
  /// ∏_{i∈S} pk_i; validates S.
  GroupElement product(const PairingContext& ctx, const Subset& subset) const;
};

struct ServerParameters {
  PairingContext ctx;
  SetPublicKeys pks;
};

/// Publishes n distinct set keys. The exponents a_i never leave this call.
ServerParameters server_setup(const PairingContext& ctx, std::size_t n, RandomSource& rng);
/// Same with injected exponents, for fixed vectors.
SetPublicKeys make_set_public_keys(const PairingContext& ctx, std::span<const Scalar> exponents);

struct OwnerSseKey {
  Scalar sk;

  static OwnerSseKey generate(const PairingContext& ctx, RandomSource& rng);
};

/// Per-record SSE elements. tagged_keywords holds the caller's keywords in
/// order followed by the owner-id tag.
struct SseRecordElements {
  GroupElement stk_transferor;  // g^{r/sk}, right
  GroupElement kw_modifier;     // g^r, right
  std::vector<GtElement> tagged_keywords;
  GtElement update_keyword;     // e(H_update(ID_RTk), g)^r
};

struct SearchToken {
  GroupElement token;  // left
  Subset subset;
};

SseRecordElements sse_encrypt(const PairingContext& ctx, const OwnerSseKey& owner,
                              std::span<const std::string> keywords, std::string_view owner_id,
                              std::string_view update_id, const Scalar& r);

/// (∏_{i∈S} pk_i · H(w))^{sk}.
SearchToken consent_search_token(const PairingContext& ctx, const OwnerSseKey& owner,
                                 std::string_view keyword, const Subset& subset,
                                 const SetPublicKeys& pks);

/// Re-encryption token: the search-token construction over the update-id hash domain.
SearchToken make_update_token(const PairingContext& ctx, const OwnerSseKey& owner,
                              std::string_view update_id, const Subset& subset,
                              const SetPublicKeys& pks);

/// pair(token, g^{r/sk}) == pair(∏_{i∈S} pk_i, g^r) · tagged_keywords[j].
bool sse_match(const PairingContext& ctx, const SseRecordElements& elems, const SearchToken& token,
               std::size_t keyword_index, const SetPublicKeys& pks);

/// Tries every tagged keyword with two pairings total. `subset_product` is
/// ∏_{i∈S} pk_i, computed once per request.
std::optional<std::size_t> sse_match_any(const PairingContext& ctx, const SseRecordElements& elems,
                                         const GroupElement& token, const GroupElement& subset_product);

/// pair(rtk, g^{r/sk}) == pair(∏_{i∈S} pk_i, g^r) · update_keyword.
bool verify_update_token(const PairingContext& ctx, const SseRecordElements& elems, const SearchToken& rtk,
                         const SetPublicKeys& pks);

// Basic mode: no subset modifier. Token H(w)^{sk}, check pair(token, g^{r/sk}) == kw.
GroupElement consent_search_token_basic(const PairingContext& ctx, const OwnerSseKey& owner,
                                        std::string_view keyword);
bool sse_match_basic(const PairingContext& ctx, const SseRecordElements& elems, const GroupElement& token,
                     std::size_t keyword_index);

/// Structural check used by record validation; throws Error(bad_record).
void validate(const PairingContext& ctx, const SseRecordElements& elems);

}  // namespace tlsaa
