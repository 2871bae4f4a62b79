#pragma once

#include <blst.h>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tlsaa/random.hpp"

namespace tlsaa {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Source group of a pairing argument. Hash outputs, credentials and user
/// tokens live on the left; owner-installed transferors and modifiers on the
/// right. The oracle backend gives both sides the same representation.
enum class Side : std::uint8_t { left = 0, right = 1 };

enum class BackendId : std::uint8_t { oracle = 1, curve = 2 };

/// Hash-to-group domains. Each tag selects an independent hash function.
enum class HashDomain : std::uint8_t { keyword = 1, gid = 2, update_id = 3 };

std::string_view to_string(Side side) noexcept;
std::string_view to_string(BackendId id) noexcept;

/// Element of Z_q as four little-endian 64-bit limbs, always reduced.
class Scalar {
 public:
  using Limbs = std::array<std::uint64_t, 4>;

  constexpr Scalar() = default;
  explicit constexpr Scalar(const Limbs& limbs) : limbs_(limbs) {}

  static constexpr Scalar from_u64(std::uint64_t v) { return Scalar(Limbs{v, 0, 0, 0}); }

  constexpr const Limbs& limbs() const noexcept { return limbs_; }
  constexpr bool is_zero() const noexcept {
    return (limbs_[0] | limbs_[1] | limbs_[2] | limbs_[3]) == 0;
  }
  constexpr std::uint64_t low() const noexcept { return limbs_[0]; }

  friend constexpr bool operator==(const Scalar&, const Scalar&) = default;
  friend constexpr std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
    for (int i = 3; i >= 0; --i) {
      if (auto c = a.limbs_[i] <=> b.limbs_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

 private:
  Limbs limbs_{};
};

namespace detail {
class Backend;
struct ElementAccess;
}  // namespace detail

/// Element of one of the two source groups. Default-constructed elements are
/// empty and rejected by every operation.
class GroupElement {
 public:
  GroupElement() = default;

  Side side() const noexcept { return side_; }
  bool empty() const noexcept { return std::holds_alternative<std::monostate>(rep_); }

  friend bool operator==(const GroupElement& a, const GroupElement& b);

 private:
  friend struct detail::ElementAccess;
  Side side_ = Side::left;
  std::variant<std::monostate, std::uint64_t, blst_p1, blst_p2> rep_;
};

/// Element of the target group GT.
class GtElement {
 public:
  GtElement() = default;

  bool empty() const noexcept { return std::holds_alternative<std::monostate>(rep_); }

  friend bool operator==(const GtElement& a, const GtElement& b);

 private:
  friend struct detail::ElementAccess;
  std::variant<std::monostate, std::uint64_t, blst_fp12> rep_;
};

/// Fixed hash images for the oracle backend, keyed by (domain, input).
using OracleHashOverrides = std::map<std::pair<HashDomain, std::string>, std::uint64_t>;

/// The public pairing parameters plus every group operation the protocol
/// uses. Cheap to copy; immutable after construction and safe to share
/// across threads.
class PairingContext {
 public:
  /// Exponent-arithmetic backend over Z_q: an element is its discrete log and
  /// the pairing is exponent multiplication. Insecure; for algebraic tests.
  static PairingContext oracle(std::uint64_t q, OracleHashOverrides overrides = {});
  /// BLS12-381 via blst, left = G1, right = G2.
  static PairingContext curve();
  /// Rebuilds a context from its serialized parameter header. Oracle hash
  /// overrides are not part of the header and are not restored.
  static PairingContext from_header(ByteView header);

  BackendId backend() const noexcept;
  const Scalar& order() const noexcept;
  unsigned order_bits() const noexcept;

  /// Versioned parameter header: magic, version, backend id, q, generators.
  Bytes header() const;
  bool same_parameters(const PairingContext& other) const;

  // Scalars.
  Scalar scalar(std::uint64_t v) const;
  bool is_valid(const Scalar& s) const noexcept { return s < order(); }
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar inverse(const Scalar& a) const;
  /// Uniform in [1, q).
  Scalar random_scalar(RandomSource& rng) const;

  // Source groups.
  GroupElement generator(Side side) const;
  GroupElement identity(Side side) const;
  GroupElement exp(const GroupElement& base, const Scalar& s) const;
  GroupElement exp_generator(Side side, const Scalar& s) const { return exp(generator(side), s); }
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  bool is_identity(const GroupElement& x) const;
  bool is_valid(const GroupElement& x) const noexcept;
  GroupElement hash_to_group(HashDomain domain, ByteView input) const;
  GroupElement hash_to_group(HashDomain domain, std::string_view input) const {
    return hash_to_group(domain, as_bytes(input));
  }

  // Target group.
  GtElement pair(const GroupElement& left, const GroupElement& right) const;
  /// Product of pairings, sharing one final exponentiation on the curve.
  GtElement pair_product(std::span<const std::pair<GroupElement, GroupElement>> terms) const;
  GtElement gt_generator() const;
  GtElement gt_identity() const;
  GtElement gt_exp(const GtElement& base, const Scalar& s) const;
  GtElement gt_mul(const GtElement& a, const GtElement& b) const;
  GtElement gt_div(const GtElement& a, const GtElement& b) const;
  bool is_identity(const GtElement& x) const;
  bool is_valid(const GtElement& x) const noexcept;
  GtElement random_gt(RandomSource& rng) const { return gt_exp(gt_generator(), random_scalar(rng)); }

  // Canonical encodings. Equal elements always encode to equal bytes.
  std::size_t scalar_size() const noexcept;
  std::size_t group_size(Side side) const noexcept;
  std::size_t gt_size() const noexcept;
  Bytes encode(const Scalar& s) const;
  Bytes encode(const GroupElement& x) const;
  Bytes encode(const GtElement& x) const;
  Scalar decode_scalar(ByteView bytes) const;
  GroupElement decode_group(Side side, ByteView bytes) const;
  GtElement decode_gt(ByteView bytes) const;

 private:
  explicit PairingContext(std::shared_ptr<const detail::Backend> backend);

  void check(const GroupElement& x) const;
  void check(const GtElement& x) const;

  std::shared_ptr<const detail::Backend> backend_;
};

}  // namespace tlsaa
