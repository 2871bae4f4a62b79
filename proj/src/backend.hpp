#pragma once

#include <memory>
#include <span>
#include <utility>

#include "tlsaa/pairing.hpp"

namespace tlsaa::detail {

struct ElementAccess {
  static GroupElement make(Side side, std::uint64_t exponent) {
    GroupElement x;
    x.side_ = side;
    x.rep_ = exponent;
    return x;
  }
  static GroupElement make(const blst_p1& p) {
    GroupElement x;
    x.side_ = Side::left;
    x.rep_ = p;
    return x;
  }
  static GroupElement make(const blst_p2& p) {
    GroupElement x;
    x.side_ = Side::right;
    x.rep_ = p;
    return x;
  }
  static GtElement make_gt(std::uint64_t exponent) {
    GtElement x;
    x.rep_ = exponent;
    return x;
  }
  static GtElement make_gt(const blst_fp12& f) {
    GtElement x;
    x.rep_ = f;
    return x;
  }

  template <class T>
  static const T* get(const GroupElement& x) noexcept {
    return std::get_if<T>(&x.rep_);
  }
  template <class T>
  static const T* get(const GtElement& x) noexcept {
    return std::get_if<T>(&x.rep_);
  }
};

/// Backend contract. PairingContext validates sides, emptiness and backend
/// ownership before delegating, so implementations may assume well-formed
/// operands.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendId id() const noexcept = 0;
  virtual const Scalar& order() const noexcept = 0;
  virtual unsigned order_bits() const noexcept = 0;

  virtual Scalar add(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar sub(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar mul(const Scalar& a, const Scalar& b) const = 0;
  /// Caller guarantees a != 0.
  virtual Scalar inverse(const Scalar& a) const = 0;

  virtual bool owns(const GroupElement& x) const noexcept = 0;
  virtual bool owns(const GtElement& x) const noexcept = 0;

  virtual GroupElement generator(Side side) const = 0;
  virtual GroupElement identity(Side side) const = 0;
  virtual GroupElement exp(const GroupElement& base, const Scalar& s) const = 0;
  virtual GroupElement mul(const GroupElement& a, const GroupElement& b) const = 0;
  virtual bool is_identity(const GroupElement& x) const = 0;
  virtual GroupElement hash_to_group(HashDomain domain, ByteView input) const = 0;

  virtual GtElement pair_product(
      std::span<const std::pair<GroupElement, GroupElement>> terms) const = 0;
  virtual GtElement gt_generator() const = 0;
  virtual GtElement gt_identity() const = 0;
  virtual GtElement gt_exp(const GtElement& base, const Scalar& s) const = 0;
  virtual GtElement gt_mul(const GtElement& a, const GtElement& b) const = 0;
  virtual GtElement gt_inverse(const GtElement& a) const = 0;
  virtual bool is_identity(const GtElement& x) const = 0;

  virtual std::size_t scalar_size() const noexcept = 0;
  virtual std::size_t group_size(Side side) const noexcept = 0;
  virtual std::size_t gt_size() const noexcept = 0;
  virtual Bytes encode(const GroupElement& x) const = 0;
  virtual Bytes encode(const GtElement& x) const = 0;
  /// Throws Error(malformed) on non-canonical or off-group input.
  virtual GroupElement decode_group(Side side, ByteView bytes) const = 0;
  virtual GtElement decode_gt(ByteView bytes) const = 0;
};

std::shared_ptr<const Backend> make_oracle_backend(std::uint64_t q, OracleHashOverrides overrides);
std::shared_ptr<const Backend> make_curve_backend();

/// Big-endian fixed-width encoding of a scalar's low `width` bytes.
Bytes scalar_to_bytes(const Scalar& s, std::size_t width);
Scalar scalar_from_bytes(ByteView bytes);

}  // namespace tlsaa::detail
