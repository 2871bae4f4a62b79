#include <openssl/sha.h>

#include <bit>

#include "backend.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa::detail {
namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return result;
}

// Deterministic Miller-Rabin for all 64-bit inputs.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class OracleBackend final : public Backend {
 public:
  OracleBackend(std::uint64_t q, OracleHashOverrides overrides)
      : q_(q), order_(Scalar::from_u64(q)), overrides_(std::move(overrides)) {
    if (q < 3 || !is_prime(q)) fail(ErrorCode::invalid_argument, "oracle group order must be an odd prime");
    if (q >> 63) fail(ErrorCode::invalid_argument, "oracle group order must be below 2^63");
    for (auto& [key, value] : overrides_) value %= q_;
  }

  BackendId id() const noexcept override { return BackendId::oracle; }
  const Scalar& order() const noexcept override { return order_; }
  unsigned order_bits() const noexcept override { return 64 - std::countl_zero(q_); }

  Scalar add(const Scalar& a, const Scalar& b) const override {
    return Scalar::from_u64((a.low() + b.low()) % q_);
  }
  Scalar sub(const Scalar& a, const Scalar& b) const override {
    return Scalar::from_u64((a.low() + q_ - b.low()) % q_);
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    return Scalar::from_u64(mulmod(a.low(), b.low(), q_));
  }
  Scalar inverse(const Scalar& a) const override {
    return Scalar::from_u64(powmod(a.low(), q_ - 2, q_));
  }

  bool owns(const GroupElement& x) const noexcept override {
    auto* v = ElementAccess::get<std::uint64_t>(x);
    return v && *v < q_;
  }
  bool owns(const GtElement& x) const noexcept override {
    auto* v = ElementAccess::get<std::uint64_t>(x);
    return v && *v < q_;
  }

  GroupElement generator(Side side) const override { return ElementAccess::make(side, 1); }
  GroupElement identity(Side side) const override { return ElementAccess::make(side, 0); }

  GroupElement exp(const GroupElement& base, const Scalar& s) const override {
    return ElementAccess::make(base.side(), mulmod(value(base), s.low() % q_, q_));
  }
  GroupElement mul(const GroupElement& a, const GroupElement& b) const override {
    return ElementAccess::make(a.side(), (value(a) + value(b)) % q_);
  }
  bool is_identity(const GroupElement& x) const override { return value(x) == 0; }

  GroupElement hash_to_group(HashDomain domain, ByteView input) const override {
    if (!overrides_.empty()) {
      auto it = overrides_.find({domain, std::string(input.begin(), input.end())});
      if (it != overrides_.end()) return ElementAccess::make(Side::left, it->second);
    }
    Bytes message{static_cast<std::uint8_t>(domain)};
    message.insert(message.end(), input.begin(), input.end());
    std::uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(message.data(), message.size(), digest);
    u128 acc = 0;
    for (int i = 0; i < 16; ++i) acc = (acc << 8) | digest[i];
    // Never the identity, so hashed identities are always usable as blinding bases.
    return ElementAccess::make(Side::left, static_cast<std::uint64_t>(acc % (q_ - 1)) + 1);
  }

  GtElement pair_product(std::span<const std::pair<GroupElement, GroupElement>> terms) const override {
    std::uint64_t acc = 0;
    for (const auto& [l, r] : terms) acc = (acc + mulmod(value(l), value(r), q_)) % q_;
    return ElementAccess::make_gt(acc);
  }
  GtElement gt_generator() const override { return ElementAccess::make_gt(1); }
  GtElement gt_identity() const override { return ElementAccess::make_gt(0); }
  GtElement gt_exp(const GtElement& base, const Scalar& s) const override {
    return ElementAccess::make_gt(mulmod(value(base), s.low() % q_, q_));
  }
  GtElement gt_mul(const GtElement& a, const GtElement& b) const override {
    return ElementAccess::make_gt((value(a) + value(b)) % q_);
  }
  GtElement gt_inverse(const GtElement& a) const override {
    return ElementAccess::make_gt((q_ - value(a)) % q_);
  }
  bool is_identity(const GtElement& x) const override { return value(x) == 0; }

  std::size_t scalar_size() const noexcept override { return 8; }
  std::size_t group_size(Side) const noexcept override { return 8; }
  std::size_t gt_size() const noexcept override { return 8; }

  Bytes encode(const GroupElement& x) const override { return scalar_to_bytes(Scalar::from_u64(value(x)), 8); }
  Bytes encode(const GtElement& x) const override { return scalar_to_bytes(Scalar::from_u64(value(x)), 8); }

  GroupElement decode_group(Side side, ByteView bytes) const override {
    return ElementAccess::make(side, decode_value(bytes));
  }
  GtElement decode_gt(ByteView bytes) const override { return ElementAccess::make_gt(decode_value(bytes)); }

 private:
  static std::uint64_t value(const GroupElement& x) { return *ElementAccess::get<std::uint64_t>(x); }
  static std::uint64_t value(const GtElement& x) { return *ElementAccess::get<std::uint64_t>(x); }

  std::uint64_t decode_value(ByteView bytes) const {
    const std::uint64_t v = scalar_from_bytes(bytes).low();
    if (v >= q_) fail(ErrorCode::malformed, "oracle element not reduced");
    return v;
  }

  std::uint64_t q_;
  Scalar order_;
  OracleHashOverrides overrides_;
};

}  // namespace

std::shared_ptr<const Backend> make_oracle_backend(std::uint64_t q, OracleHashOverrides overrides) {
  return std::make_shared<const OracleBackend>(q, std::move(overrides));
}

}  // namespace tlsaa::detail
