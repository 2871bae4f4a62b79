#pragma once

// Test-only reference arithmetic for the worked vectors at small q. Nothing
// here calls into the library's scalar arithmetic; discrete logs are found by
// brute force over the public generator.

#include <cstdint>
#include <stdexcept>

#include "tlsaa/pairing.hpp"

namespace oracle {

inline constexpr std::uint64_t kQ = 101;

constexpr std::uint64_t mod(std::int64_t v, std::uint64_t q = kQ) {
  const auto m = static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(((v % m) + m) % m);
}

/// Extended Euclid, independent of the backend's Fermat inverse.
constexpr std::uint64_t inverse(std::uint64_t a, std::uint64_t q = kQ) {
  std::int64_t t = 0, new_t = 1;
  auto r = static_cast<std::int64_t>(q), new_r = static_cast<std::int64_t>(a % q);
  while (new_r != 0) {
    const std::int64_t quotient = r / new_r;
    const std::int64_t tmp_t = t - quotient * new_t;
    t = new_t;
    new_t = tmp_t;
    const std::int64_t tmp_r = r - quotient * new_r;
    r = new_r;
    new_r = tmp_r;
  }
  if (r != 1) throw std::domain_error("not invertible");
  return mod(t, q);
}

/// Brute-force discrete log of a source-group element to base g.
inline std::uint64_t dlog(const tlsaa::PairingContext& ctx, const tlsaa::GroupElement& x) {
  const tlsaa::GroupElement g = ctx.generator(x.side());
  tlsaa::GroupElement acc = ctx.identity(x.side());
  for (std::uint64_t e = 0; e < ctx.order().low(); ++e) {
    if (acc == x) return e;
    acc = ctx.mul(acc, g);
  }
  throw std::logic_error("no discrete log");
}

/// Brute-force discrete log of a GT element to base e(g, g).
inline std::uint64_t dlog(const tlsaa::PairingContext& ctx, const tlsaa::GtElement& x) {
  const tlsaa::GtElement g = ctx.gt_generator();
  tlsaa::GtElement acc = ctx.gt_identity();
  for (std::uint64_t e = 0; e < ctx.order().low(); ++e) {
    if (acc == x) return e;
    acc = ctx.gt_mul(acc, g);
  }
  throw std::logic_error("no discrete log");
}

/// Oracle context at q = 101 with the hash images used by the worked vectors.
inline tlsaa::PairingContext worked_context() {
  using tlsaa::HashDomain;
  return tlsaa::PairingContext::oracle(
      kQ, {{{HashDomain::keyword, "bp"}, 5}, {{HashDomain::keyword, "bq"}, 6}, {{HashDomain::gid, "alice"}, 9}});
}

inline tlsaa::Scalar s(std::uint64_t v) { return tlsaa::Scalar::from_u64(v); }

}  // namespace oracle
