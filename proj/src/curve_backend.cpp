#include <array>
#include <string_view>

#include "backend.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa::detail {
namespace {

// BLS12-381 subgroup order r.
constexpr Scalar kOrder(Scalar::Limbs{0xffffffff00000001ull, 0x53bda402fffe5bfeull,
                                      0x3339d80809a1d805ull, 0x73eda753299d7d48ull});
constexpr unsigned kOrderBits = 255;
constexpr std::size_t kFpBytes = 48;
constexpr std::size_t kGtBytes = 12 * kFpBytes;

std::string_view dst_for(HashDomain domain) {
  switch (domain) {
    case HashDomain::keyword: return "3LSAA-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_KEYWORD_";
    case HashDomain::gid: return "3LSAA-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_GID_";
    case HashDomain::update_id: return "3LSAA-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_UPDATE_ID_";
  }
  fail(ErrorCode::invalid_argument, "unknown hash domain");
}

blst_fr to_fr(const Scalar& s) {
  blst_fr out;
  blst_fr_from_uint64(&out, s.limbs().data());
  return out;
}

Scalar from_fr(const blst_fr& f) {
  Scalar::Limbs limbs;
  blst_uint64_from_fr(limbs.data(), &f);
  return Scalar(limbs);
}

blst_scalar to_blst_scalar(const Scalar& s) {
  blst_scalar out;
  blst_scalar_from_uint64(&out, s.limbs().data());
  return out;
}

// Visits the twelve base-field coefficients of an Fp12 element in a fixed order.
template <class Fp12, class F>
void for_each_fp(Fp12& f, F&& fn) {
  for (auto& fp6 : f.fp6)
    for (auto& fp2 : fp6.fp2)
      for (auto& fp : fp2.fp) fn(fp);
}

class CurveBackend final : public Backend {
 public:
  CurveBackend() {
    const std::pair<GroupElement, GroupElement> term{generator(Side::left), generator(Side::right)};
    gt_generator_ = pair_product(std::span(&term, 1));
  }

  BackendId id() const noexcept override { return BackendId::curve; }
  const Scalar& order() const noexcept override { return kOrder; }
  unsigned order_bits() const noexcept override { return kOrderBits; }

  Scalar add(const Scalar& a, const Scalar& b) const override {
    blst_fr x = to_fr(a), y = to_fr(b), out;
    blst_fr_add(&out, &x, &y);
    return from_fr(out);
  }
  Scalar sub(const Scalar& a, const Scalar& b) const override {
    blst_fr x = to_fr(a), y = to_fr(b), out;
    blst_fr_sub(&out, &x, &y);
    return from_fr(out);
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    blst_fr x = to_fr(a), y = to_fr(b), out;
    blst_fr_mul(&out, &x, &y);
    return from_fr(out);
  }
  Scalar inverse(const Scalar& a) const override {
    blst_fr x = to_fr(a), out;
    blst_fr_inverse(&out, &x);
    return from_fr(out);
  }

  bool owns(const GroupElement& x) const noexcept override {
    return x.side() == Side::left ? ElementAccess::get<blst_p1>(x) != nullptr
                                  : ElementAccess::get<blst_p2>(x) != nullptr;
  }
  bool owns(const GtElement& x) const noexcept override { return ElementAccess::get<blst_fp12>(x) != nullptr; }

  GroupElement generator(Side side) const override {
    return side == Side::left ? ElementAccess::make(*blst_p1_generator())
                              : ElementAccess::make(*blst_p2_generator());
  }

  GroupElement identity(Side side) const override {
    if (side == Side::left) {
      blst_p1 p{};
      return ElementAccess::make(p);
    }
    blst_p2 p{};
    return ElementAccess::make(p);
  }

  GroupElement exp(const GroupElement& base, const Scalar& s) const override {
    const blst_scalar k = to_blst_scalar(s);
    if (auto* p = ElementAccess::get<blst_p1>(base)) {
      blst_p1 out;
      blst_p1_mult(&out, p, k.b, kOrderBits);
      return ElementAccess::make(out);
    }
    blst_p2 out;
    blst_p2_mult(&out, ElementAccess::get<blst_p2>(base), k.b, kOrderBits);
    return ElementAccess::make(out);
  }

  GroupElement mul(const GroupElement& a, const GroupElement& b) const override {
    if (auto* p = ElementAccess::get<blst_p1>(a)) {
      blst_p1 out;
      blst_p1_add_or_double(&out, p, ElementAccess::get<blst_p1>(b));
      return ElementAccess::make(out);
    }
    blst_p2 out;
    blst_p2_add_or_double(&out, ElementAccess::get<blst_p2>(a), ElementAccess::get<blst_p2>(b));
    return ElementAccess::make(out);
  }

  bool is_identity(const GroupElement& x) const override {
    if (auto* p = ElementAccess::get<blst_p1>(x)) return blst_p1_is_inf(p);
    return blst_p2_is_inf(ElementAccess::get<blst_p2>(x));
  }

  GroupElement hash_to_group(HashDomain domain, ByteView input) const override {
    const std::string_view dst = dst_for(domain);
    blst_p1 out;
    blst_hash_to_g1(&out, input.data(), input.size(), reinterpret_cast<const byte*>(dst.data()), dst.size(),
                    nullptr, 0);
    return ElementAccess::make(out);
  }

  GtElement pair_product(std::span<const std::pair<GroupElement, GroupElement>> terms) const override {
    blst_fp12 acc = *blst_fp12_one();
    bool any = false;
    for (const auto& [l, r] : terms) {
      blst_p1_affine p;
      blst_p2_affine q;
      blst_p1_to_affine(&p, ElementAccess::get<blst_p1>(l));
      blst_p2_to_affine(&q, ElementAccess::get<blst_p2>(r));
      // e(O, y) = e(x, O) = 1; the Miller loop is undefined at infinity.
      if (blst_p1_affine_is_inf(&p) || blst_p2_affine_is_inf(&q)) continue;
      blst_fp12 f;
      blst_miller_loop(&f, &q, &p);
      if (any) {
        blst_fp12_mul(&acc, &acc, &f);
      } else {
        acc = f;
        any = true;
      }
    }
    if (!any) return gt_identity();
    blst_fp12 out;
    blst_final_exp(&out, &acc);
    return ElementAccess::make_gt(out);
  }

  GtElement gt_generator() const override { return gt_generator_; }
  GtElement gt_identity() const override { return ElementAccess::make_gt(*blst_fp12_one()); }

  GtElement gt_exp(const GtElement& base, const Scalar& s) const override {
    const blst_fp12& b = *ElementAccess::get<blst_fp12>(base);
    blst_fp12 acc = *blst_fp12_one();
    bool started = false;
    for (int bit = kOrderBits; bit >= 0; --bit) {
      if (started) blst_fp12_cyclotomic_sqr(&acc, &acc);
      if ((s.limbs()[bit / 64] >> (bit % 64)) & 1) {
        if (started) {
          blst_fp12_mul(&acc, &acc, &b);
        } else {
          acc = b;
          started = true;
        }
      }
    }
    return ElementAccess::make_gt(acc);
  }

  GtElement gt_mul(const GtElement& a, const GtElement& b) const override {
    blst_fp12 out;
    blst_fp12_mul(&out, ElementAccess::get<blst_fp12>(a), ElementAccess::get<blst_fp12>(b));
    return ElementAccess::make_gt(out);
  }

  GtElement gt_inverse(const GtElement& a) const override {
    blst_fp12 out;
    blst_fp12_inverse(&out, ElementAccess::get<blst_fp12>(a));
    return ElementAccess::make_gt(out);
  }

  bool is_identity(const GtElement& x) const override { return blst_fp12_is_one(ElementAccess::get<blst_fp12>(x)); }

  std::size_t scalar_size() const noexcept override { return 32; }
  std::size_t group_size(Side side) const noexcept override { return side == Side::left ? 48 : 96; }
  std::size_t gt_size() const noexcept override { return kGtBytes; }

  Bytes encode(const GroupElement& x) const override {
    if (auto* p = ElementAccess::get<blst_p1>(x)) {
      Bytes out(48);
      blst_p1_compress(out.data(), p);
      return out;
    }
    Bytes out(96);
    blst_p2_compress(out.data(), ElementAccess::get<blst_p2>(x));
    return out;
  }

  Bytes encode(const GtElement& x) const override {
    Bytes out;
    out.reserve(kGtBytes);
    for_each_fp(*ElementAccess::get<blst_fp12>(x), [&](const blst_fp& fp) {
      std::array<byte, kFpBytes> buf;
      blst_bendian_from_fp(buf.data(), &fp);
      out.insert(out.end(), buf.begin(), buf.end());
    });
    return out;
  }

  GroupElement decode_group(Side side, ByteView bytes) const override {
    if (side == Side::left) {
      blst_p1_affine a;
      if (blst_p1_uncompress(&a, bytes.data()) != BLST_SUCCESS || !blst_p1_affine_in_g1(&a)) {
        fail(ErrorCode::malformed, "invalid G1 encoding");
      }
      blst_p1 p;
      blst_p1_from_affine(&p, &a);
      return ElementAccess::make(p);
    }
    blst_p2_affine a;
    if (blst_p2_uncompress(&a, bytes.data()) != BLST_SUCCESS || !blst_p2_affine_in_g2(&a)) {
      fail(ErrorCode::malformed, "invalid G2 encoding");
    }
    blst_p2 p;
    blst_p2_from_affine(&p, &a);
    return ElementAccess::make(p);
  }

  GtElement decode_gt(ByteView bytes) const override {
    blst_fp12 f;
    std::size_t offset = 0;
    for_each_fp(f, [&](blst_fp& fp) {
      blst_fp_from_bendian(&fp, bytes.data() + offset);
      offset += kFpBytes;
    });
    GtElement out = ElementAccess::make_gt(f);
    // Coefficients >= p would alias reduced values; canonical means re-encodes identically.
    const Bytes again = encode(out);
    if (!std::equal(again.begin(), again.end(), bytes.begin(), bytes.end()) || !blst_fp12_in_group(&f)) {
      fail(ErrorCode::malformed, "invalid GT encoding");
    }
    return out;
  }

 private:
  GtElement gt_generator_;
};

}  // namespace

std::shared_ptr<const Backend> make_curve_backend() { return std::make_shared<const CurveBackend>(); }

}  // namespace tlsaa::detail
