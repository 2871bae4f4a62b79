#include "tlsaa/pairing.hpp"

#include <algorithm>
#include <bit>

#include "backend.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::side_mismatch: return "SideMismatch";
    case ErrorCode::backend_mismatch: return "BackendMismatch";
    case ErrorCode::non_invertible: return "NonInvertible";
    case ErrorCode::empty_subset: return "EmptySubset";
    case ErrorCode::bad_set_index: return "BadSetIndex";
    case ErrorCode::bad_attribute: return "BadAttribute";
    case ErrorCode::incomplete_policy: return "IncompletePolicy";
    case ErrorCode::nonce_reuse: return "NonceReuse";
    case ErrorCode::incomplete_tokens: return "IncompleteTokens";
    case ErrorCode::wrong_key: return "WrongKey";
    case ErrorCode::authentication_failure: return "AuthenticationFailure";
    case ErrorCode::bad_record: return "BadRecord";
    case ErrorCode::update_rejected: return "UpdateRejected";
    case ErrorCode::missing_apk: return "MissingApk";
    case ErrorCode::malformed: return "Malformed";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::io: return "IoError";
    case ErrorCode::unauthorized: return "Unauthorized";
  }
  return "Unknown";
}

std::string_view to_string(Side side) noexcept { return side == Side::left ? "left" : "right"; }

std::string_view to_string(BackendId id) noexcept {
  return id == BackendId::oracle ? "oracle" : "curve";
}

bool operator==(const GroupElement& a, const GroupElement& b) {
  using detail::ElementAccess;
  if (a.side_ != b.side_ || a.rep_.index() != b.rep_.index()) return false;
  if (auto* x = ElementAccess::get<std::uint64_t>(a)) return *x == *ElementAccess::get<std::uint64_t>(b);
  if (auto* x = ElementAccess::get<blst_p1>(a)) return blst_p1_is_equal(x, ElementAccess::get<blst_p1>(b));
  if (auto* x = ElementAccess::get<blst_p2>(a)) return blst_p2_is_equal(x, ElementAccess::get<blst_p2>(b));
  return true;  // both empty
}

bool operator==(const GtElement& a, const GtElement& b) {
  using detail::ElementAccess;
  if (a.rep_.index() != b.rep_.index()) return false;
  if (auto* x = ElementAccess::get<std::uint64_t>(a)) return *x == *ElementAccess::get<std::uint64_t>(b);
  if (auto* x = ElementAccess::get<blst_fp12>(a)) return blst_fp12_is_equal(x, ElementAccess::get<blst_fp12>(b));
  return true;
}

namespace detail {

Bytes scalar_to_bytes(const Scalar& s, std::size_t width) {
  Bytes out(width, 0);
  for (std::size_t i = 0; i < width && i < 32; ++i) {
    out[width - 1 - i] = static_cast<std::uint8_t>(s.limbs()[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

Scalar scalar_from_bytes(ByteView bytes) {
  Scalar::Limbs limbs{};
  const std::size_t n = bytes.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t b = bytes[n - 1 - i];
    if (b == 0) continue;
    if (i >= 32) fail(ErrorCode::malformed, "scalar wider than 256 bits");
    limbs[i / 8] |= static_cast<std::uint64_t>(b) << (8 * (i % 8));
  }
  return Scalar(limbs);
}

}  // namespace detail

namespace {

constexpr std::uint8_t kHeaderMagic[4] = {'3', 'L', 'S', 'A'};
constexpr std::uint8_t kHeaderVersion = 1;

void put_u16(Bytes& out, std::size_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

PairingContext::PairingContext(std::shared_ptr<const detail::Backend> backend)
    : backend_(std::move(backend)) {}

PairingContext PairingContext::oracle(std::uint64_t q, OracleHashOverrides overrides) {
  return PairingContext(detail::make_oracle_backend(q, std::move(overrides)));
}

PairingContext PairingContext::curve() {
  static const auto backend = detail::make_curve_backend();
  return PairingContext(backend);
}

PairingContext PairingContext::from_header(ByteView header) {
  auto bad = [] { fail(ErrorCode::malformed, "bad parameter header"); };
  if (header.size() < 8 || !std::equal(std::begin(kHeaderMagic), std::end(kHeaderMagic), header.begin())) bad();
  if (header[4] != kHeaderVersion) fail(ErrorCode::malformed, "unsupported parameter header version");
  const auto id = static_cast<BackendId>(header[5]);
  const std::size_t qlen = (std::size_t{header[6]} << 8) | header[7];
  if (header.size() < 8 + qlen) bad();
  const Scalar q = detail::scalar_from_bytes(header.subspan(8, qlen));

  PairingContext ctx = [&] {
    if (id == BackendId::oracle) {
      if (q.limbs()[1] | q.limbs()[2] | q.limbs()[3]) bad();
      return oracle(q.low());
    }
    if (id == BackendId::curve) return curve();
    fail(ErrorCode::malformed, "unknown backend id");
  }();
  // The generators are fixed per backend; reject headers whose bytes differ.
  const Bytes expected = ctx.header();
  if (!std::equal(expected.begin(), expected.end(), header.begin(), header.end())) bad();
  return ctx;
}

BackendId PairingContext::backend() const noexcept { return backend_->id(); }
const Scalar& PairingContext::order() const noexcept { return backend_->order(); }
unsigned PairingContext::order_bits() const noexcept { return backend_->order_bits(); }

Bytes PairingContext::header() const {
  Bytes out(std::begin(kHeaderMagic), std::end(kHeaderMagic));
  out.push_back(kHeaderVersion);
  out.push_back(static_cast<std::uint8_t>(backend()));
  const Bytes q = encode(order());
  put_u16(out, q.size());
  out.insert(out.end(), q.begin(), q.end());
  for (Side side : {Side::left, Side::right}) {
    const Bytes g = encode(generator(side));
    put_u16(out, g.size());
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

bool PairingContext::same_parameters(const PairingContext& other) const {
  return backend_ == other.backend_ || header() == other.header();
}

Scalar PairingContext::scalar(std::uint64_t v) const {
  const Scalar s = Scalar::from_u64(v);
  if (s < order()) return s;
  return Scalar::from_u64(v % order().low());
}

Scalar PairingContext::add(const Scalar& a, const Scalar& b) const { return backend_->add(a, b); }
Scalar PairingContext::sub(const Scalar& a, const Scalar& b) const { return backend_->sub(a, b); }
Scalar PairingContext::mul(const Scalar& a, const Scalar& b) const { return backend_->mul(a, b); }
Scalar PairingContext::neg(const Scalar& a) const { return backend_->sub(Scalar{}, a); }

Scalar PairingContext::inverse(const Scalar& a) const {
  if (a.is_zero()) fail(ErrorCode::non_invertible, "zero has no inverse");
  return backend_->inverse(a);
}

Scalar PairingContext::random_scalar(RandomSource& rng) const {
  const unsigned bits = order_bits();
  const std::size_t nbytes = (bits + 7) / 8;
  const auto top_mask = static_cast<std::uint8_t>(bits % 8 == 0 ? 0xff : (1u << (bits % 8)) - 1);
  Bytes buf(nbytes);
  for (;;) {
    rng.fill(buf);
    buf[0] &= top_mask;
    const Scalar s = detail::scalar_from_bytes(buf);
    if (!s.is_zero() && s < order()) return s;
  }
}

void PairingContext::check(const GroupElement& x) const {
  if (x.empty()) fail(ErrorCode::malformed, "empty group element");
  if (!backend_->owns(x)) fail(ErrorCode::backend_mismatch, "group element from another backend");
}

void PairingContext::check(const GtElement& x) const {
  if (x.empty()) fail(ErrorCode::malformed, "empty GT element");
  if (!backend_->owns(x)) fail(ErrorCode::backend_mismatch, "GT element from another backend");
}

GroupElement PairingContext::generator(Side side) const { return backend_->generator(side); }
GroupElement PairingContext::identity(Side side) const { return backend_->identity(side); }

GroupElement PairingContext::exp(const GroupElement& base, const Scalar& s) const {
  check(base);
  return backend_->exp(base, s);
}

GroupElement PairingContext::mul(const GroupElement& a, const GroupElement& b) const {
  check(a);
  check(b);
  if (a.side() != b.side()) fail(ErrorCode::side_mismatch, "cannot multiply left and right elements");
  return backend_->mul(a, b);
}

bool PairingContext::is_identity(const GroupElement& x) const {
  check(x);
  return backend_->is_identity(x);
}

bool PairingContext::is_valid(const GroupElement& x) const noexcept {
  return !x.empty() && backend_->owns(x);
}

GroupElement PairingContext::hash_to_group(HashDomain domain, ByteView input) const {
  return backend_->hash_to_group(domain, input);
}

GtElement PairingContext::pair(const GroupElement& left, const GroupElement& right) const {
  const std::pair<GroupElement, GroupElement> term{left, right};
  return pair_product(std::span(&term, 1));
}

GtElement PairingContext::pair_product(
    std::span<const std::pair<GroupElement, GroupElement>> terms) const {
  for (const auto& [l, r] : terms) {
    check(l);
    check(r);
    if (l.side() != Side::left || r.side() != Side::right) {
      fail(ErrorCode::side_mismatch, "pairing expects (left, right) arguments");
    }
  }
  return backend_->pair_product(terms);
}

GtElement PairingContext::gt_generator() const { return backend_->gt_generator(); }
GtElement PairingContext::gt_identity() const { return backend_->gt_identity(); }

GtElement PairingContext::gt_exp(const GtElement& base, const Scalar& s) const {
  check(base);
  return backend_->gt_exp(base, s);
}

GtElement PairingContext::gt_mul(const GtElement& a, const GtElement& b) const {
  check(a);
  check(b);
  return backend_->gt_mul(a, b);
}

GtElement PairingContext::gt_div(const GtElement& a, const GtElement& b) const {
  check(a);
  check(b);
  return backend_->gt_mul(a, backend_->gt_inverse(b));
}

bool PairingContext::is_identity(const GtElement& x) const {
  check(x);
  return backend_->is_identity(x);
}

bool PairingContext::is_valid(const GtElement& x) const noexcept { return !x.empty() && backend_->owns(x); }

std::size_t PairingContext::scalar_size() const noexcept { return backend_->scalar_size(); }
std::size_t PairingContext::group_size(Side side) const noexcept { return backend_->group_size(side); }
std::size_t PairingContext::gt_size() const noexcept { return backend_->gt_size(); }

Bytes PairingContext::encode(const Scalar& s) const { return detail::scalar_to_bytes(s, scalar_size()); }

Bytes PairingContext::encode(const GroupElement& x) const {
  check(x);
  return backend_->encode(x);
}

Bytes PairingContext::encode(const GtElement& x) const {
  check(x);
  return backend_->encode(x);
}

Scalar PairingContext::decode_scalar(ByteView bytes) const {
  if (bytes.size() != scalar_size()) fail(ErrorCode::malformed, "scalar has wrong width");
  const Scalar s = detail::scalar_from_bytes(bytes);
  if (!(s < order())) fail(ErrorCode::malformed, "scalar not reduced");
  return s;
}

GroupElement PairingContext::decode_group(Side side, ByteView bytes) const {
  if (bytes.size() != group_size(side)) fail(ErrorCode::malformed, "group element has wrong width");
  return backend_->decode_group(side, bytes);
}

GtElement PairingContext::decode_gt(ByteView bytes) const {
  if (bytes.size() != gt_size()) fail(ErrorCode::malformed, "GT element has wrong width");
  return backend_->decode_gt(bytes);
}

}  // namespace tlsaa
