#include "json_codec.hpp"

#include "tlsaa/codec.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa::jsonc {
namespace {

constexpr std::string_view kFormat = "3lsaa";
constexpr int kVersion = 1;

Bytes header_of(const json& env) { return base64url_decode(text(env, "params")); }

}  // namespace

json put(const PairingContext& ctx, const GroupElement& x) { return base64url_encode(ctx.encode(x)); }
json put(const PairingContext& ctx, const GtElement& x) { return base64url_encode(ctx.encode(x)); }
json put(const PairingContext& ctx, const Scalar& s) { return base64url_encode(ctx.encode(s)); }
json put_bytes(ByteView b) { return base64url_encode(b); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail(ErrorCode::malformed, std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::malformed, std::string("missing field '") + key + "'");
  return *it;
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) fail(ErrorCode::malformed, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned()) fail(ErrorCode::malformed, std::string("field '") + key + "' must be unsigned");
  return v.get<std::uint64_t>();
}

std::vector<std::string> strings(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) fail(ErrorCode::malformed, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) fail(ErrorCode::malformed, std::string("field '") + key + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Bytes bytes(const json& j, const char* key) { return base64url_decode(text(j, key)); }

GroupElement left(const PairingContext& ctx, const json& j, const char* key) {
  return ctx.decode_group(Side::left, bytes(j, key));
}
GroupElement right(const PairingContext& ctx, const json& j, const char* key) {
  return ctx.decode_group(Side::right, bytes(j, key));
}
GtElement gt(const PairingContext& ctx, const json& j, const char* key) { return ctx.decode_gt(bytes(j, key)); }
Scalar scalar(const PairingContext& ctx, const json& j, const char* key) { return ctx.decode_scalar(bytes(j, key)); }

json put(const Subset& subset) { return subset.indices(); }

Subset subset(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) fail(ErrorCode::malformed, std::string("field '") + key + "' must be an index list");
  std::vector<std::uint32_t> out;
  for (const auto& item : v) {
    if (!item.is_number_unsigned() || item.get<std::uint64_t>() > UINT32_MAX) {
      fail(ErrorCode::malformed, "subset indices must be small unsigned integers");
    }
    out.push_back(item.get<std::uint32_t>());
  }
  return Subset(std::move(out));
}

std::string envelope(const PairingContext& ctx, std::string_view type, json body) {
  json env = {{"format", kFormat},
              {"version", kVersion},
              {"type", type},
              {"params", base64url_encode(ctx.header())},
              {"body", std::move(body)}};
  return env.dump() + "\n";
}

json parse_envelope(std::string_view text_in) {
  json env = json::parse(text_in, nullptr, false);
  if (env.is_discarded() || !env.is_object()) fail(ErrorCode::malformed, "message is not a JSON object");
  if (!env.contains("format") || env["format"] != kFormat) fail(ErrorCode::malformed, "not a 3lsaa message");
  if (!env.contains("version") || env["version"] != kVersion) fail(ErrorCode::malformed, "unsupported message version");
  text(env, "type");
  text(env, "params");
  field(env, "body");
  return env;
}

namespace {

json checked_body(json env, std::string_view type) {
  if (env["type"] != type) {
    fail(ErrorCode::malformed, "expected a '" + std::string(type) + "' message, got '" + text(env, "type") + "'");
  }
  return std::move(env["body"]);
}

}  // namespace

json open(const PairingContext& ctx, std::string_view text_in, std::string_view type) {
  json env = parse_envelope(text_in);
  if (header_of(env) != ctx.header()) {
    fail(ErrorCode::backend_mismatch, "message was produced under different pairing parameters");
  }
  return checked_body(std::move(env), type);
}

Opened open_any(std::string_view text_in, std::string_view type) {
  json env = parse_envelope(text_in);
  PairingContext ctx = PairingContext::from_header(header_of(env));
  return {std::move(ctx), checked_body(std::move(env), type)};
}

}  // namespace tlsaa::jsonc
