#pragma once

// JSON field helpers shared by the wire format and the actor state files.

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "tlsaa/pairing.hpp"
#include "tlsaa/sse.hpp"

namespace tlsaa::jsonc {

using nlohmann::json;

json put(const PairingContext& ctx, const GroupElement& x);
json put(const PairingContext& ctx, const GtElement& x);
json put(const PairingContext& ctx, const Scalar& s);
json put_bytes(ByteView bytes);

GroupElement left(const PairingContext& ctx, const json& j, const char* key);
GroupElement right(const PairingContext& ctx, const json& j, const char* key);
GtElement gt(const PairingContext& ctx, const json& j, const char* key);
Scalar scalar(const PairingContext& ctx, const json& j, const char* key);
Bytes bytes(const json& j, const char* key);
std::string text(const json& j, const char* key);
std::uint64_t number(const json& j, const char* key);
std::vector<std::string> strings(const json& j, const char* key);
const json& field(const json& j, const char* key);

json put(const Subset& subset);
Subset subset(const json& j, const char* key);

std::string envelope(const PairingContext& ctx, std::string_view type, json body);
/// Parses an envelope of the given type and checks it names `ctx`.
json open(const PairingContext& ctx, std::string_view text, std::string_view type);
struct Opened {
  PairingContext ctx;
  json body;
};
/// Parses an envelope of the given type and rebuilds its context.
Opened open_any(std::string_view text, std::string_view type);
/// Parses the outer envelope only.
json parse_envelope(std::string_view text);

}  // namespace tlsaa::jsonc
