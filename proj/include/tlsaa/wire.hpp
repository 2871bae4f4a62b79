#pragma once

#include <string>
#include <string_view>

#include "tlsaa/protocol.hpp"

namespace tlsaa::wire {

// Text envelope exchanged between actors:
//
//   {"format": "3lsaa", "version": 1, "type": "<kind>",
//    "params": "<base64url parameter header>", "body": {...}}
//
// Every group element in the body is base64url of its canonical encoding.

/// The "type" field, after checking format and version.
std::string message_type(std::string_view text);
/// Pairing parameters named by the envelope header.
PairingContext message_context(std::string_view text);
/// Re-indented copy for display.
std::string pretty(std::string_view text);

std::string encode(const ServerParameters& params);
std::string encode(const PairingContext& ctx, const DataRecord& rec);
std::string encode(const PairingContext& ctx, const SearchRequest& req);
std::string encode(const PairingContext& ctx, const SearchResponse& resp);
std::string encode(const PairingContext& ctx, const UpdateRequest& req);
std::string encode(const PairingContext& ctx, const ConsentBundle& bundle);
std::string encode(const PairingContext& ctx, const CredentialRequest& req);
std::string encode(const PairingContext& ctx, const CredentialGrant& grant);
std::string encode(const PairingContext& ctx, const AuthorityPublicKeys& keys);
std::string encode(const PairingContext& ctx, const DecryptionTokenSet& tokens);

ServerParameters decode_server_parameters(std::string_view text);

/// Throws Malformed on a type mismatch or bad body, BackendMismatch when the
/// envelope was produced under other parameters.
template <class T>
T decode(const PairingContext& ctx, std::string_view text);

template <> DataRecord decode<DataRecord>(const PairingContext&, std::string_view);
template <> SearchRequest decode<SearchRequest>(const PairingContext&, std::string_view);
template <> SearchResponse decode<SearchResponse>(const PairingContext&, std::string_view);
template <> UpdateRequest decode<UpdateRequest>(const PairingContext&, std::string_view);
template <> ConsentBundle decode<ConsentBundle>(const PairingContext&, std::string_view);
template <> CredentialRequest decode<CredentialRequest>(const PairingContext&, std::string_view);
template <> CredentialGrant decode<CredentialGrant>(const PairingContext&, std::string_view);
template <> AuthorityPublicKeys decode<AuthorityPublicKeys>(const PairingContext&, std::string_view);
template <> DecryptionTokenSet decode<DecryptionTokenSet>(const PairingContext&, std::string_view);

}  // namespace tlsaa::wire
