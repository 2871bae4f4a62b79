#include "tlsaa/payload.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <algorithm>
#include <memory>
#include <string_view>

#include "tlsaa/errors.hpp"

namespace tlsaa {
namespace {

constexpr std::string_view kKdfInfo = "3LSAA payload key v1";

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};

Bytes associated_data(const PayloadCiphertext& ct) { return {static_cast<std::uint8_t>(ct.scheme)}; }

}  // namespace

SymmetricKey derive_key(const PairingContext& ctx, const KeyMask& mask) {
  const Bytes ikm = ctx.encode(mask.element);
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> pctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
  SymmetricKey key{};
  std::size_t len = key.size();
  if (!pctx || EVP_PKEY_derive_init(pctx.get()) <= 0 || EVP_PKEY_CTX_set_hkdf_md(pctx.get(), EVP_sha256()) <= 0 ||
      EVP_PKEY_CTX_set1_hkdf_key(pctx.get(), ikm.data(), static_cast<int>(ikm.size())) <= 0 ||
      EVP_PKEY_CTX_add1_hkdf_info(pctx.get(), reinterpret_cast<const unsigned char*>(kKdfInfo.data()),
                                  static_cast<int>(kKdfInfo.size())) <= 0 ||
      EVP_PKEY_derive(pctx.get(), key.data(), &len) <= 0 || len != key.size()) {
    fail(ErrorCode::io, "HKDF failed");
  }
  return key;
}

PayloadCiphertext encrypt_payload(const SymmetricKey& key, ByteView plaintext, RandomSource& rng) {
  PayloadCiphertext ct;
  rng.fill(ct.nonce);
  const Bytes aad = associated_data(ct);
  CipherCtx c(EVP_CIPHER_CTX_new());
  ct.body.resize(plaintext.size() + kPayloadTagSize);
  int len = 0;
  int total = 0;
  bool ok = c && EVP_EncryptInit_ex(c.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(ct.nonce.size()), nullptr) == 1 &&
            EVP_EncryptInit_ex(c.get(), nullptr, nullptr, key.data(), ct.nonce.data()) == 1 &&
            EVP_EncryptUpdate(c.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  if (ok && !plaintext.empty()) {
    ok = EVP_EncryptUpdate(c.get(), ct.body.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) == 1;
    total = len;
  }
  ok = ok && EVP_EncryptFinal_ex(c.get(), ct.body.data() + total, &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_GET_TAG, kPayloadTagSize, ct.body.data() + plaintext.size()) == 1;
  if (!ok) fail(ErrorCode::io, "AES-GCM encryption failed");
  return ct;
}

Bytes decrypt_payload(const SymmetricKey& key, const PayloadCiphertext& ct) {
  if (ct.scheme != PayloadScheme::aes256_gcm) fail(ErrorCode::malformed, "unknown payload scheme");
  if (ct.body.size() < kPayloadTagSize) fail(ErrorCode::authentication_failure, "ciphertext shorter than tag");
  const std::size_t n = ct.body.size() - kPayloadTagSize;
  const Bytes aad = associated_data(ct);
  Bytes tag(ct.body.end() - kPayloadTagSize, ct.body.end());
  Bytes out(n);
  CipherCtx c(EVP_CIPHER_CTX_new());
  int len = 0;
  int total = 0;
  bool ok = c && EVP_DecryptInit_ex(c.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(ct.nonce.size()), nullptr) == 1 &&
            EVP_DecryptInit_ex(c.get(), nullptr, nullptr, key.data(), ct.nonce.data()) == 1 &&
            EVP_DecryptUpdate(c.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  if (!ok) fail(ErrorCode::io, "AES-GCM setup failed");
  if (n > 0) {
    if (EVP_DecryptUpdate(c.get(), out.data(), &len, ct.body.data(), static_cast<int>(n)) != 1) {
      fail(ErrorCode::authentication_failure, "payload decryption failed");
    }
    total = len;
  }
  if (EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_TAG, kPayloadTagSize, tag.data()) != 1 ||
      EVP_DecryptFinal_ex(c.get(), out.data() + total, &len) != 1) {
    fail(ErrorCode::authentication_failure, "payload tag mismatch");
  }
  return out;
}

Bytes encode_payload(const PayloadCiphertext& ct) {
  Bytes out(1 + ct.nonce.size() + ct.body.size());
  out[0] = static_cast<std::uint8_t>(ct.scheme);
  std::copy(ct.nonce.begin(), ct.nonce.end(), out.begin() + 1);
  std::copy(ct.body.begin(), ct.body.end(), out.begin() + 1 + static_cast<std::ptrdiff_t>(ct.nonce.size()));
  return out;
}

PayloadCiphertext decode_payload(ByteView bytes) {
  if (bytes.size() < 1 + 12 + kPayloadTagSize) fail(ErrorCode::malformed, "payload envelope too short");
  if (bytes[0] != static_cast<std::uint8_t>(PayloadScheme::aes256_gcm)) fail(ErrorCode::malformed, "unknown payload scheme");
  PayloadCiphertext ct;
  std::copy(bytes.begin() + 1, bytes.begin() + 13, ct.nonce.begin());
  ct.body.assign(bytes.begin() + 13, bytes.end());
  return ct;
}

}  // namespace tlsaa
