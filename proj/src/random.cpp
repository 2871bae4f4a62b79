#include "tlsaa/random.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <array>
#include <vector>

#include "tlsaa/errors.hpp"

namespace tlsaa {

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> buf;
  fill(buf);
  std::uint64_t v = 0;
  for (auto b : buf) v = (v << 8) | b;
  return v;
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) fail(ErrorCode::io, "RAND_bytes failed");
}

struct SeededRandom::State {
  EVP_CIPHER_CTX* cipher = nullptr;
  std::vector<std::uint8_t> zeros;
  ~State() { EVP_CIPHER_CTX_free(cipher); }
};

SeededRandom::SeededRandom(std::span<const std::uint8_t> seed) : state_(std::make_unique<State>()) {
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> key;
  SHA256(seed.data(), seed.size(), key.data());
  const std::array<std::uint8_t, 16> iv{};
  state_->cipher = EVP_CIPHER_CTX_new();
  if (!state_->cipher || EVP_EncryptInit_ex(state_->cipher, EVP_chacha20(), nullptr, key.data(), iv.data()) != 1) {
    fail(ErrorCode::io, "cannot initialise ChaCha20 stream");
  }
}

SeededRandom::SeededRandom(std::string_view seed)
    : SeededRandom(std::span(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size())) {}

SeededRandom::SeededRandom(std::uint64_t seed)
    : SeededRandom([seed] {
        std::array<std::uint8_t, 8> b;
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
        return b;
      }()) {}

SeededRandom::~SeededRandom() = default;

void SeededRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (state_->zeros.size() < out.size()) state_->zeros.resize(out.size(), 0);
  int written = 0;
  if (EVP_EncryptUpdate(state_->cipher, out.data(), &written, state_->zeros.data(), static_cast<int>(out.size())) != 1 ||
      written != static_cast<int>(out.size())) {
    fail(ErrorCode::io, "ChaCha20 keystream failed");
  }
}

}  // namespace tlsaa
