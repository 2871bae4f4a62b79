#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace tlsaa {

/// Source of random bytes. Protocol operations that need fresh randomness take
/// one of these so tests and replays can inject a deterministic stream.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
};

/// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic ChaCha20 keystream keyed by SHA-256(seed). Not thread-safe.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::span<const std::uint8_t> seed);
  explicit SeededRandom(std::string_view seed);
  explicit SeededRandom(std::uint64_t seed);
  ~SeededRandom() override;
  SeededRandom(const SeededRandom&) = delete;
  SeededRandom& operator=(const SeededRandom&) = delete;

  void fill(std::span<std::uint8_t> out) override;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace tlsaa
