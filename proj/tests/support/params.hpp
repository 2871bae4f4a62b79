#pragma once

#include <cstdint>

namespace testing {

// Large prime for oracle property runs, where random nonces must not collide.
inline constexpr std::uint64_t kPropertyQ = (1ull << 61) - 1;

}  // namespace testing
