#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace a2g {

using Rng = std::mt19937_64;

/// Seed for an independent stream identified by (master seed, purpose tag, index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view tag, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t master_seed, std::string_view tag, std::uint64_t index = 0) {
  return Rng(derive_seed(master_seed, tag, index));
}

}  // namespace a2g
