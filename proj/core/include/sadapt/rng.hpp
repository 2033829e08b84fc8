#pragma once

#include "sadapt/types.hpp"

#include <cstddef>
#include <random>
#include <string_view>

namespace sadapt {

using Engine = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream id
/// (splitmix64 finaliser over the combination).
[[nodiscard]] Seed derive_seed(Seed base, std::uint64_t stream) noexcept;

/// Same, keyed by a label (FNV-1a hashed), e.g. derive_seed(s, "target").
[[nodiscard]] Seed derive_seed(Seed base, std::string_view label) noexcept;

/// Uniform sample of `k` distinct indices out of [0, n), returned ascending.
[[nodiscard]] RowIndices sample_without_replacement(std::size_t n, std::size_t k, Seed seed);

}  // namespace sadapt
