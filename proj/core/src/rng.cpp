#include "sadapt/rng.hpp"

#include "sadapt/error.hpp"

#include <algorithm>
#include <numeric>

namespace sadapt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Seed derive_seed(Seed base, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Seed derive_seed(Seed base, std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(base, h);
}

RowIndices sample_without_replacement(std::size_t n, std::size_t k, Seed seed) {
  if (k > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " rows");
  }
  RowIndices idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates with an explicit uniform integer draw so the
  // selection does not depend on std::shuffle's implementation.
  Engine rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace sadapt
