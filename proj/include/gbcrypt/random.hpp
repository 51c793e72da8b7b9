#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gbc {

/// Independent stream keyed by a tuple such as (seed, length, trial id).
/// Streams depend only on the key, never on scheduling.
inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size());
  for (auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace gbc
