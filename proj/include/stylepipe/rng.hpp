// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace stylepipe {

// std::uniform_int_distribution is implementation-defined; everything that
// must be reproducible across standard libraries goes through these helpers.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed);

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace stylepipe
