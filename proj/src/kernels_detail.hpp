#pragma once

#include <span>

#include "qmitm/kernels.hpp"
#include "qmitm/rng.hpp"

namespace qmitm::kernels::detail {

void fill_one_key(std::uint64_t seed, Key k, std::uint32_t block_space, std::span<Block> forward,
                  std::span<Block> inverse);

// block -> 2 * mean(block) - block
void reflect_block(std::span<Amplitude> block);

}  // namespace qmitm::kernels::detail
