#pragma once

#include <cstdint>
#include <random>

namespace hydap {

using Rng = std::mt19937_64;

// Derives an independent stream for task `task` of a run seeded with `seed`.
// Parallel loops draw from per-task streams so results do not depend on
// scheduling or worker count.
inline Rng task_rng(std::uint64_t seed, std::uint64_t task) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(task),
                    static_cast<std::uint32_t>(task >> 32)};
  return Rng(seq);
}

}  // namespace hydap
