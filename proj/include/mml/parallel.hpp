#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace mml {

// Worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index must only touch its own output slot;
// results are then identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

std::uint64_t splitmix64(std::uint64_t x);

// Independent generator for task `stream` under a master seed.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51ed2701u)));
}

}  // namespace mml
