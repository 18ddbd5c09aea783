#pragma once

// Counter-based seeding: every random stream is a pure function of
// (master seed, replication index, stream id), so replications can run in
// any order on any number of threads and still see the same numbers.

#include <cstdint>
#include <random>

namespace mdqda {

using Rng = std::mt19937_64;

enum class Stream : std::uint32_t { train1 = 0, train2 = 1, test = 2, case_randomness = 3, oracle = 4 };

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replication, Stream stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t replication, Stream stream) {
    return Rng(stream_seed(master, replication, stream));
}

}  // namespace mdqda
