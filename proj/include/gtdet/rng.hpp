#pragma once

#include <cstdint>
#include <random>

namespace gtdet {

// mt19937_64 keyed by (seed, stream) through std::seed_seq.
// Distinct streams give independent-looking sequences; same key, same sequence.
using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

inline double uniform01(Engine& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

}  // namespace gtdet
