#pragma once

#include <cstdint>
#include <random>

namespace cirad {

/// Named random substreams. Every stochastic draw in the library goes
/// through derive_engine so that two runs with the same seed see the same
/// numbers regardless of call order elsewhere.
enum class Stream : std::uint32_t {
    CodeC1 = 1,
    CodeC2 = 2,
    AbsorbedPhase = 3,
    Noise = 4,
    CoordinationNoise = 5,
    SideChannel = 6,
    Scene = 7,
    Generic = 99,
};

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

std::mt19937_64 derive_engine(std::uint64_t master, Stream stream, std::uint64_t index = 0);

}  // namespace cirad
