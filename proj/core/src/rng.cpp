#include "cirad/rng.hpp"

namespace cirad {

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::mt19937_64 derive_engine(std::uint64_t master, Stream stream, std::uint64_t index) {
    return std::mt19937_64(derive_seed(master, stream, index));
}

}  // namespace cirad
