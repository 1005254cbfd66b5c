#pragma once

#include <cstddef>
#include <span>

#include "cirad/matrix.hpp"

namespace cirad::detail {

enum class FftDirection { Forward, Inverse };

/// Unnormalized in-place DFT of length data.size(). Forward uses exp(-j...).
/// Plans are cached per (length, direction) and are safe to share across
/// threads; results are bit-identical for identical input.
void fft_inplace(std::span<cd> data, FftDirection dir);

}  // namespace cirad::detail
