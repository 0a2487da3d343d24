#pragma once

#include "nvflow/types.hpp"

#include <vector>

namespace nvflow::fft {

/// In-place iterative radix-2 FFT (forward: e^{-2 pi i jk/N}). N must be a
/// power of two.
void transform(std::vector<cplx>& data, bool inverse = false);

/// Largest power of two <= n.
std::size_t floor_pow2(std::size_t n);

} // namespace nvflow::fft
