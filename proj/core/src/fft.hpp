#pragma once

#include <vector>

#include "papevo/aligned.hpp"

namespace papevo::detail {

/// In-place unnormalized complex DFT over a row-major box of extents dims.
/// Plans are cached; execution is thread-safe.
void fft_inplace(CVec& data, const std::vector<int>& dims, bool forward);

}  // namespace papevo::detail
