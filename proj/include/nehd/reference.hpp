#pragma once

#include "nehd/conv2d.hpp"
#include "nehd/histogram_layer.hpp"
#include "nehd/tensor.hpp"

namespace nehd::reference {

/// Serial nested-loop counterparts of the parallel kernels. Deliberately
/// written as the direct transcription of each definition, with no shared
/// code, so they can serve as oracles in tests and as the baseline in the
/// kernel benchmark.

Tensor conv2d_forward(const Tensor& x, const FilterBank& fb);

Tensor avg_pool_forward(const Tensor& x, std::size_t pool_rows, std::size_t pool_cols);

Tensor histogram_forward(const Tensor& f, const HistogramParams& p);

}  // namespace nehd::reference
