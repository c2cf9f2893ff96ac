#pragma once

#include <cstddef>

#include "nehd/tensor.hpp"

namespace nehd {

/// Non-overlapping S x T average pooling (stride = window), per channel.
/// Output dims floor(rows/S) x floor(cols/T); the trailing remainder that
/// does not fill a window is dropped. Throws std::invalid_argument when the
/// window exceeds the plane.
Tensor avg_pool_forward(const Tensor& x, std::size_t pool_rows, std::size_t pool_cols);

/// Spreads each upstream cell back over its S x T window with weight 1/(S*T);
/// dropped remainder cells get zero gradient.
Tensor avg_pool_backward(const std::vector<std::size_t>& input_shape, std::size_t pool_rows,
                         std::size_t pool_cols, const Tensor& upstream);

}  // namespace nehd
