#pragma once

#include <cstdint>
#include <string>

#include "nehd/tensor.hpp"

namespace nehd {

/// RBF histogram layer. Bin b sees u_b = sum_k mix(b,k) * f_k - centers[b]
/// (a 1x1 convolution whose bias is the negated bin center), then
/// rbf = exp(-widths[b]^2 * u_b^2), average-pooled over pool_rows x pool_cols
/// windows with stride equal to the window.
struct HistogramParams {
    Tensor mix;      // [bins x channels], starts at 1/channels
    Tensor centers;  // [bins]
    Tensor widths;   // [bins], sign-free: only the square enters the kernel
    std::size_t pool_rows = 4;
    std::size_t pool_cols = 2;

    std::size_t bins() const { return centers.dim(0); }
    std::size_t channels() const { return mix.dim(1); }
};

enum class HistogramInit { kUniformRange, kRandom };

const char* histogram_init_name(HistogramInit mode);
HistogramInit histogram_init_from_name(const std::string& name);

/// uniform_range: centers evenly spaced on [lo,hi] inclusive (midpoint for a
/// single bin); random: centers drawn uniformly from [lo,hi]. Widths are
/// bins/(hi-lo) in both modes; the mix starts at the 1/channels average.
/// Throws when hi <= lo or bins/channels are zero.
HistogramParams init_histogram(std::size_t bins, std::size_t channels, HistogramInit mode,
                               double lo = -3.0, double hi = 3.0, std::uint64_t seed = 0,
                               std::size_t pool_rows = 4, std::size_t pool_cols = 2);

struct HistogramForward {
    Tensor u;       // [bins x rows x cols]
    Tensor rbf;     // [bins x rows x cols], every value in (0,1]
    Tensor pooled;  // [bins x rows/S x cols/T]
};

/// f is [channels x rows x cols].
HistogramForward histogram_forward_cached(const Tensor& f, const HistogramParams& p);
Tensor histogram_forward(const Tensor& f, const HistogramParams& p);

struct HistogramGrads {
    Tensor input;    // like f
    Tensor mix;      // like p.mix
    Tensor centers;  // like p.centers
    Tensor widths;   // like p.widths
};

/// cache must be histogram_forward_cached(f, p); upstream matches cache.pooled.
HistogramGrads histogram_backward(const Tensor& f, const HistogramParams& p,
                                  const HistogramForward& cache, const Tensor& upstream);

}  // namespace nehd
