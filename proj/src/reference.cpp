#include "nehd/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace nehd::reference {

Tensor conv2d_forward(const Tensor& x, const FilterBank& fb) {
    validate(fb);
    if (x.rank() != 3 || x.dim(0) != fb.in_channels()) {
        throw std::invalid_argument("reference conv2d: bad input " + x.shape_str());
    }
    const std::size_t rows = x.dim(1);
    const std::size_t cols = x.dim(2);
    const std::size_t m = fb.kernel_rows();
    const std::size_t n = fb.kernel_cols();
    const bool same = fb.padding == Padding::kSameZero;
    if (!same && (rows < m || cols < n)) {
        throw std::invalid_argument("reference conv2d: input smaller than kernel");
    }
    const std::size_t out_rows = same ? rows : rows - m + 1;
    const std::size_t out_cols = same ? cols : cols - n + 1;
    const long long off_r = same ? static_cast<long long>(m / 2) : 0;
    const long long off_c = same ? static_cast<long long>(n / 2) : 0;

    Tensor out({fb.filters(), out_rows, out_cols});
    for (std::size_t k = 0; k < fb.filters(); ++k) {
        for (std::size_t r = 0; r < out_rows; ++r) {
            for (std::size_t c = 0; c < out_cols; ++c) {
                double acc = fb.has_bias() ? fb.bias[k] : 0.0;
                for (std::size_t ci = 0; ci < fb.in_channels(); ++ci) {
                    for (std::size_t dm = 0; dm < m; ++dm) {
                        for (std::size_t dn = 0; dn < n; ++dn) {
                            const long long sr = static_cast<long long>(r + dm) - off_r;
                            const long long sc = static_cast<long long>(c + dn) - off_c;
                            if (sr < 0 || sr >= static_cast<long long>(rows) || sc < 0 ||
                                sc >= static_cast<long long>(cols)) {
                                continue;
                            }
                            acc += fb.weights(k, ci, dm, dn) *
                                   x(ci, static_cast<std::size_t>(sr), static_cast<std::size_t>(sc));
                        }
                    }
                }
                out(k, r, c) = acc;
            }
        }
    }
    return out;
}

Tensor avg_pool_forward(const Tensor& x, std::size_t pool_rows, std::size_t pool_cols) {
    if (x.rank() != 3 || pool_rows == 0 || pool_cols == 0 || pool_rows > x.dim(1) ||
        pool_cols > x.dim(2)) {
        throw std::invalid_argument("reference avg pool: bad input or window");
    }
    const std::size_t out_rows = x.dim(1) / pool_rows;
    const std::size_t out_cols = x.dim(2) / pool_cols;
    Tensor out({x.dim(0), out_rows, out_cols});
    for (std::size_t ch = 0; ch < x.dim(0); ++ch) {
        for (std::size_t pr = 0; pr < out_rows; ++pr) {
            for (std::size_t pc = 0; pc < out_cols; ++pc) {
                double acc = 0.0;
                for (std::size_t i = 0; i < pool_rows; ++i) {
                    for (std::size_t j = 0; j < pool_cols; ++j) {
                        acc += x(ch, pr * pool_rows + i, pc * pool_cols + j);
                    }
                }
                out(ch, pr, pc) = acc / static_cast<double>(pool_rows * pool_cols);
            }
        }
    }
    return out;
}

Tensor histogram_forward(const Tensor& f, const HistogramParams& p) {
    if (f.rank() != 3 || f.dim(0) != p.channels()) {
        throw std::invalid_argument("reference histogram: bad input " + f.shape_str());
    }
    const std::size_t rows = f.dim(1);
    const std::size_t cols = f.dim(2);
    Tensor rbf({p.bins(), rows, cols});
    for (std::size_t b = 0; b < p.bins(); ++b) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                double u = -p.centers[b];
                for (std::size_t k = 0; k < p.channels(); ++k) u += p.mix(b, k) * f(k, r, c);
                rbf(b, r, c) = std::exp(-p.widths[b] * p.widths[b] * u * u);
            }
        }
    }
    return avg_pool_forward(rbf, p.pool_rows, p.pool_cols);
}

}  // namespace nehd::reference
