#include "nehd/conv2d.hpp"

#include <sstream>
#include <stdexcept>

namespace nehd {

void validate(const FilterBank& fb) {
    if (fb.weights.rank() != 4) {
        throw std::invalid_argument("filter bank: weights must be rank 4, got " +
                                    fb.weights.shape_str());
    }
    if (fb.kernel_rows() % 2 == 0 || fb.kernel_cols() % 2 == 0) {
        throw std::invalid_argument("filter bank: kernel dims must be odd, got " +
                                    fb.weights.shape_str());
    }
    if (fb.has_bias() && (fb.bias.rank() != 1 || fb.bias.dim(0) != fb.filters())) {
        throw std::invalid_argument("filter bank: bias length does not match filter count");
    }
}

namespace {

void check_input(const Tensor& x, const FilterBank& fb) {
    validate(fb);
    if (x.rank() != 3) {
        throw std::invalid_argument("conv2d: input must be [channels x rows x cols], got " +
                                    x.shape_str());
    }
    if (x.dim(0) != fb.in_channels()) {
        std::ostringstream os;
        os << "conv2d: input has " << x.dim(0) << " channels but the filter bank expects "
           << fb.in_channels();
        throw std::invalid_argument(os.str());
    }
    if (fb.padding == Padding::kValid &&
        (x.dim(1) < fb.kernel_rows() || x.dim(2) < fb.kernel_cols())) {
        throw std::invalid_argument("conv2d: valid padding needs input at least kernel-sized, got " +
                                    x.shape_str() + " under " + fb.weights.shape_str());
    }
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const FilterBank& fb) {
    check_input(x, fb);
    const std::size_t ch = fb.in_channels();
    const std::size_t rows = x.dim(1);
    const std::size_t cols = x.dim(2);
    const std::size_t m = fb.kernel_rows();
    const std::size_t n = fb.kernel_cols();
    const bool same = fb.padding == Padding::kSameZero;
    const std::size_t out_rows = same ? rows : rows - m + 1;
    const std::size_t out_cols = same ? cols : cols - n + 1;
    const long long off_r = same ? static_cast<long long>(m / 2) : 0;
    const long long off_c = same ? static_cast<long long>(n / 2) : 0;

    Tensor out({fb.filters(), out_rows, out_cols});
#pragma omp parallel for collapse(2) schedule(static)
    for (long long k = 0; k < static_cast<long long>(fb.filters()); ++k) {
        for (long long r = 0; r < static_cast<long long>(out_rows); ++r) {
            for (std::size_t c = 0; c < out_cols; ++c) {
                double acc = fb.has_bias() ? fb.bias[static_cast<std::size_t>(k)] : 0.0;
                for (std::size_t ci = 0; ci < ch; ++ci) {
                    for (std::size_t dm = 0; dm < m; ++dm) {
                        const long long sr = r + static_cast<long long>(dm) - off_r;
                        if (sr < 0 || sr >= static_cast<long long>(rows)) continue;
                        for (std::size_t dn = 0; dn < n; ++dn) {
                            const long long sc =
                                static_cast<long long>(c) + static_cast<long long>(dn) - off_c;
                            if (sc < 0 || sc >= static_cast<long long>(cols)) continue;
                            acc += fb.weights(static_cast<std::size_t>(k), ci, dm, dn) *
                                   x(ci, static_cast<std::size_t>(sr), static_cast<std::size_t>(sc));
                        }
                    }
                }
                out(static_cast<std::size_t>(k), static_cast<std::size_t>(r), c) = acc;
            }
        }
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor& x, const FilterBank& fb, const Tensor& upstream) {
    check_input(x, fb);
    const std::size_t ch = fb.in_channels();
    const std::size_t rows = x.dim(1);
    const std::size_t cols = x.dim(2);
    const std::size_t m = fb.kernel_rows();
    const std::size_t n = fb.kernel_cols();
    const bool same = fb.padding == Padding::kSameZero;
    const std::size_t out_rows = same ? rows : rows - m + 1;
    const std::size_t out_cols = same ? cols : cols - n + 1;
    if (upstream.rank() != 3 || upstream.dim(0) != fb.filters() || upstream.dim(1) != out_rows ||
        upstream.dim(2) != out_cols) {
        std::ostringstream os;
        os << "conv2d backward: upstream grad " << upstream.shape_str() << " does not match output ["
           << fb.filters() << " x " << out_rows << " x " << out_cols << "]";
        throw std::invalid_argument(os.str());
    }
    const long long off_r = same ? static_cast<long long>(m / 2) : 0;
    const long long off_c = same ? static_cast<long long>(n / 2) : 0;

    ConvGrads grads;
    grads.input = Tensor::zeros_like(x);
    grads.weights = Tensor::zeros_like(fb.weights);
    if (fb.has_bias()) grads.bias = Tensor::zeros_like(fb.bias);

    // d out(k,r,c) / d w(k,ci,dm,dn) = x(ci, r+dm-off, c+dn-off); each weight
    // element owns its own reduction so the parallel order is fixed.
#pragma omp parallel for collapse(2) schedule(static)
    for (long long k = 0; k < static_cast<long long>(fb.filters()); ++k) {
        for (long long ci = 0; ci < static_cast<long long>(ch); ++ci) {
            for (std::size_t dm = 0; dm < m; ++dm) {
                for (std::size_t dn = 0; dn < n; ++dn) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < out_rows; ++r) {
                        const long long sr = static_cast<long long>(r + dm) - off_r;
                        if (sr < 0 || sr >= static_cast<long long>(rows)) continue;
                        for (std::size_t c = 0; c < out_cols; ++c) {
                            const long long sc = static_cast<long long>(c + dn) - off_c;
                            if (sc < 0 || sc >= static_cast<long long>(cols)) continue;
                            acc += upstream(static_cast<std::size_t>(k), r, c) *
                                   x(static_cast<std::size_t>(ci), static_cast<std::size_t>(sr),
                                     static_cast<std::size_t>(sc));
                        }
                    }
                    grads.weights(static_cast<std::size_t>(k), static_cast<std::size_t>(ci), dm, dn) =
                        acc;
                }
            }
        }
    }

    // d out(k,r,c) / d x(ci,a,b) = w(k,ci,dm,dn) at (r,c) = (a-dm+off, b-dn+off).
#pragma omp parallel for collapse(2) schedule(static)
    for (long long ci = 0; ci < static_cast<long long>(ch); ++ci) {
        for (long long a = 0; a < static_cast<long long>(rows); ++a) {
            for (std::size_t b = 0; b < cols; ++b) {
                double acc = 0.0;
                for (std::size_t k = 0; k < fb.filters(); ++k) {
                    for (std::size_t dm = 0; dm < m; ++dm) {
                        const long long r = a - static_cast<long long>(dm) + off_r;
                        if (r < 0 || r >= static_cast<long long>(out_rows)) continue;
                        for (std::size_t dn = 0; dn < n; ++dn) {
                            const long long c =
                                static_cast<long long>(b) - static_cast<long long>(dn) + off_c;
                            if (c < 0 || c >= static_cast<long long>(out_cols)) continue;
                            acc += fb.weights(k, static_cast<std::size_t>(ci), dm, dn) *
                                   upstream(k, static_cast<std::size_t>(r), static_cast<std::size_t>(c));
                        }
                    }
                }
                grads.input(static_cast<std::size_t>(ci), static_cast<std::size_t>(a), b) = acc;
            }
        }
    }

    if (fb.has_bias()) {
        for (std::size_t k = 0; k < fb.filters(); ++k) {
            double acc = 0.0;
            for (std::size_t r = 0; r < out_rows; ++r) {
                for (std::size_t c = 0; c < out_cols; ++c) acc += upstream(k, r, c);
            }
            grads.bias[k] = acc;
        }
    }
    return grads;
}

}  // namespace nehd
