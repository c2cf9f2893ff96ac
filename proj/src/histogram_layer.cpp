#include "nehd/histogram_layer.hpp"

#include <cmath>
#include <stdexcept>

#include "nehd/pooling.hpp"
#include "nehd/rng.hpp"

namespace nehd {

const char* histogram_init_name(HistogramInit mode) {
    return mode == HistogramInit::kUniformRange ? "uniform_range" : "random";
}

HistogramInit histogram_init_from_name(const std::string& name) {
    if (name == "uniform_range") return HistogramInit::kUniformRange;
    if (name == "random") return HistogramInit::kRandom;
    throw std::invalid_argument("unknown histogram init mode '" + name + "'");
}

HistogramParams init_histogram(std::size_t bins, std::size_t channels, HistogramInit mode,
                               double lo, double hi, std::uint64_t seed, std::size_t pool_rows,
                               std::size_t pool_cols) {
    if (bins == 0) throw std::invalid_argument("histogram init: bins must be >= 1");
    if (channels == 0) throw std::invalid_argument("histogram init: channels must be >= 1");
    if (!(hi > lo)) throw std::invalid_argument("histogram init: range needs hi > lo");

    HistogramParams p;
    p.mix = Tensor({bins, channels}, 1.0 / static_cast<double>(channels));
    p.centers = Tensor({bins});
    p.widths = Tensor({bins}, static_cast<double>(bins) / (hi - lo));
    p.pool_rows = pool_rows;
    p.pool_cols = pool_cols;

    if (mode == HistogramInit::kUniformRange) {
        if (bins == 1) {
            p.centers[0] = 0.5 * (lo + hi);
        } else {
            for (std::size_t b = 0; b < bins; ++b) {
                p.centers[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins - 1);
            }
        }
    } else {
        auto rng = make_rng(mix_seed(seed, "histogram_centers"));
        for (std::size_t b = 0; b < bins; ++b) p.centers[b] = uniform(rng, lo, hi);
    }
    return p;
}

namespace {

void check_input(const Tensor& f, const HistogramParams& p) {
    if (f.rank() != 3) {
        throw std::invalid_argument("histogram: input must be [channels x rows x cols], got " +
                                    f.shape_str());
    }
    if (f.dim(0) != p.channels()) {
        throw std::invalid_argument("histogram: input has " + std::to_string(f.dim(0)) +
                                    " channels but the mix expects " +
                                    std::to_string(p.channels()));
    }
}

}  // namespace

HistogramForward histogram_forward_cached(const Tensor& f, const HistogramParams& p) {
    check_input(f, p);
    const std::size_t ch = p.channels();
    const std::size_t bins = p.bins();
    const std::size_t rows = f.dim(1);
    const std::size_t cols = f.dim(2);

    HistogramForward fwd;
    fwd.u = Tensor({bins, rows, cols});
    fwd.rbf = Tensor({bins, rows, cols});
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(bins); ++b) {
        const auto bi = static_cast<std::size_t>(b);
        const double gamma2 = p.widths[bi] * p.widths[bi];
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                double z = -p.centers[bi];
                for (std::size_t k = 0; k < ch; ++k) z += p.mix(bi, k) * f(k, r, c);
                fwd.u(bi, r, c) = z;
                fwd.rbf(bi, r, c) = std::exp(-gamma2 * z * z);
            }
        }
    }
    fwd.pooled = avg_pool_forward(fwd.rbf, p.pool_rows, p.pool_cols);
    return fwd;
}

Tensor histogram_forward(const Tensor& f, const HistogramParams& p) {
    return histogram_forward_cached(f, p).pooled;
}

HistogramGrads histogram_backward(const Tensor& f, const HistogramParams& p,
                                  const HistogramForward& cache, const Tensor& upstream) {
    check_input(f, p);
    const std::size_t ch = p.channels();
    const std::size_t bins = p.bins();
    const std::size_t rows = f.dim(1);
    const std::size_t cols = f.dim(2);
    if (!cache.pooled.same_shape(upstream)) {
        throw std::invalid_argument("histogram backward: upstream " + upstream.shape_str() +
                                    " does not match pooled output " + cache.pooled.shape_str());
    }

    // Pooling spreads g/(S*T) over each window; then per location
    //   d rbf/d u     = -2 gamma^2 u rbf
    //   d rbf/d gamma = -2 gamma u^2 rbf
    //   d u/d center  = -1, d u/d mix(b,k) = f_k, d u/d f_k = mix(b,k).
    const Tensor g_rbf = avg_pool_backward(cache.rbf.shape(), p.pool_rows, p.pool_cols, upstream);

    HistogramGrads grads;
    grads.input = Tensor::zeros_like(f);
    grads.mix = Tensor::zeros_like(p.mix);
    grads.centers = Tensor::zeros_like(p.centers);
    grads.widths = Tensor::zeros_like(p.widths);

#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(bins); ++b) {
        const auto bi = static_cast<std::size_t>(b);
        const double gamma = p.widths[bi];
        const double gamma2 = gamma * gamma;
        double g_center = 0.0;
        double g_gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double g = g_rbf(bi, r, c);
                if (g == 0.0) continue;
                const double u = cache.u(bi, r, c);
                const double e = cache.rbf(bi, r, c);
                const double gz = g * (-2.0) * gamma2 * u * e;  // d loss/d u
                g_center -= gz;                                 // d u/d center = -1
                g_gamma += g * (-2.0) * gamma * u * u * e;
                for (std::size_t k = 0; k < ch; ++k) {
                    grads.mix(bi, k) += gz * f(k, r, c);
                }
            }
        }
        grads.centers[bi] = g_center;
        grads.widths[bi] = g_gamma;
    }

    // Input gradient accumulates over bins; keep a fixed bin order per input
    // element so the reduction is deterministic under any thread count.
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(ch); ++k) {
        const auto ki = static_cast<std::size_t>(k);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (std::size_t b = 0; b < bins; ++b) {
                    const double g = g_rbf(b, r, c);
                    if (g == 0.0) continue;
                    const double gamma = p.widths[b];
                    const double gz = g * (-2.0) * gamma * gamma * cache.u(b, r, c) * cache.rbf(b, r, c);
                    acc += gz * p.mix(b, ki);
                }
                grads.input(ki, r, c) = acc;
            }
        }
    }
    return grads;
}

}  // namespace nehd
