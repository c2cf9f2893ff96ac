#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nehd/conv2d.hpp"
#include "nehd/edge_block.hpp"
#include "nehd/histogram_layer.hpp"
#include "nehd/pooling.hpp"
#include "nehd/reference.hpp"
#include "nehd/rng.hpp"

using namespace nehd;

namespace {

Tensor random_tensor(const std::vector<std::size_t>& shape, std::mt19937_64& rng) {
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = uniform(rng, -1.0, 1.0);
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-24s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.3e\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--quick") quick = true;
    }

    const int reps = quick ? 2 : 5;
    // Quick mode shrinks the planes so the smoke test stays fast; the full
    // run uses the production spectrogram footprint with a batch dimension
    // folded into repetitions.
    const std::size_t rows = quick ? 48 : 192;
    const std::size_t cols = quick ? 12 : 12;
    const int batch = quick ? 4 : 64;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("plane %zux%zu, %d planes per measurement, best of %d\n\n", rows, cols, batch,
                reps);

    std::mt19937_64 rng = make_rng(2026);
    const Tensor plane = random_tensor({rows, cols}, rng);

    // conv2d: the edge bank shape, 8 filters of 3x3 over one channel
    EdgeParams edge = init_edge_filters(EdgeInit::kSobel, 8, 0);
    Tensor conv_in({1, rows, cols});
    for (std::size_t i = 0; i < plane.size(); ++i) conv_in.data()[i] = plane.data()[i];

    Tensor conv_par, conv_ser;
    const double conv_par_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) conv_par = conv2d_forward(conv_in, edge.edge_filters);
    });
    const double conv_ser_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) {
            conv_ser = reference::conv2d_forward(conv_in, edge.edge_filters);
        }
    });
    report("conv2d 8x3x3", conv_ser_ms, conv_par_ms, max_abs_diff(conv_par, conv_ser));

    // average pooling over the 9-channel edge stack
    const Tensor stack = random_tensor({9, rows, cols}, rng);
    Tensor pool_par, pool_ser;
    const double pool_par_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) pool_par = avg_pool_forward(stack, 4, 2);
    });
    const double pool_ser_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) pool_ser = reference::avg_pool_forward(stack, 4, 2);
    });
    report("avg_pool 4x2", pool_ser_ms, pool_par_ms, max_abs_diff(pool_par, pool_ser));

    // histogram layer over the edge stack, 8 bins
    const HistogramParams hist =
        init_histogram(8, 9, HistogramInit::kUniformRange, -3.0, 3.0, 0, 4, 2);
    Tensor hist_par, hist_ser;
    const double hist_par_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) hist_par = histogram_forward(stack, hist);
    });
    const double hist_ser_ms = time_best_of(reps, [&] {
        for (int b = 0; b < batch; ++b) hist_ser = reference::histogram_forward(stack, hist);
    });
    report("histogram 8 bins", hist_ser_ms, hist_par_ms, max_abs_diff(hist_par, hist_ser));

    const double worst = std::max({max_abs_diff(conv_par, conv_ser),
                                   max_abs_diff(pool_par, pool_ser),
                                   max_abs_diff(hist_par, hist_ser)});
    if (worst > 1e-12) {
        std::printf("\nFAIL: parallel kernels diverge from the serial reference\n");
        return 1;
    }
    std::printf("\nparallel kernels match the serial reference to %.1e\n", worst);
    return 0;
}
