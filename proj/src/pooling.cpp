#include "nehd/pooling.hpp"

#include <sstream>
#include <stdexcept>

namespace nehd {

namespace {

void check_window(std::size_t rows, std::size_t cols, std::size_t pool_rows,
                  std::size_t pool_cols) {
    if (pool_rows == 0 || pool_cols == 0) {
        throw std::invalid_argument("avg pool: window dims must be positive");
    }
    if (pool_rows > rows || pool_cols > cols) {
        std::ostringstream os;
        os << "avg pool: window " << pool_rows << "x" << pool_cols << " exceeds plane " << rows
           << "x" << cols;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

Tensor avg_pool_forward(const Tensor& x, std::size_t pool_rows, std::size_t pool_cols) {
    if (x.rank() != 3) {
        throw std::invalid_argument("avg pool: input must be [channels x rows x cols], got " +
                                    x.shape_str());
    }
    check_window(x.dim(1), x.dim(2), pool_rows, pool_cols);
    const std::size_t out_rows = x.dim(1) / pool_rows;
    const std::size_t out_cols = x.dim(2) / pool_cols;
    const double inv = 1.0 / static_cast<double>(pool_rows * pool_cols);

    Tensor out({x.dim(0), out_rows, out_cols});
#pragma omp parallel for collapse(2) schedule(static)
    for (long long ch = 0; ch < static_cast<long long>(x.dim(0)); ++ch) {
        for (long long pr = 0; pr < static_cast<long long>(out_rows); ++pr) {
            for (std::size_t pc = 0; pc < out_cols; ++pc) {
                double acc = 0.0;
                for (std::size_t i = 0; i < pool_rows; ++i) {
                    for (std::size_t j = 0; j < pool_cols; ++j) {
                        acc += x(static_cast<std::size_t>(ch),
                                 static_cast<std::size_t>(pr) * pool_rows + i, pc * pool_cols + j);
                    }
                }
                out(static_cast<std::size_t>(ch), static_cast<std::size_t>(pr), pc) = acc * inv;
            }
        }
    }
    return out;
}

Tensor avg_pool_backward(const std::vector<std::size_t>& input_shape, std::size_t pool_rows,
                         std::size_t pool_cols, const Tensor& upstream) {
    if (input_shape.size() != 3) {
        throw std::invalid_argument("avg pool backward: input shape must be rank 3");
    }
    check_window(input_shape[1], input_shape[2], pool_rows, pool_cols);
    const std::size_t out_rows = input_shape[1] / pool_rows;
    const std::size_t out_cols = input_shape[2] / pool_cols;
    if (upstream.rank() != 3 || upstream.dim(0) != input_shape[0] || upstream.dim(1) != out_rows ||
        upstream.dim(2) != out_cols) {
        std::ostringstream os;
        os << "avg pool backward: upstream " << upstream.shape_str() << " does not match pooled ["
           << input_shape[0] << " x " << out_rows << " x " << out_cols << "]";
        throw std::invalid_argument(os.str());
    }
    const double inv = 1.0 / static_cast<double>(pool_rows * pool_cols);

    Tensor grad(input_shape);
#pragma omp parallel for collapse(2) schedule(static)
    for (long long ch = 0; ch < static_cast<long long>(input_shape[0]); ++ch) {
        for (long long r = 0; r < static_cast<long long>(input_shape[1]); ++r) {
            const std::size_t pr = static_cast<std::size_t>(r) / pool_rows;
            if (pr >= out_rows) continue;
            for (std::size_t c = 0; c < input_shape[2]; ++c) {
                const std::size_t pc = c / pool_cols;
                if (pc >= out_cols) continue;
                grad(static_cast<std::size_t>(ch), static_cast<std::size_t>(r), c) =
                    upstream(static_cast<std::size_t>(ch), pr, pc) * inv;
            }
        }
    }
    return grad;
}

}  // namespace nehd
