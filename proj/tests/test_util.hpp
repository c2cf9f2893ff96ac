#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "nehd/rng.hpp"
#include "nehd/tensor.hpp"

namespace testutil {

inline nehd::Tensor random_tensor(const std::vector<std::size_t>& shape, std::mt19937_64& rng,
                                  double lo = -1.0, double hi = 1.0) {
    nehd::Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = nehd::uniform(rng, lo, hi);
    return t;
}

inline double max_abs_diff(const nehd::Tensor& a, const nehd::Tensor& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

// Relative error with a floor so near-zero pairs compare absolutely.
inline double rel_err(double analytic, double numeric) {
    const double diff = std::abs(analytic - numeric);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    return diff / scale;
}

inline constexpr double kFdStep = 1e-5;

// Central finite differences of a scalar function against an analytic
// gradient, element by element over one tensor. Returns the worst relative
// error seen. `param` is perturbed in place and restored.
template <typename LossFn>
double fd_check(nehd::Tensor& param, const nehd::Tensor& analytic, LossFn&& loss) {
    double worst = 0.0;
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double saved = param.data()[i];
        param.data()[i] = saved + kFdStep;
        const double up = loss();
        param.data()[i] = saved - kFdStep;
        const double down = loss();
        param.data()[i] = saved;
        const double numeric = (up - down) / (2.0 * kFdStep);
        worst = std::max(worst, rel_err(analytic.data()[i], numeric));
    }
    return worst;
}

// Projection target for gradient checks: L = sum(out * proj) has upstream
// gradient exactly `proj`.
inline double dot(const nehd::Tensor& a, const nehd::Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

// Fresh scratch directory under the system temp root, cleaned on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("nehd_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
