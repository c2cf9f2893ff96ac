#include "nehd/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nehd {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

Waveform resample(const Waveform& w, int target_rate) {
    if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    if (w.sample_rate <= 0) throw std::invalid_argument("resample: source rate must be positive");
    if (target_rate == w.sample_rate) return w;

    const std::size_t in_len = w.samples.size();
    const double ratio = static_cast<double>(target_rate) / w.sample_rate;
    const std::size_t out_len =
        static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * ratio));

    // cutoff at the narrower Nyquist; kernel half-width grows when
    // downsampling so the stretched sinc keeps its zero-crossing count
    const double cutoff = std::min(1.0, ratio);
    constexpr int kZeroCrossings = 32;
    const double half_width = kZeroCrossings / cutoff;

    Waveform out;
    out.sample_rate = target_rate;
    out.samples.resize(out_len);

    const auto n = static_cast<std::ptrdiff_t>(in_len);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(out_len); ++j) {
        const double t = static_cast<double>(j) / ratio;  // position in input samples
        const auto lo = static_cast<std::ptrdiff_t>(std::ceil(t - half_width));
        const auto hi = static_cast<std::ptrdiff_t>(std::floor(t + half_width));
        double acc = 0.0;
        double wsum = 0.0;
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0); i <= std::min(hi, n - 1); ++i) {
            const double d = (static_cast<double>(i) - t) * cutoff;
            const double win = 0.5 + 0.5 * std::cos(std::numbers::pi * d / kZeroCrossings);
            const double k = sinc(d) * win;
            acc += w.samples[static_cast<std::size_t>(i)] * k;
            wsum += k;
        }
        out.samples[static_cast<std::size_t>(j)] = wsum != 0.0 ? acc / wsum : 0.0;
    }
    return out;
}

}  // namespace nehd
