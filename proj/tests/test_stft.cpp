#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nehd/fft.hpp"
#include "nehd/rng.hpp"
#include "nehd/stft.hpp"

using nehd::NormStats;
using nehd::Spectrogram;
using nehd::StftConfig;
using nehd::Tensor;

namespace {

StftConfig cfg_of(std::size_t window, std::size_t hop, std::size_t bins, bool center,
                  nehd::MagnitudeScale scale = nehd::MagnitudeScale::kLogPower) {
    StftConfig c;
    c.window_length = window;
    c.hop_length = hop;
    c.freq_bins = bins;
    c.center_pad = center;
    c.magnitude_scale = scale;
    return c;
}

std::vector<double> random_samples(std::size_t n, std::uint64_t seed) {
    auto rng = nehd::make_rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = nehd::uniform(rng, -1.0, 1.0);
    return x;
}

}  // namespace

TEST_CASE("a 3 s segment at 16 kHz maps to a 192x12 plane under the defaults") {
    const StftConfig cfg;  // 6144 / 4096 / 192 / center / log power
    const Tensor spec = nehd::stft(random_samples(48000, 1), cfg);
    REQUIRE(spec.rank() == 2);
    CHECK(spec.dim(0) == 192);
    CHECK(spec.dim(1) == 12);
    CHECK(spec.all_finite());
}

TEST_CASE("an all-zero segment gives an all-zero linear spectrogram") {
    const Tensor spec = nehd::stft(std::vector<double>(2048, 0.0),
                                   cfg_of(256, 128, 129, true, nehd::MagnitudeScale::kLinear));
    for (std::size_t i = 0; i < spec.size(); ++i) CHECK(spec.data()[i] == 0.0);
}

TEST_CASE("a bin-centered sine puts every frame's argmax at that bin") {
    const std::size_t window = 512, k = 37;
    std::vector<double> x(window * 3);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::sin(2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                        static_cast<double>(window));
    }
    const Tensor spec =
        nehd::stft(x, cfg_of(window, 256, window / 2 + 1, false, nehd::MagnitudeScale::kLinear));
    for (std::size_t t = 0; t < spec.dim(1); ++t) {
        std::size_t argmax = 0;
        for (std::size_t f = 1; f < spec.dim(0); ++f) {
            if (spec(f, t) > spec(argmax, t)) argmax = f;
        }
        CHECK(argmax == k);
    }
}

TEST_CASE("frame counts follow the padding law over a full sweep") {
    for (std::size_t window : {8, 16, 32}) {
        for (std::size_t hop = 1; hop <= window; ++hop) {
            for (std::size_t len : {window, window + 1, 2 * window, 5 * window + 3}) {
                // centered
                const std::size_t frames_c = nehd::stft_num_frames(len, cfg_of(window, hop, 4, true));
                CHECK(frames_c == len / hop + 1);
                const Tensor sc = nehd::stft(random_samples(len, len + hop), cfg_of(window, hop, 4, true));
                CHECK(sc.dim(1) == frames_c);
                // uncentered
                const std::size_t frames_n =
                    nehd::stft_num_frames(len, cfg_of(window, hop, 4, false));
                CHECK(frames_n == (len - window) / hop + 1);
                const Tensor sn =
                    nehd::stft(random_samples(len, len), cfg_of(window, hop, 4, false));
                CHECK(sn.dim(1) == frames_n);
            }
        }
    }
}

TEST_CASE("increasing the hop never increases the frame count") {
    for (bool center : {true, false}) {
        std::size_t prev = SIZE_MAX;
        for (std::size_t hop = 1; hop <= 64; ++hop) {
            const std::size_t frames = nehd::stft_num_frames(640, cfg_of(64, hop, 4, center));
            CHECK(frames <= prev);
            prev = frames;
        }
    }
}

TEST_CASE("frame energy matches the windowed time-domain energy") {
    const std::size_t n = 64;
    const auto x = random_samples(n, 9);
    const Tensor spec = nehd::stft(x, cfg_of(n, n, n / 2 + 1, false, nehd::MagnitudeScale::kLinear));
    REQUIRE(spec.dim(1) == 1);

    double time_e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / n);
        time_e += hann * x[i] * hann * x[i];
    }
    // one-sided accounting doubles every bin except DC and Nyquist
    double freq_e = spec(0, 0) * spec(0, 0) + spec(n / 2, 0) * spec(n / 2, 0);
    for (std::size_t k = 1; k < n / 2; ++k) freq_e += 2.0 * spec(k, 0) * spec(k, 0);
    freq_e /= static_cast<double>(n);
    CHECK(std::abs(freq_e - time_e) < 1e-6 * time_e);
}

TEST_CASE("every searched grid configuration produces a valid plane") {
    const auto x = random_samples(48000, 2);
    for (std::size_t window : {2048, 4096, 6144}) {
        for (std::size_t hop : {1024, 2048, 4096}) {
            if (hop > window) continue;
            for (std::size_t bins : {48, 96, 192}) {
                const StftConfig cfg = cfg_of(window, hop, bins, true);
                const Tensor spec = nehd::stft(x, cfg);
                CHECK(spec.dim(0) == bins);
                CHECK(spec.dim(1) == nehd::stft_num_frames(x.size(), cfg));
                CHECK(spec.all_finite());
            }
        }
    }
}

TEST_CASE("config validation enforces the hop and bin bounds") {
    CHECK_THROWS(nehd::validate(cfg_of(64, 65, 4, true)));   // hop > window
    CHECK_THROWS(nehd::validate(cfg_of(64, 0, 4, true)));    // zero hop
    CHECK_THROWS(nehd::validate(cfg_of(64, 32, 34, true)));  // bins > window/2+1
    CHECK_THROWS(nehd::validate(cfg_of(64, 32, 0, true)));   // zero bins
    nehd::validate(cfg_of(64, 64, 33, true));
}

TEST_CASE("short input without centering is an error, empty input always is") {
    CHECK_THROWS(nehd::stft(std::vector<double>(63, 0.0), cfg_of(64, 32, 4, false)));
    CHECK_THROWS(nehd::stft(std::vector<double>{}, cfg_of(64, 32, 4, true)));
}

TEST_CASE("two-point statistics give mean one and unit deviation") {
    Spectrogram a, b;
    a.values = Tensor({4, 3}, 0.0);
    b.values = Tensor({4, 3}, 2.0);
    const NormStats stats = nehd::fit_normalizer({a, b});
    REQUIRE(stats.bins() == 4);
    for (std::size_t f = 0; f < 4; ++f) {
        CHECK(stats.mean[f] == 1.0);
        CHECK(stats.std_dev[f] == 1.0);
    }
}

TEST_CASE("constant input clamps the deviation at the epsilon floor") {
    Spectrogram a, b;
    a.values = Tensor({2, 5}, 7.5);
    b.values = Tensor({2, 5}, 7.5);
    const NormStats stats = nehd::fit_normalizer({a, b});
    for (std::size_t f = 0; f < 2; ++f) {
        CHECK(stats.mean[f] == 7.5);
        CHECK(stats.std_dev[f] == nehd::kNormStdEpsilon);
    }
}

TEST_CASE("streaming statistics match a two-pass computation") {
    auto rng = nehd::make_rng(31);
    std::vector<Spectrogram> specs(6);
    for (auto& s : specs) {
        s.values = Tensor({5, 7});
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            s.values.data()[i] = nehd::uniform(rng, -4.0, 4.0);
        }
    }
    const NormStats streaming = nehd::fit_normalizer(specs);

    for (std::size_t f = 0; f < 5; ++f) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& s : specs) {
            for (std::size_t t = 0; t < 7; ++t) sum += s.values(f, t), ++n;
        }
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto& s : specs) {
            for (std::size_t t = 0; t < 7; ++t) {
                sq += (s.values(f, t) - mean) * (s.values(f, t) - mean);
            }
        }
        const double std_dev = std::sqrt(sq / static_cast<double>(n));
        CHECK(std::abs(streaming.mean[f] - mean) < 1e-10);
        CHECK(std::abs(streaming.std_dev[f] - std_dev) < 1e-10);
    }
}

TEST_CASE("merged accumulators equal one combined pass") {
    auto rng = nehd::make_rng(77);
    std::vector<Spectrogram> specs(4);
    for (auto& s : specs) {
        s.values = Tensor({3, 6});
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            s.values.data()[i] = nehd::uniform(rng, 0.0, 10.0);
        }
    }
    nehd::NormAccumulator whole, left, right;
    for (const auto& s : specs) whole.add(s);
    left.add(specs[0]);
    left.add(specs[1]);
    right.add(specs[2]);
    right.add(specs[3]);
    left.merge(right);
    const NormStats a = whole.finish();
    const NormStats b = left.finish();
    for (std::size_t f = 0; f < 3; ++f) {
        CHECK(std::abs(a.mean[f] - b.mean[f]) < 1e-12);
        CHECK(std::abs(a.std_dev[f] - b.std_dev[f]) < 1e-12);
    }
}

TEST_CASE("fitting requires at least two spectrograms") {
    CHECK_THROWS(nehd::fit_normalizer({}));
    Spectrogram one;
    one.values = Tensor({2, 2}, 1.0);
    CHECK_THROWS(nehd::fit_normalizer({one}));
}

TEST_CASE("normalizing the fit inputs centers every bin") {
    auto rng = nehd::make_rng(13);
    std::vector<Spectrogram> specs(5);
    for (auto& s : specs) {
        s.values = Tensor({4, 6});
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            s.values.data()[i] = nehd::uniform(rng, -2.0, 5.0);
        }
    }
    const NormStats stats = nehd::fit_normalizer(specs);
    std::vector<double> bin_sum(4, 0.0);
    for (const auto& s : specs) {
        const Spectrogram n = nehd::normalize(s, stats);
        for (std::size_t f = 0; f < 4; ++f) {
            for (std::size_t t = 0; t < 6; ++t) bin_sum[f] += n.values(f, t);
        }
    }
    for (double sum : bin_sum) CHECK(std::abs(sum / 30.0) < 1e-8);
}

TEST_CASE("identity statistics leave values untouched") {
    Spectrogram s;
    s.values = Tensor({2, 3});
    for (std::size_t i = 0; i < 6; ++i) s.values.data()[i] = static_cast<double>(i) - 2.5;
    NormStats stats;
    stats.mean = {0.0, 0.0};
    stats.std_dev = {1.0, 1.0};
    const Spectrogram n = nehd::normalize(s, stats);
    for (std::size_t i = 0; i < 6; ++i) CHECK(n.values.data()[i] == s.values.data()[i]);
}

TEST_CASE("denormalizing inverts normalization") {
    auto rng = nehd::make_rng(55);
    Spectrogram s;
    s.values = Tensor({3, 4});
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        s.values.data()[i] = nehd::uniform(rng, -10.0, 10.0);
    }
    NormStats stats;
    stats.mean = {1.0, -2.0, 0.5};
    stats.std_dev = {2.0, 0.25, 3.0};
    const Spectrogram n = nehd::normalize(s, stats);
    for (std::size_t f = 0; f < 3; ++f) {
        for (std::size_t t = 0; t < 4; ++t) {
            const double back = n.values(f, t) * stats.std_dev[f] + stats.mean[f];
            CHECK(std::abs(back - s.values(f, t)) < 1e-10);
        }
    }
}

TEST_CASE("normalization rejects mismatched bin counts") {
    Spectrogram s;
    s.values = Tensor({3, 4}, 1.0);
    NormStats stats;
    stats.mean = {0.0, 0.0};
    stats.std_dev = {1.0, 1.0};
    CHECK_THROWS(nehd::normalize(s, stats));
}
