#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nehd/fft.hpp"
#include "nehd/resample.hpp"
#include "nehd/rng.hpp"

using nehd::Waveform;

TEST_CASE("resampling at the source rate is the identity") {
    Waveform w;
    w.sample_rate = 16000;
    auto rng = nehd::make_rng(3);
    for (int i = 0; i < 1000; ++i) w.samples.push_back(nehd::uniform(rng, -1.0, 1.0));
    const Waveform out = nehd::resample(w, 16000);
    CHECK(out.sample_rate == 16000);
    REQUIRE(out.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i) CHECK(out.samples[i] == w.samples[i]);
}

TEST_CASE("a 100 Hz tone survives 48k to 16k downsampling") {
    Waveform w;
    w.sample_rate = 48000;
    w.samples.resize(48000);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        w.samples[i] = std::sin(2.0 * M_PI * 100.0 * static_cast<double>(i) / 48000.0);
    }
    const Waveform out = nehd::resample(w, 16000);
    CHECK(out.sample_rate == 16000);
    CHECK(out.samples.size() == 16000);

    // 1 s of signal puts bin index = frequency in Hz
    nehd::fft::Plan plan(out.samples.size());
    std::vector<nehd::fft::cplx> spec;
    plan.forward_real(out.samples, spec, out.samples.size() / 2 + 1);
    std::size_t argmax = 1;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (std::abs(spec[k]) > std::abs(spec[argmax])) argmax = k;
    }
    CHECK(argmax == 100);
}

TEST_CASE("DC level is preserved through rate conversion") {
    Waveform w;
    w.sample_rate = 44100;
    w.samples.assign(44100, 0.7);
    const Waveform out = nehd::resample(w, 16000);
    CHECK(out.sample_rate == 16000);
    for (double s : out.samples) CHECK(std::abs(s - 0.7) <= 1e-3);
}

TEST_CASE("output length follows the rate ratio") {
    Waveform w;
    w.sample_rate = 22050;
    w.samples.assign(22050, 0.1);
    const Waveform out = nehd::resample(w, 16000);
    CHECK(out.samples.size() ==
          static_cast<std::size_t>(std::llround(22050.0 * 16000.0 / 22050.0)));

    Waveform up;
    up.sample_rate = 8000;
    up.samples.assign(1234, 0.1);
    CHECK(nehd::resample(up, 16000).samples.size() ==
          static_cast<std::size_t>(std::llround(1234.0 * 16000.0 / 8000.0)));
}

TEST_CASE("nonpositive target rate is rejected") {
    Waveform w;
    w.sample_rate = 16000;
    w.samples.assign(100, 0.0);
    CHECK_THROWS(nehd::resample(w, 0));
    CHECK_THROWS(nehd::resample(w, -1));
}
