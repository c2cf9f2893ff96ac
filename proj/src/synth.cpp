#include "nehd/synth.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nehd/fft.hpp"
#include "nehd/rng.hpp"

namespace nehd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTargetRms = 0.15;

void scale_to_rms(std::vector<double>& y, double target) {
    double sum_sq = 0.0;
    for (double v : y) sum_sq += v * v;
    const double rms = std::sqrt(sum_sq / static_cast<double>(y.size()));
    if (rms <= 0.0) return;
    const double s = target / rms;
    for (double& v : y) v *= s;
}

// Fundamental jittered per source plus three harmonics with fixed rolloff.
void tonal(std::vector<double>& y, int rate, std::mt19937_64& rng) {
    const double f0 = uniform(rng, 55.0, 95.0);
    const double amps[4] = {1.0, 0.6, 0.45, 0.3};
    double phases[4];
    for (double& p : phases) p = uniform(rng, 0.0, kTwoPi);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i) / rate;
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += amps[k] * std::sin(kTwoPi * (k + 1) * f0 * t + phases[k]);
        y[i] = v;
    }
}

// Linear up-chirp restarted every 0.5 s; the sweep band is jittered per source.
void chirp(std::vector<double>& y, int rate, std::mt19937_64& rng) {
    const double f_lo = uniform(rng, 60.0, 100.0);
    const double f_hi = uniform(rng, 280.0, 420.0);
    const double phase0 = uniform(rng, 0.0, kTwoPi);
    const double period = 0.5;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i) / rate;
        const double tau = std::fmod(t, period);
        const double phase = kTwoPi * (f_lo * tau + (f_hi - f_lo) * tau * tau / (2.0 * period));
        y[i] = std::sin(phase + phase0);
    }
}

// Gaussian spectrum shaped by f^alpha, realized by one inverse DFT. The
// inverse of a forward-only plan is conj(forward(conj(X)))/n.
void broadband(std::vector<double>& y, int rate, std::mt19937_64& rng) {
    const double alpha = uniform(rng, -1.2, -0.6);
    const std::size_t n = y.size();
    const double f_ref = 100.0;
    const double f_floor = 20.0;
    std::vector<fft::cplx> spectrum(n, 0.0);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * rate / static_cast<double>(n);
        const double amp = std::pow(std::max(f, f_floor) / f_ref, alpha);
        const fft::cplx v(amp * gaussian(rng), amp * gaussian(rng));
        spectrum[k] = v;
        if (k < n - k) spectrum[n - k] = std::conj(v);
    }
    for (auto& v : spectrum) v = std::conj(v);
    fft::Plan plan(n);
    std::vector<fft::cplx> time;
    plan.forward(spectrum, time);
    for (std::size_t i = 0; i < n; ++i) y[i] = time[i].real() / static_cast<double>(n);
}

// Carrier plus one overtone under a shared 4-8 Hz propeller-like envelope.
void am_tonal(std::vector<double>& y, int rate, std::mt19937_64& rng) {
    const double fc = uniform(rng, 150.0, 260.0);
    const double fm = uniform(rng, 4.0, 8.0);
    const double depth = uniform(rng, 0.5, 0.9);
    const double phase_c = uniform(rng, 0.0, kTwoPi);
    const double phase_c2 = uniform(rng, 0.0, kTwoPi);
    const double phase_m = uniform(rng, 0.0, kTwoPi);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i) / rate;
        const double envelope =
            1.0 - 0.5 * depth + 0.5 * depth * std::sin(kTwoPi * fm * t + phase_m);
        y[i] = envelope * (std::sin(kTwoPi * fc * t + phase_c) +
                           0.4 * std::sin(kTwoPi * 2.0 * fc * t + phase_c2));
    }
}

}  // namespace

void validate(const SynthSpec& spec) {
    if (spec.per_class_sources < 3) {
        throw std::invalid_argument("synth spec: per_class_sources must be >= 3, got " +
                                    std::to_string(spec.per_class_sources));
    }
    if (!(spec.duration_seconds > 0.0)) {
        throw std::invalid_argument("synth spec: duration_seconds must be positive");
    }
    if (spec.sample_rate <= 0) {
        throw std::invalid_argument("synth spec: sample_rate must be positive");
    }
    // +infinity is the documented noise-off sentinel; NaN and -infinity are not.
    if (std::isnan(spec.snr_db) || spec.snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("synth spec: snr_db must be finite or +infinity");
    }
}

Waveform generate_source(int class_id, const SynthSpec& spec, int source_index) {
    validate(spec);
    if (class_id < 0 || class_id >= kSynthClassCount) {
        throw std::invalid_argument("synth: class_id " + std::to_string(class_id) +
                                    " out of range [0, 4)");
    }

    const auto n = static_cast<std::size_t>(
        std::llround(spec.duration_seconds * spec.sample_rate));
    std::uint64_t s = mix_seed(spec.seed, "synth");
    s = mix_seed(s, static_cast<std::uint64_t>(class_id));
    s = mix_seed(s, static_cast<std::uint64_t>(source_index));
    auto rng = make_rng(s);

    std::vector<double> y(n, 0.0);
    switch (class_id) {
        case 0: tonal(y, spec.sample_rate, rng); break;
        case 1: chirp(y, spec.sample_rate, rng); break;
        case 2: broadband(y, spec.sample_rate, rng); break;
        case 3: am_tonal(y, spec.sample_rate, rng); break;
    }
    scale_to_rms(y, kTargetRms);

    if (std::isfinite(spec.snr_db)) {
        const double noise_std = kTargetRms / std::pow(10.0, spec.snr_db / 20.0);
        for (double& v : y) v += noise_std * gaussian(rng);
    }

    double peak = 0.0;
    for (double v : y) peak = std::max(peak, std::abs(v));
    if (peak > 0.95) {
        const double s2 = 0.95 / peak;
        for (double& v : y) v *= s2;
    }

    Waveform w;
    w.samples = std::move(y);
    w.sample_rate = spec.sample_rate;
    return w;
}

DatasetManifest build_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                             const std::array<double, 3>& ratios) {
    validate(spec);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("synth: cannot create output dir " + out_dir.string() + ": " +
                                 ec.message());
    }

    std::vector<SourceRecord> sources;
    sources.reserve(static_cast<std::size_t>(kSynthClassCount) * spec.per_class_sources);
    for (int c = 0; c < kSynthClassCount; ++c) {
        for (int i = 0; i < spec.per_class_sources; ++i) {
            const Waveform w = generate_source(c, spec, i);
            std::ostringstream name;
            name << kSynthClassNames[static_cast<std::size_t>(c)] << "_" << std::setw(3)
                 << std::setfill('0') << i;
            const std::string source_id = name.str();
            const std::string filename = source_id + ".wav";
            encode_wav16_file(out_dir / filename, w);
            sources.push_back({source_id, filename, kSynthClassNames[static_cast<std::size_t>(c)]});
        }
    }

    DatasetManifest manifest = split_dataset(sources, ratios, spec.seed);
    save_manifest(manifest, out_dir / "manifest.jsonl");
    return manifest;
}

}  // namespace nehd
