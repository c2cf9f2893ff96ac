#include "nehd/stft.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nehd/fft.hpp"

namespace nehd {

const char* magnitude_scale_name(MagnitudeScale s) {
    return s == MagnitudeScale::kLogPower ? "log_power" : "linear";
}

MagnitudeScale magnitude_scale_from_name(const std::string& name) {
    if (name == "log_power") return MagnitudeScale::kLogPower;
    if (name == "linear") return MagnitudeScale::kLinear;
    throw std::invalid_argument("unknown magnitude scale '" + name + "'");
}

void validate(const StftConfig& cfg) {
    if (cfg.hop_length == 0 || cfg.hop_length > cfg.window_length) {
        std::ostringstream os;
        os << "stft config: hop_length " << cfg.hop_length
           << " must satisfy 0 < hop <= window_length " << cfg.window_length;
        throw std::invalid_argument(os.str());
    }
    const std::size_t max_bins = cfg.window_length / 2 + 1;
    if (cfg.freq_bins == 0 || cfg.freq_bins > max_bins) {
        std::ostringstream os;
        os << "stft config: freq_bins " << cfg.freq_bins << " must be in [1, "
           << max_bins << "] for window_length " << cfg.window_length;
        throw std::invalid_argument(os.str());
    }
}

std::size_t stft_num_frames(std::size_t num_samples, const StftConfig& cfg) {
    if (cfg.center_pad) return num_samples / cfg.hop_length + 1;
    if (num_samples < cfg.window_length) return 0;
    return (num_samples - cfg.window_length) / cfg.hop_length + 1;
}

namespace {

// Mirror about the endpoints without duplicating them, for any pad amount.
std::size_t reflect_index(long long i, long long n) {
    if (n == 1) return 0;
    const long long period = 2 * (n - 1);
    long long j = i % period;
    if (j < 0) j += period;
    if (j >= n) j = period - j;
    return static_cast<std::size_t>(j);
}

}  // namespace

Tensor stft(const std::vector<double>& samples, const StftConfig& cfg) {
    validate(cfg);
    if (samples.empty()) throw std::invalid_argument("stft: empty input");
    if (!cfg.center_pad && samples.size() < cfg.window_length) {
        std::ostringstream os;
        os << "stft: input of " << samples.size()
           << " samples is shorter than window_length " << cfg.window_length
           << " and center padding is off";
        throw std::invalid_argument(os.str());
    }

    const std::size_t window = cfg.window_length;
    const std::size_t frames = stft_num_frames(samples.size(), cfg);
    const long long pad_left = cfg.center_pad ? static_cast<long long>(window / 2) : 0;
    const long long len = static_cast<long long>(samples.size());

    std::vector<double> hann(window);
    for (std::size_t i = 0; i < window; ++i) {
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(window));
    }

    fft::Plan plan(window);
    Tensor out({cfg.freq_bins, frames});

    std::vector<double> frame(window);
    std::vector<fft::cplx> spectrum;
    for (std::size_t t = 0; t < frames; ++t) {
        const long long start = static_cast<long long>(t * cfg.hop_length) - pad_left;
        for (std::size_t i = 0; i < window; ++i) {
            const long long src = start + static_cast<long long>(i);
            const double v = (src >= 0 && src < len)
                                 ? samples[static_cast<std::size_t>(src)]
                                 : samples[reflect_index(src, len)];
            frame[i] = v * hann[i];
        }
        plan.forward_real(frame, spectrum, cfg.freq_bins);
        for (std::size_t f = 0; f < cfg.freq_bins; ++f) {
            const double mag = std::abs(spectrum[f]);
            out(f, t) = cfg.magnitude_scale == MagnitudeScale::kLogPower
                            ? 10.0 * std::log10(mag * mag + 1e-10)
                            : mag;
        }
    }
    return out;
}

Spectrogram stft(const Segment& seg, const StftConfig& cfg) {
    Spectrogram s;
    s.values = stft(seg.samples, cfg);
    s.config = cfg;
    std::ostringstream id;
    id << seg.source_id << "@" << seg.offset_seconds;
    s.segment_id = id.str();
    return s;
}

void NormAccumulator::add(const Spectrogram& s) { add(s.values); }

void NormAccumulator::add(const Tensor& values) {
    if (values.rank() != 2) {
        throw std::invalid_argument("normalizer: expected a [bins x frames] plane, got " +
                                    values.shape_str());
    }
    const std::size_t bins = values.dim(0);
    const std::size_t frames = values.dim(1);
    if (count_.empty()) {
        count_.assign(bins, 0);
        mean_.assign(bins, 0.0);
        m2_.assign(bins, 0.0);
    } else if (count_.size() != bins) {
        std::ostringstream os;
        os << "normalizer: bin count changed from " << count_.size() << " to " << bins;
        throw std::invalid_argument(os.str());
    }
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t t = 0; t < frames; ++t) {
            const double x = values(b, t);
            count_[b] += 1;
            const double delta = x - mean_[b];
            mean_[b] += delta / static_cast<double>(count_[b]);
            m2_[b] += delta * (x - mean_[b]);
        }
    }
    spec_count_ += 1;
}

void NormAccumulator::merge(const NormAccumulator& other) {
    if (other.count_.empty()) return;
    if (count_.empty()) {
        *this = other;
        return;
    }
    if (count_.size() != other.count_.size()) {
        throw std::invalid_argument("normalizer merge: bin counts differ");
    }
    for (std::size_t b = 0; b < count_.size(); ++b) {
        const double na = static_cast<double>(count_[b]);
        const double nb = static_cast<double>(other.count_[b]);
        if (nb == 0.0) continue;
        const double delta = other.mean_[b] - mean_[b];
        const double n = na + nb;
        mean_[b] += delta * nb / n;
        m2_[b] += other.m2_[b] + delta * delta * na * nb / n;
        count_[b] += other.count_[b];
    }
    spec_count_ += other.spec_count_;
}

NormStats NormAccumulator::finish() const {
    if (spec_count_ == 0) throw std::runtime_error("normalizer: no spectrograms accumulated");
    NormStats stats;
    stats.mean.resize(count_.size());
    stats.std_dev.resize(count_.size());
    for (std::size_t b = 0; b < count_.size(); ++b) {
        stats.mean[b] = mean_[b];
        const double var = count_[b] > 0 ? m2_[b] / static_cast<double>(count_[b]) : 0.0;
        stats.std_dev[b] = std::max(std::sqrt(std::max(var, 0.0)), kNormStdEpsilon);
    }
    return stats;
}

NormStats fit_normalizer(const std::vector<Spectrogram>& specs) {
    if (specs.size() < 2) {
        throw std::runtime_error("fit_normalizer: needs at least 2 spectrograms, got " +
                                 std::to_string(specs.size()));
    }
    NormAccumulator acc;
    for (const auto& s : specs) acc.add(s);
    return acc.finish();
}

void normalize_in_place(Tensor& values, const NormStats& stats) {
    if (values.rank() != 2 || values.dim(0) != stats.bins()) {
        std::ostringstream os;
        os << "normalize: plane " << values.shape_str() << " does not match "
           << stats.bins() << " normalizer bins";
        throw std::invalid_argument(os.str());
    }
    const std::size_t frames = values.dim(1);
    for (std::size_t b = 0; b < stats.bins(); ++b) {
        const double mean = stats.mean[b];
        const double inv = 1.0 / stats.std_dev[b];
        for (std::size_t t = 0; t < frames; ++t) {
            values(b, t) = (values(b, t) - mean) * inv;
        }
    }
}

Spectrogram normalize(const Spectrogram& s, const NormStats& stats) {
    Spectrogram out = s;
    normalize_in_place(out.values, stats);
    return out;
}

}  // namespace nehd
