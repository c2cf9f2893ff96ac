#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nehd/dataset.hpp"
#include "nehd/tensor.hpp"

namespace nehd {

enum class MagnitudeScale { kLogPower, kLinear };

const char* magnitude_scale_name(MagnitudeScale s);
MagnitudeScale magnitude_scale_from_name(const std::string& name);

struct StftConfig {
    std::size_t window_length = 6144;
    std::size_t hop_length = 4096;
    std::size_t freq_bins = 192;
    bool center_pad = true;
    MagnitudeScale magnitude_scale = MagnitudeScale::kLogPower;
};

/// Throws std::invalid_argument unless
/// 0 < hop_length <= window_length and 1 <= freq_bins <= window_length/2 + 1.
void validate(const StftConfig& cfg);

struct Spectrogram {
    Tensor values;  // [freq_bins x frames]
    StftConfig config;
    std::string segment_id;
};

/// Frame count: floor(len/hop)+1 with center padding,
/// floor((len-window)/hop)+1 without.
std::size_t stft_num_frames(std::size_t num_samples, const StftConfig& cfg);

/// Hann-windowed DFT magnitudes, lowest freq_bins one-sided bins kept.
/// Center padding reflects the signal about its ends; without it the
/// input must cover at least one window.
Tensor stft(const std::vector<double>& samples, const StftConfig& cfg);
Spectrogram stft(const Segment& seg, const StftConfig& cfg);

/// Per-frequency-bin statistics of the training split. std is a population
/// standard deviation clamped from below at 1e-8.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> std_dev;

    std::size_t bins() const { return mean.size(); }
};

inline constexpr double kNormStdEpsilon = 1e-8;

/// Streaming per-bin Welford accumulator. Partial accumulators over disjoint
/// spectrogram subsets merge into the same result as one sequential pass.
class NormAccumulator {
public:
    void add(const Spectrogram& s);
    void add(const Tensor& values);  // [bins x frames]
    void merge(const NormAccumulator& other);

    std::size_t spectrogram_count() const { return spec_count_; }

    /// Throws std::runtime_error when nothing has been accumulated.
    NormStats finish() const;

private:
    std::size_t spec_count_ = 0;
    std::vector<std::uint64_t> count_;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

NormStats fit_normalizer(const std::vector<Spectrogram>& specs);

/// (value - mean)/std per bin. Throws on bin-count mismatch.
void normalize_in_place(Tensor& values, const NormStats& stats);
Spectrogram normalize(const Spectrogram& s, const NormStats& stats);

}  // namespace nehd
