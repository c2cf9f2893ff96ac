#pragma once

#include "nehd/wav.hpp"

namespace nehd {

/// Band-limited resampling via a windowed-sinc kernel (Hann window,
/// 32 zero-crossings, per-output-sample weight normalization so DC is
/// preserved). Output length = round(len * target / source). The identity
/// ratio returns the input samples unchanged.
Waveform resample(const Waveform& w, int target_rate);

}  // namespace nehd
