#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nehd::fft {

using cplx = std::complex<double>;

/// In-place iterative radix-2 FFT. Size must be a power of two.
/// inverse=true applies the conjugate transform and the 1/n factor.
void fft_pow2(std::vector<cplx>& a, bool inverse);

/// Forward DFT of arbitrary size. Power-of-two sizes go through the radix-2
/// path directly; everything else uses Bluestein's chirp-z reduction.
/// A Plan precomputes the chirp tables so repeated transforms of one size
/// (every STFT frame) pay setup cost once.
class Plan {
public:
    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }

    /// out[k] = sum_t in[t] * exp(-2*pi*i*k*t/n), k = 0..n-1.
    void forward(const std::vector<cplx>& in, std::vector<cplx>& out) const;

    /// Real input convenience; returns the first `bins` one-sided coefficients.
    void forward_real(const std::vector<double>& in, std::vector<cplx>& out,
                      std::size_t bins) const;

private:
    std::size_t n_ = 0;
    bool pow2_ = false;
    std::size_t m_ = 0;                // padded power-of-two size for Bluestein
    std::vector<cplx> chirp_;          // exp(-i*pi*k^2/n)
    std::vector<cplx> chirp_fft_;      // FFT of the conjugate chirp, padded to m
};

}  // namespace nehd::fft
