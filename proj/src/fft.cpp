#include "nehd/fft.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace nehd::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (cplx& x : a) x *= inv_n;
    }
}

Plan::Plan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("fft plan: size must be positive");
    pow2_ = is_pow2(n);
    if (pow2_) return;

    m_ = next_pow2(2 * n - 1);
    chirp_.resize(n);
    // k^2 mod 2n keeps the chirp angle argument small; exp(-i*pi*k^2/n) is
    // periodic in k^2 with period 2n.
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
        double ang = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp_[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> b(m_, cplx(0.0, 0.0));
    b[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
        b[k] = std::conj(chirp_[k]);
        b[m_ - k] = std::conj(chirp_[k]);
    }
    fft_pow2(b, false);
    chirp_fft_ = std::move(b);
}

void Plan::forward(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    if (in.size() != n_) throw std::invalid_argument("fft plan: input size mismatch");
    if (pow2_) {
        out = in;
        fft_pow2(out, false);
        return;
    }
    std::vector<cplx> a(m_, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * chirp_[k];
    fft_pow2(a, false);
    for (std::size_t k = 0; k < m_; ++k) a[k] *= chirp_fft_[k];
    fft_pow2(a, true);
    out.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * chirp_[k];
}

void Plan::forward_real(const std::vector<double>& in, std::vector<cplx>& out,
                        std::size_t bins) const {
    if (in.size() != n_) throw std::invalid_argument("fft plan: input size mismatch");
    if (bins > n_) throw std::invalid_argument("fft plan: more bins than coefficients");
    std::vector<cplx> tmp(n_);
    for (std::size_t k = 0; k < n_; ++k) tmp[k] = cplx(in[k], 0.0);
    std::vector<cplx> full;
    forward(tmp, full);
    out.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(bins));
}

}  // namespace nehd::fft
