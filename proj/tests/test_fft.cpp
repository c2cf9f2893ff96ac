#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nehd/fft.hpp"
#include "nehd/rng.hpp"

using nehd::fft::cplx;
using nehd::fft::Plan;

namespace {

// Independent O(n^2) DFT used as the oracle everywhere in this file.
std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += x[t] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
    auto rng = nehd::make_rng(seed);
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(nehd::uniform(rng, -1.0, 1.0), nehd::uniform(rng, -1.0, 1.0));
    return x;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("plan matches the naive DFT on power-of-two and awkward sizes") {
    // primes and composites force the Bluestein path; powers of two the radix-2 path
    for (std::size_t n : {1, 2, 4, 8, 16, 64, 256, 3, 5, 7, 11, 12, 15, 17, 31, 97, 100, 192, 384}) {
        const auto x = random_signal(n, 1000 + n);
        std::vector<cplx> got;
        Plan(n).forward(x, got);
        const auto want = naive_dft(x);
        REQUIRE(got.size() == n);
        // oracle itself carries O(n) rounding; scale the tolerance with n
        CHECK_MESSAGE(max_diff(got, want) < 1e-9 * static_cast<double>(n + 1), "n = ", n);
    }
}

TEST_CASE("plan handles the production window length") {
    const std::size_t n = 6144;
    const auto x = random_signal(n, 42);
    std::vector<cplx> got;
    Plan(n).forward(x, got);
    const auto want = naive_dft(x);
    CHECK(max_diff(got, want) < 1e-9 * static_cast<double>(n));
}

TEST_CASE("forward_real equals the complex transform on the kept bins") {
    for (std::size_t n : {16, 48, 100}) {
        auto rng = nehd::make_rng(7 + n);
        std::vector<double> x(n);
        for (auto& v : x) v = nehd::uniform(rng, -1.0, 1.0);
        std::vector<cplx> xc(n);
        for (std::size_t i = 0; i < n; ++i) xc[i] = cplx(x[i], 0.0);

        const Plan plan(n);
        std::vector<cplx> full;
        plan.forward(xc, full);
        const std::size_t bins = n / 2 + 1;
        std::vector<cplx> real_out;
        plan.forward_real(x, real_out, bins);
        REQUIRE(real_out.size() == bins);
        for (std::size_t k = 0; k < bins; ++k) {
            CHECK(std::abs(real_out[k] - full[k]) < 1e-10 * static_cast<double>(n));
        }
    }
}

TEST_CASE("radix-2 inverse undoes the forward transform") {
    const std::size_t n = 128;
    auto x = random_signal(n, 5);
    auto work = x;
    nehd::fft::fft_pow2(work, false);
    nehd::fft::fft_pow2(work, true);
    CHECK(max_diff(work, x) < 1e-12 * static_cast<double>(n));
}

TEST_CASE("transform preserves energy up to the 1/n convention") {
    for (std::size_t n : {64, 100}) {
        const auto x = random_signal(n, 99 + n);
        std::vector<cplx> X;
        Plan(n).forward(x, X);
        double time_e = 0.0, freq_e = 0.0;
        for (const auto& v : x) time_e += std::norm(v);
        for (const auto& v : X) freq_e += std::norm(v);
        CHECK(std::abs(freq_e / static_cast<double>(n) - time_e) < 1e-9 * time_e);
    }
}

TEST_CASE("single tone lands in its own bin") {
    const std::size_t n = 512;
    const std::size_t k = 37;
    std::vector<cplx> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double ang = 2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
        x[t] = cplx(std::cos(ang), 0.0);
    }
    std::vector<cplx> X;
    Plan(n).forward(x, X);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < n / 2 + 1; ++i) {
        if (std::abs(X[i]) > std::abs(X[argmax])) argmax = i;
    }
    CHECK(argmax == k);
    CHECK(std::abs(X[k]) == doctest::Approx(n / 2.0).epsilon(1e-9));
}
