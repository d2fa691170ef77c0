#include "gluconet/fft.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace gluconet::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Bluestein chirp-z: DFT of arbitrary n as a circular convolution of
// power-of-two size.
std::vector<cdouble> bluestein(const std::vector<cdouble>& x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cdouble> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for large k
        const std::size_t k2 = (k % (2 * n)) * (k % (2 * n)) % (2 * n);
        const double angle = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = {std::cos(angle), std::sin(angle)};
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cdouble> a(m, cdouble{0.0, 0.0}), b(m, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);
    std::vector<cdouble> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    return out;
}

}  // namespace

void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cdouble wlen{std::cos(angle), std::sin(angle)};
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w{1.0, 0.0};
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cdouble u = a[i + j];
                const cdouble v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv;
    }
}

std::vector<cdouble> fft(const std::vector<cdouble>& a) {
    if (a.empty()) return {};
    if (is_pow2(a.size())) {
        std::vector<cdouble> out(a);
        fft_pow2(out, false);
        return out;
    }
    return bluestein(a, false);
}

std::vector<cdouble> ifft(const std::vector<cdouble>& a) {
    if (a.empty()) return {};
    if (is_pow2(a.size())) {
        std::vector<cdouble> out(a);
        fft_pow2(out, true);
        return out;
    }
    auto out = bluestein(a, true);
    const double inv = 1.0 / static_cast<double>(a.size());
    for (auto& v : out) v *= inv;
    return out;
}

}  // namespace gluconet::fft
