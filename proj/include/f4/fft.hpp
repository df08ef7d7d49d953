#pragma once

// Discrete Fourier transforms for an arbitrary side length: iterative
// radix-2 for powers of two, Bluestein's chirp-z otherwise. Transforms here
// are unnormalized; callers apply their own scale. No shared state, so
// concurrent transforms on different data are safe.

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "f4/core.hpp"

namespace f4 {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}

// In-place unnormalized radix-2 transform; sign = -1 forward, +1 inverse.
inline void fft_pow2(cplx* a, int n, int sign) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / len;
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace detail

// One-dimensional transform plan for a fixed length and direction. Reused
// across the rows and columns of a 2D pass; cheap to build, never shared.
class Fft1d {
public:
    Fft1d(int n, bool inverse) : n_(n), sign_(inverse ? +1 : -1) {
        require(n >= 1, errc::validation, "fft: length must be >= 1");
        if (detail::is_pow2(n_)) return;
        m_ = detail::next_pow2(2 * n_ - 1);
        chirp_.resize(n_);
        for (int k = 0; k < n_; ++k) {
            // k^2 mod 2n keeps the chirp angle small for large k.
            const std::int64_t q = (std::int64_t(k) * k) % (2 * std::int64_t(n_));
            const double ang = sign_ * std::numbers::pi * double(q) / double(n_);
            chirp_[k] = cplx(std::cos(ang), std::sin(ang));
        }
        bhat_.assign(m_, cplx(0.0, 0.0));
        bhat_[0] = std::conj(chirp_[0]);
        for (int k = 1; k < n_; ++k) bhat_[k] = bhat_[m_ - k] = std::conj(chirp_[k]);
        detail::fft_pow2(bhat_.data(), m_, -1);
    }

    int length() const { return n_; }

    // Unnormalized transform of x[0..n), in place.
    void run(cplx* x) const {
        if (m_ == 0) {
            detail::fft_pow2(x, n_, sign_);
            return;
        }
        std::vector<cplx> a(m_, cplx(0.0, 0.0));
        for (int k = 0; k < n_; ++k) a[k] = x[k] * chirp_[k];
        detail::fft_pow2(a.data(), m_, -1);
        for (int k = 0; k < m_; ++k) a[k] *= bhat_[k];
        detail::fft_pow2(a.data(), m_, +1);
        const double inv_m = 1.0 / double(m_);
        for (int k = 0; k < n_; ++k) x[k] = a[k] * inv_m * chirp_[k];
    }

private:
    int n_;
    int sign_;
    int m_ = 0;              // Bluestein working length; 0 on the radix-2 path
    std::vector<cplx> chirp_;
    std::vector<cplx> bhat_;
};

// Unnormalized 2D transform of a row-major side x side grid, in place.
inline void fft2d(cplx* a, int side, bool inverse) {
    const Fft1d plan(side, inverse);
    for (int r = 0; r < side; ++r) plan.run(a + std::size_t(r) * side);
    std::vector<cplx> col(side);
    for (int c = 0; c < side; ++c) {
        for (int r = 0; r < side; ++r) col[r] = a[std::size_t(r) * side + c];
        plan.run(col.data());
        for (int r = 0; r < side; ++r) a[std::size_t(r) * side + c] = col[r];
    }
}

}  // namespace f4
