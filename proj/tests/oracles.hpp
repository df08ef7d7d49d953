#pragma once

// Reference implementations used only by tests. Deliberately written with a
// different structure than the library paths they check: per-channel planes
// summed afterwards, naive quartic loops, naive DFT.

#include <complex>
#include <random>
#include <vector>

#include "f4/core.hpp"
#include "f4/optics.hpp"

namespace oracle {

// Single-channel same-mode cross-correlation, zero padded by (N-1)/2.
inline f4::Plane corr2d_same(const f4::Plane& x, const f4::Plane& k) {
    const int m = x.rows, n = k.rows, h = (n - 1) / 2;
    f4::Plane y(m, m);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double w = k.at(a, b);
            if (w == 0.0) continue;
            for (int i = 0; i < m; ++i) {
                const int r = i + a - h;
                if (r < 0 || r >= m) continue;
                for (int j = 0; j < m; ++j) {
                    const int s = j + b - h;
                    if (s < 0 || s >= m) continue;
                    y.at(i, j) += w * x.at(r, s);
                }
            }
        }
    return y;
}

inline f4::Plane corr2d_valid(const f4::Plane& x, const f4::Plane& k) {
    const int m = x.rows, n = k.rows, out = m - n + 1;
    f4::Plane y(out, out);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double w = k.at(a, b);
            for (int i = 0; i < out; ++i)
                for (int j = 0; j < out; ++j) y.at(i, j) += w * x.at(i + a, j + b);
        }
    return y;
}

// Multi-channel reference: per-channel planes computed independently, summed.
inline f4::Plane conv_ref(const f4::MultiChannelImage& x, const f4::FilterBank& fb, int k,
                          const f4::ConvSpec& spec) {
    const int out = spec.out_side();
    f4::Plane y(out, out);
    for (int c = 0; c < spec.Nc; ++c) {
        const f4::Plane p = spec.mode == f4::ConvMode::same ? corr2d_same(x.ch[c], fb.f[k][c])
                                                            : corr2d_valid(x.ch[c], fb.f[k][c]);
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += p.v[i];
    }
    return y;
}

// Quartic-cost circular correlation: out(i,j) = sum_t F(t) X((i,j)+t mod D).
inline f4::Plane circ_corr(const f4::Plane& f, const f4::Plane& x) {
    const int d = f.rows;
    f4::Plane out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    acc += f.at(a, b) * x.at((i + a) % d, (j + b) % d);
            out.at(i, j) = acc;
        }
    return out;
}

// Quartic-cost circular convolution: out(i,j) = sum_t K(t) X((i,j)-t mod D).
inline f4::Plane circ_conv(const f4::Plane& x, const f4::Plane& k) {
    const int d = x.rows;
    f4::Plane out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    acc += k.at(a, b) * x.at((i - a + d) % d, (j - b + d) % d);
            out.at(i, j) = acc;
        }
    return out;
}

// Naive quadratic DFT, unnormalized; sign = -1 forward, +1 inverse.
inline std::vector<f4::cplx> dft_naive(const std::vector<f4::cplx>& x, int sign) {
    const int n = int(x.size());
    std::vector<f4::cplx> out(n);
    for (int k = 0; k < n; ++k) {
        f4::cplx acc(0.0, 0.0);
        for (int t = 0; t < n; ++t) {
            const double ang = sign * 2.0 * 3.14159265358979323846 * double(k) * double(t) / n;
            acc += x[t] * f4::cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

inline f4::Plane random_plane(std::mt19937_64& gen, int rows, int cols, double lo = -1.0,
                              double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    f4::Plane p(rows, cols);
    for (double& x : p.v) x = dist(gen);
    return p;
}

inline f4::MultiChannelImage random_image(std::mt19937_64& gen, int nc, int side, double lo = 0.0,
                                          double hi = 1.0) {
    f4::MultiChannelImage img(nc, side);
    for (auto& p : img.ch) p = random_plane(gen, side, side, lo, hi);
    return img;
}

inline f4::FilterBank random_bank(std::mt19937_64& gen, int nk, int nc, int n, double lo = -1.0,
                                  double hi = 1.0) {
    f4::FilterBank fb(nk, nc, n);
    for (auto& f : fb.f)
        for (auto& p : f) p = random_plane(gen, n, n, lo, hi);
    return fb;
}

inline double max_abs_diff(const f4::Plane& a, const f4::Plane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace oracle
