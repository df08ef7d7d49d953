#pragma once

// Core tensor types and the direct (digital) convolution reference.
// Convolutions here are cross-correlations: no kernel flip, see direct_conv_*.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace f4 {

enum class errc { validation, infeasible, io, format };

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool ok, errc code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

// Row-major 2D grid of doubles.
struct Plane {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int r, int c, double fill = 0.0) : rows(r), cols(c), v(std::size_t(r) * c, fill) {}

    double& at(int r, int c) { return v[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return v[std::size_t(r) * cols + c]; }
    bool same_shape(const Plane& o) const { return rows == o.rows && cols == o.cols; }
    std::size_t size() const { return v.size(); }
};

inline Plane operator-(const Plane& a, const Plane& b) {
    Plane out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

inline double max_abs(const Plane& p) {
    double m = 0.0;
    for (double x : p.v) m = std::max(m, std::abs(x));
    return m;
}

enum class ConvMode { same, valid };

// One convolution problem: M x M input planes, N x N kernels, Nc in-channels,
// Nk filters. same mode requires odd N; valid mode requires N <= M.
struct ConvSpec {
    int M = 0;
    int N = 0;
    int Nc = 1;
    int Nk = 1;
    ConvMode mode = ConvMode::same;

    void validate() const {
        require(M >= 1 && N >= 1 && Nc >= 1 && Nk >= 1, errc::validation,
                "conv spec: all dims must be >= 1");
        if (mode == ConvMode::same)
            require(N % 2 == 1, errc::validation, "same mode requires odd kernel side");
        else
            require(N <= M, errc::validation, "valid mode requires kernel side <= input side");
    }

    int out_side() const { return mode == ConvMode::same ? M : M - N + 1; }
    int halo() const { return mode == ConvMode::same ? (N - 1) / 2 : 0; }
    int cell_side() const { return M + N - 1; }
};

// Nc planes of side x side, all nonneg when fed to the optical path.
struct MultiChannelImage {
    int side = 0;
    std::vector<Plane> ch;

    MultiChannelImage() = default;
    MultiChannelImage(int channels, int s) : side(s), ch(channels, Plane(s, s)) {}
    int channels() const { return int(ch.size()); }
};

// Nk filters, each with Nc kernels of kernel_side x kernel_side.
struct FilterBank {
    int kernel_side = 0;
    std::vector<std::vector<Plane>> f;  // f[k][c]

    FilterBank() = default;
    FilterBank(int filters, int channels, int n)
        : kernel_side(n), f(filters, std::vector<Plane>(channels, Plane(n, n))) {}
    int filters() const { return int(f.size()); }
    int channels() const { return f.empty() ? 0 : int(f[0].size()); }
};

inline void check_pair(const MultiChannelImage& x, const FilterBank& fb, const ConvSpec& spec) {
    spec.validate();
    require(x.side == spec.M, errc::validation, "image side does not match spec M");
    require(x.channels() == spec.Nc, errc::validation, "image channel count does not match spec");
    require(fb.kernel_side == spec.N, errc::validation, "kernel side does not match spec N");
    require(fb.filters() == spec.Nk, errc::validation, "filter count does not match spec");
    require(fb.channels() == spec.Nc, errc::validation, "filter channel count does not match spec");
}

// 180-degree rotation: out(i,j) = in(N-1-i, N-1-j).
inline Plane flip_filter(const Plane& k) {
    Plane out(k.rows, k.cols);
    for (int i = 0; i < k.rows; ++i)
        for (int j = 0; j < k.cols; ++j) out.at(i, j) = k.at(k.rows - 1 - i, k.cols - 1 - j);
    return out;
}

// Same-mode multi-channel cross-correlation for filter index k:
//   Y(i,j) = sum_c sum_{a,b} Xpad_c(i+a, j+b) * F_{k,c}(a,b)
// with X zero-padded by (N-1)/2 on every side. Double precision, fixed loop order.
inline Plane direct_conv_same(const MultiChannelImage& x, const FilterBank& fb, int k,
                              const ConvSpec& spec) {
    check_pair(x, fb, spec);
    require(spec.mode == ConvMode::same, errc::validation, "direct_conv_same: spec mode mismatch");
    require(k >= 0 && k < spec.Nk, errc::validation, "filter index out of range");
    const int M = spec.M, N = spec.N, h = spec.halo();
    Plane y(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            double acc = 0.0;
            for (int c = 0; c < spec.Nc; ++c) {
                const Plane& xc = x.ch[c];
                const Plane& kc = fb.f[k][c];
                for (int a = 0; a < N; ++a) {
                    const int r = i + a - h;
                    if (r < 0 || r >= M) continue;
                    for (int b = 0; b < N; ++b) {
                        const int s = j + b - h;
                        if (s < 0 || s >= M) continue;
                        acc += xc.at(r, s) * kc.at(a, b);
                    }
                }
            }
            y.at(i, j) = acc;
        }
    return y;
}

// Valid-mode variant: no padding, output side M-N+1.
inline Plane direct_conv_valid(const MultiChannelImage& x, const FilterBank& fb, int k,
                               const ConvSpec& spec) {
    check_pair(x, fb, spec);
    require(spec.mode == ConvMode::valid, errc::validation,
            "direct_conv_valid: spec mode mismatch");
    require(k >= 0 && k < spec.Nk, errc::validation, "filter index out of range");
    const int N = spec.N, out = spec.out_side();
    Plane y(out, out);
    for (int i = 0; i < out; ++i)
        for (int j = 0; j < out; ++j) {
            double acc = 0.0;
            for (int c = 0; c < spec.Nc; ++c) {
                const Plane& xc = x.ch[c];
                const Plane& kc = fb.f[k][c];
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) acc += xc.at(i + a, j + b) * kc.at(a, b);
            }
            y.at(i, j) = acc;
        }
    return y;
}

inline Plane direct_conv(const MultiChannelImage& x, const FilterBank& fb, int k,
                         const ConvSpec& spec) {
    return spec.mode == ConvMode::same ? direct_conv_same(x, fb, k, spec)
                                       : direct_conv_valid(x, fb, k, spec);
}

}  // namespace f4
