#pragma once

// Idealized two-lens correlator stage: a forward transform, a pointwise
// multiply in the transform plane, and an inverse transform. Everything is
// circular at the plane resolution D. Transforms are unitary (1/D per pass);
// four_f_pass carries one extra factor of D so its output equals the plain
// circular convolution sum with no residual scale.

#include <complex>
#include <vector>

#include "f4/core.hpp"
#include "f4/fft.hpp"

namespace f4 {

// Fixed optical system parameters: plane resolution D and frame rate.
struct SystemConfig {
    int D = 0;
    double freq_hz = 0.0;

    void validate() const {
        require(D >= 1, errc::validation, "system: plane side must be >= 1");
        require(freq_hz > 0.0, errc::validation, "system: frame rate must be positive");
    }
};

// Complex optical field sampled on a D x D grid.
struct FieldPlane {
    int side = 0;
    std::vector<cplx> v;

    FieldPlane() = default;
    explicit FieldPlane(int s) : side(s), v(std::size_t(s) * s, cplx(0.0, 0.0)) {}

    cplx& at(int r, int c) { return v[std::size_t(r) * side + c]; }
    cplx at(int r, int c) const { return v[std::size_t(r) * side + c]; }
};

inline FieldPlane to_field(const Plane& p) {
    require(p.rows == p.cols, errc::validation, "field planes must be square");
    FieldPlane f(p.rows);
    for (std::size_t i = 0; i < p.v.size(); ++i) f.v[i] = cplx(p.v[i], 0.0);
    return f;
}

// Largest |imag| over the plane; the optical paths must keep this at noise
// level because detection measures intensity of what should be a real field.
inline double max_imag(const FieldPlane& f) {
    double m = 0.0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z.imag()));
    return m;
}

inline Plane real_part(const FieldPlane& f) {
    Plane p(f.side, f.side);
    for (std::size_t i = 0; i < f.v.size(); ++i) p.v[i] = f.v[i].real();
    return p;
}

// Unitary forward transform: a delta becomes a constant plane of 1/D.
inline FieldPlane fourier(const FieldPlane& in) {
    FieldPlane out = in;
    fft2d(out.v.data(), out.side, false);
    const double s = 1.0 / double(out.side);
    for (cplx& z : out.v) z *= s;
    return out;
}

inline FieldPlane inverse_fourier(const FieldPlane& in) {
    FieldPlane out = in;
    fft2d(out.v.data(), out.side, true);
    const double s = 1.0 / double(out.side);
    for (cplx& z : out.v) z *= s;
    return out;
}

// Circular index reflection: out(i,j) = in((-i) mod D, (-j) mod D).
inline Plane flip_circular(const Plane& p) {
    require(p.rows == p.cols, errc::validation, "flip_circular: plane must be square");
    const int d = p.rows;
    Plane out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.at(i, j) = p.at((d - i) % d, (d - j) % d);
    return out;
}

// Transform-plane pattern that turns four_f_pass into circular
// cross-correlation with space_pattern:
//   out(i,j) = sum_{a,b} pattern(a,b) * input((i+a) mod D, (j+b) mod D).
inline FieldPlane make_filter_plane(const Plane& space_pattern) {
    return fourier(to_field(flip_circular(space_pattern)));
}

// inverse_fourier(fourier(input) * filter * D): the circular convolution of
// the input with the space-domain pattern behind filter_fourier, unscaled.
inline FieldPlane four_f_pass(const Plane& input_plane, const FieldPlane& filter_fourier) {
    require(input_plane.rows == input_plane.cols, errc::validation,
            "four_f_pass: input plane must be square");
    require(input_plane.rows == filter_fourier.side, errc::validation,
            "four_f_pass: plane sides disagree");
    FieldPlane x = to_field(input_plane);
    fft2d(x.v.data(), x.side, false);
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] *= filter_fourier.v[i];
    fft2d(x.v.data(), x.side, true);
    const double s = 1.0 / double(x.side);  // (1/D^2 from the two passes) * D
    for (cplx& z : x.v) z *= s;
    return x;
}

}  // namespace f4
