#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "f4/fft.hpp"
#include "f4/optics.hpp"
#include "oracles.hpp"

using namespace f4;

namespace {

FieldPlane random_field(std::mt19937_64& gen, int side) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FieldPlane f(side);
    for (cplx& z : f.v) z = cplx(dist(gen), dist(gen));
    return f;
}

double max_abs_diff(const FieldPlane& a, const FieldPlane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double l2(const FieldPlane& f) {
    double s = 0.0;
    for (const cplx& z : f.v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("1D transform matches the naive DFT for assorted lengths") {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 15, 16, 17, 25, 27, 30, 32, 34, 64}) {
        std::vector<cplx> x(n);
        for (cplx& z : x) z = cplx(dist(gen), dist(gen));
        for (int sign : {-1, +1}) {
            const auto ref = oracle::dft_naive(x, sign);
            std::vector<cplx> got = x;
            const Fft1d plan(n, sign > 0);
            plan.run(got.data());
            double err = 0.0;
            for (int i = 0; i < n; ++i) err = std::max(err, std::abs(got[i] - ref[i]));
            INFO("n=" << n << " sign=" << sign);
            REQUIRE(err <= 1e-9 * std::max(1.0, double(n)));
        }
    }
}

TEST_CASE("forward then inverse unitary transform is the identity") {
    std::mt19937_64 gen(103);
    for (int d : {4, 6, 7, 12, 16, 21}) {
        const FieldPlane f = random_field(gen, d);
        const FieldPlane back = inverse_fourier(fourier(f));
        REQUIRE(max_abs_diff(back, f) <= 1e-11);
    }
}

TEST_CASE("a delta at the origin transforms to a constant plane of 1/D") {
    for (int d : {5, 8}) {
        Plane p(d, d);
        p.at(0, 0) = 1.0;
        const FieldPlane f = fourier(to_field(p));
        for (const cplx& z : f.v) {
            REQUIRE(z.real() == Catch::Approx(1.0 / d).margin(1e-12));
            REQUIRE(std::abs(z.imag()) <= 1e-12);
        }
    }
}

TEST_CASE("the unitary transform preserves the L2 norm") {
    std::mt19937_64 gen(107);
    for (int d : {6, 9, 16}) {
        const FieldPlane f = random_field(gen, d);
        REQUIRE(l2(fourier(f)) == Catch::Approx(l2(f)).epsilon(1e-10));
    }
}

TEST_CASE("four_f_pass with a delta filter pattern is the identity") {
    std::mt19937_64 gen(109);
    for (int d : {7, 8}) {
        const Plane x = oracle::random_plane(gen, d, d);
        Plane delta(d, d);
        delta.at(0, 0) = 1.0;
        const FieldPlane out = four_f_pass(x, fourier(to_field(delta)));
        REQUIRE(max_imag(out) <= 1e-11);
        REQUIRE(oracle::max_abs_diff(real_part(out), x) <= 1e-11);
    }
}

TEST_CASE("a shifted delta pattern circularly translates the input") {
    std::mt19937_64 gen(113);
    const int d = 9, dr = 2, dc = 5;
    const Plane x = oracle::random_plane(gen, d, d);
    Plane delta(d, d);
    delta.at(dr, dc) = 1.0;
    const Plane out = real_part(four_f_pass(x, fourier(to_field(delta))));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            REQUIRE(out.at(i, j) ==
                    Catch::Approx(x.at((i - dr + d) % d, (j - dc + d) % d)).margin(1e-11));
}

TEST_CASE("four_f_pass equals the quartic circular convolution oracle") {
    std::mt19937_64 gen(127);
    for (int d : {6, 8, 10}) {
        const Plane x = oracle::random_plane(gen, d, d);
        const Plane k = oracle::random_plane(gen, d, d);
        const Plane got = real_part(four_f_pass(x, fourier(to_field(k))));
        const Plane ref = oracle::circ_conv(x, k);
        REQUIRE(oracle::max_abs_diff(got, ref) <= 1e-9);
    }
}

TEST_CASE("make_filter_plane turns the pass into circular cross-correlation") {
    std::mt19937_64 gen(131);
    for (int d : {7, 8, 12}) {
        const Plane x = oracle::random_plane(gen, d, d);
        const Plane pat = oracle::random_plane(gen, d, d);
        const FieldPlane out = four_f_pass(x, make_filter_plane(pat));
        REQUIRE(max_imag(out) <= 1e-9);
        const Plane ref = oracle::circ_corr(pat, x);
        REQUIRE(oracle::max_abs_diff(real_part(out), ref) <= 1e-9);
    }
}

TEST_CASE("reflection-symmetric patterns are their own filter planes") {
    std::mt19937_64 gen(137);
    const int d = 8;
    Plane pat(d, d);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (pat.at(i, j) != 0.0) continue;
            const double v = dist(gen);
            pat.at(i, j) = v;
            pat.at((d - i) % d, (d - j) % d) = v;
        }
    REQUIRE(max_abs_diff(make_filter_plane(pat), fourier(to_field(pat))) <= 1e-12);
}

TEST_CASE("flip_circular fixes the origin and is an involution") {
    std::mt19937_64 gen(139);
    const Plane p = oracle::random_plane(gen, 6, 6);
    const Plane f = flip_circular(p);
    REQUIRE(f.at(0, 0) == p.at(0, 0));
    REQUIRE(f.at(1, 2) == p.at(5, 4));
    REQUIRE(oracle::max_abs_diff(flip_circular(f), p) == 0.0);
}

TEST_CASE("the pass is linear in the filter plane") {
    std::mt19937_64 gen(149);
    const int d = 8;
    const Plane x = oracle::random_plane(gen, d, d);
    const Plane ka = oracle::random_plane(gen, d, d);
    const Plane kb = oracle::random_plane(gen, d, d);
    Plane mix(d, d);
    for (std::size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = 2.0 * ka.v[i] - 0.5 * kb.v[i];
    const Plane ya = real_part(four_f_pass(x, make_filter_plane(ka)));
    const Plane yb = real_part(four_f_pass(x, make_filter_plane(kb)));
    const Plane ym = real_part(four_f_pass(x, make_filter_plane(mix)));
    for (std::size_t i = 0; i < ym.v.size(); ++i)
        REQUIRE(ym.v[i] == Catch::Approx(2.0 * ya.v[i] - 0.5 * yb.v[i]).margin(1e-9));
}

TEST_CASE("circularly shifting the input shifts the correlation output") {
    std::mt19937_64 gen(151);
    const int d = 9, dr = 3, dc = 7;
    const Plane x = oracle::random_plane(gen, d, d);
    const Plane pat = oracle::random_plane(gen, d, d);
    Plane xs(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) xs.at(i, j) = x.at((i - dr + d) % d, (j - dc + d) % d);
    const Plane y = real_part(four_f_pass(x, make_filter_plane(pat)));
    const Plane ys = real_part(four_f_pass(xs, make_filter_plane(pat)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            REQUIRE(ys.at(i, j) ==
                    Catch::Approx(y.at((i - dr + d) % d, (j - dc + d) % d)).margin(1e-9));
}

TEST_CASE("real inputs leave only numerical-noise imaginary residue") {
    std::mt19937_64 gen(157);
    for (int d : {12, 30}) {
        const Plane x = oracle::random_plane(gen, d, d);
        const Plane pat = oracle::random_plane(gen, d, d);
        const FieldPlane out = four_f_pass(x, make_filter_plane(pat));
        double scale = 0.0;
        for (const cplx& z : out.v) scale = std::max(scale, std::abs(z));
        REQUIRE(max_imag(out) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("mismatched plane sides are rejected") {
    Plane x(8, 8);
    Plane pat(6, 6);
    REQUIRE_THROWS_AS(four_f_pass(x, make_filter_plane(pat)), error);
}
