// Frame-count model against hand-computed golden values.

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "f4/perf.hpp"

using namespace f4;

namespace {

ConvSpec layer(int M, int N, int Nc, int Nk, ConvMode mode = ConvMode::same) {
    ConvSpec s;
    s.M = M;
    s.N = N;
    s.Nc = Nc;
    s.Nk = Nk;
    s.mode = mode;
    return s;
}

const SystemConfig kSys{4096, 2e6};

}  // namespace

TEST_CASE("per-frame capacity follows floor(D/S)^2") {
    CHECK(cells_per_frame(layer(32, 3, 1, 1), kSys) == 14400);   // S=34, g=120
    CHECK(cells_per_frame(layer(64, 3, 1, 1), kSys) == 3844);    // S=66, g=62
    CHECK(cells_per_frame(layer(1024, 3, 1, 1), kSys) == 9);     // S=1026, g=3
    CHECK(cells_per_frame(layer(32, 7, 1, 1), kSys) == 11449);   // S=38, g=107
    CHECK(cells_per_frame(layer(2048, 3, 1, 1), kSys) == 1);
    try {
        cells_per_frame(layer(4096, 3, 1, 1), kSys);
        FAIL("expected infeasible");
    } catch (const error& e) {
        CHECK(e.code() == errc::infeasible);
    }
}

TEST_CASE("amortized single-convolution times at 2 MHz") {
    struct Row {
        int M, N;
        double t;
    };
    // 3-significant-figure goldens recomputed by hand from 1/(f*T).
    const Row rows[] = {
        {32, 3, 3.47e-11},  {64, 3, 1.30e-10}, {128, 3, 5.20e-10}, {256, 3, 2.22e-9},
        {512, 3, 1.02e-8},  {1024, 3, 5.56e-8}, {32, 7, 4.37e-11},
    };
    for (const Row& r : rows) {
        const double t = single_conv_time(layer(r.M, r.N, 1, 1), kSys);
        INFO("M=" << r.M << " N=" << r.N);
        CHECK_THAT(t, Catch::Matchers::WithinRel(r.t, 5e-3));
    }
}

TEST_CASE("per-scheme frame counts for one layer") {
    const ConvSpec l = layer(27, 5, 96, 256);  // S=31, g=132, T=17424
    CHECK(frames_for_layer(l, kSys, Scheme::none) == 96.0 * 256);
    CHECK(frames_for_layer(l, kSys, Scheme::channel) == 256.0);
    CHECK(frames_for_layer(l, kSys, Scheme::filter) == 96.0);
    CHECK_THAT(frames_for_layer(l, kSys, Scheme::input),
               Catch::Matchers::WithinRel(96.0 * 256 / 17424.0, 1e-12));
    CHECK(frames_for_layer(l, kSys, Scheme::mixed) == 2.0);  // T_B=132

    // Multi-pass once the count exceeds capacity: T=1 at M=2048.
    const ConvSpec big = layer(2048, 3, 64, 8);
    CHECK(frames_for_layer(big, kSys, Scheme::channel) == 8.0 * 64);
    CHECK(frames_for_layer(big, kSys, Scheme::filter) == 64.0 * 8);
}

TEST_CASE("network totals match hand-summed goldens") {
    const NetworkSpec alex = preset_alexnet();
    CHECK(network_frames(alex, kSys, Scheme::none) == 368928.0);
    CHECK(network_frames(alex, kSys, Scheme::channel) == 1376.0);
    CHECK(network_frames(alex, kSys, Scheme::mixed) == 15.0);
    CHECK_THAT(network_time(alex, kSys, Scheme::none),
               Catch::Matchers::WithinRel(1.84464e-1, 1e-9));
    CHECK_THAT(network_time(alex, kSys, Scheme::channel),
               Catch::Matchers::WithinRel(6.88e-4, 1e-9));
    CHECK_THAT(network_time(alex, kSys, Scheme::mixed),
               Catch::Matchers::WithinRel(7.5e-6, 1e-9));

    const NetworkSpec vgg = preset_vgg16_cifar();
    CHECK(network_frames(vgg, kSys, Scheme::channel) == 4224.0);
    CHECK_THAT(network_time(vgg, kSys, Scheme::channel),
               Catch::Matchers::WithinRel(2.112e-3, 1e-9));
}

TEST_CASE("auto planning never exceeds the channel-only frame count") {
    for (const NetworkSpec& net :
         {preset_alexnet(), preset_vgg16_cifar(), preset_vgg16_imagenet(), preset_srcnn()}) {
        const double ch = network_frames(net, kSys, Scheme::channel);
        const double au = network_frames(net, kSys, Scheme::none, true);
        INFO(net.name);
        CHECK(au <= ch);
    }
}

TEST_CASE("one-by-one layers cost nothing") {
    NetworkSpec net;
    net.name = "t";
    net.layers = {layer(32, 3, 4, 4), layer(32, 1, 4, 4)};
    CHECK(network_frames(net, kSys, Scheme::none) == 16.0);
}

TEST_CASE("device resolution requirements per scheme") {
    const ConvSpec l = layer(300, 3, 64, 64);
    const double M2 = 300.0 * 300, D2 = 4096.0 * 4096;
    const ResolutionReq none = resolution_requirements(l, kSys, Scheme::none);
    CHECK(none.input_slm == M2);
    CHECK(none.sensor == M2);
    const ResolutionReq in = resolution_requirements(l, kSys, Scheme::input);
    CHECK(in.sensor == D2);
    const ResolutionReq fil = resolution_requirements(l, kSys, Scheme::filter);
    CHECK(fil.input_slm == M2);
    CHECK(fil.filter_slm == D2);
    CHECK(fil.sensor == D2);
    const ResolutionReq ch = resolution_requirements(l, kSys, Scheme::channel);
    CHECK(ch.input_slm == D2);
    CHECK(ch.sensor == M2);
    const ResolutionReq mx = resolution_requirements(l, kSys, Scheme::mixed);
    CHECK(mx.sensor == D2 / 64);

    // Sensor pixel-count reduction of channel tiling relative to full plane.
    const double reduction = in.sensor / ch.sensor;
    CHECK(std::abs(reduction - 186.0) <= 1.0);
}

TEST_CASE("network JSON round-trips and rejects junk") {
    const NetworkSpec alex = preset_alexnet();
    const NetworkSpec back = network_from_json(to_json(alex));
    REQUIRE(back.layers.size() == alex.layers.size());
    for (std::size_t i = 0; i < alex.layers.size(); ++i) {
        CHECK(back.layers[i].M == alex.layers[i].M);
        CHECK(back.layers[i].N == alex.layers[i].N);
        CHECK(back.layers[i].Nc == alex.layers[i].Nc);
        CHECK(back.layers[i].Nk == alex.layers[i].Nk);
    }
    try {
        network_from_json(nlohmann::json{{"name", "x"}});
        FAIL("expected format error");
    } catch (const error& e) {
        CHECK(e.code() == errc::format);
    }
    try {
        preset_network("resnet99");
        FAIL("expected validation error");
    } catch (const error& e) {
        CHECK(e.code() == errc::validation);
    }
}
