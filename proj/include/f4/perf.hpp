#pragma once

// Frame-count throughput model. A frame is one exposure of the plane at the
// modulator frame rate, so layer time = frames / freq_hz. Per-frame capacity
// is T = floor(D/S)^2 cells of pitch S = M+N-1.
//
// Frames to produce all Nk * Nc partial products of a layer:
//   none     Nc * Nk          one conv per frame
//   input    Nc * Nk / T      amortized: T images share each kernel frame
//   filter   Nc * ceil(Nk/T)  all kernels of a channel per frame
//   channel  Nk * ceil(Nc/T)  all channels of a filter per frame
//   mixed    ceil(Nk/T_B)     T_B filters per frame, channels summed in-frame

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "f4/core.hpp"
#include "f4/tiling.hpp"

namespace f4 {

struct NetworkSpec {
    std::string name;
    std::vector<ConvSpec> layers;

    void validate() const {
        require(!layers.empty(), errc::validation, "network has no layers");
        for (const ConvSpec& l : layers) l.validate();
    }
};

inline int cells_per_frame(const ConvSpec& spec, const SystemConfig& sys) {
    sys.validate();
    const int S = spec.cell_side();
    const int g = sys.D / S;
    require(g >= 1, errc::infeasible, "one padded cell exceeds the plane");
    return g * g;
}

inline double single_conv_time(const ConvSpec& spec, const SystemConfig& sys) {
    return 1.0 / (sys.freq_hz * cells_per_frame(spec, sys));
}

// Frames for one layer under a fixed scheme. Input tiling amortizes one
// kernel frame over T images, so its count may be fractional.
inline double frames_for_layer(const ConvSpec& spec, const SystemConfig& sys, Scheme scheme) {
    spec.validate();
    const double T = cells_per_frame(spec, sys);
    switch (scheme) {
        case Scheme::none:
            return double(spec.Nc) * spec.Nk;
        case Scheme::input:
            return double(spec.Nc) * spec.Nk / T;
        case Scheme::filter:
            return double(spec.Nc) * std::ceil(spec.Nk / T);
        case Scheme::channel:
            return double(spec.Nk) * std::ceil(spec.Nc / T);
        case Scheme::mixed: {
            const TilingPlan p = plan_tiling(spec, sys);
            require(p.scheme == Scheme::mixed, errc::infeasible,
                    "mixed tiling infeasible for this layer");
            return double(p.frames);
        }
    }
    fail(errc::validation, "unknown scheme");
}

inline double layer_time(const ConvSpec& spec, const SystemConfig& sys, Scheme scheme) {
    return frames_for_layer(spec, sys, scheme) / sys.freq_hz;
}

// Whole-network inference time. 1x1 layers carry no spatial structure and
// are assumed to run on the electronic side, so they are skipped. auto_plan
// resolves the per-layer channel/mixed choice.
inline double network_time(const NetworkSpec& net, const SystemConfig& sys, Scheme scheme,
                           bool auto_plan = false) {
    net.validate();
    double t = 0.0;
    for (const ConvSpec& l : net.layers) {
        if (l.N == 1) continue;
        Scheme s = scheme;
        if (auto_plan) s = plan_tiling(l, sys).scheme;
        t += layer_time(l, sys, s);
    }
    return t;
}

inline double network_frames(const NetworkSpec& net, const SystemConfig& sys, Scheme scheme,
                             bool auto_plan = false) {
    net.validate();
    double fr = 0.0;
    for (const ConvSpec& l : net.layers) {
        if (l.N == 1) continue;
        Scheme s = scheme;
        if (auto_plan) s = plan_tiling(l, sys).scheme;
        fr += frames_for_layer(l, sys, s);
    }
    return fr;
}

// Pixel counts each device must resolve per frame for one layer.
struct ResolutionReq {
    double input_slm = 0.0;
    double filter_slm = 0.0;
    double sensor = 0.0;
};

inline ResolutionReq resolution_requirements(const ConvSpec& spec, const SystemConfig& sys,
                                             Scheme scheme) {
    spec.validate();
    sys.validate();
    const double M2 = double(spec.M) * spec.M;
    const double D2 = double(sys.D) * sys.D;
    switch (scheme) {
        case Scheme::none:
            return {M2, M2, M2};
        case Scheme::input:
            return {D2, D2, D2};
        case Scheme::filter:
            return {M2, D2, D2};
        case Scheme::channel:
            return {D2, D2, M2};
        case Scheme::mixed:
            return {D2, D2, D2 / spec.Nc};
    }
    fail(errc::validation, "unknown scheme");
}

// ---------------------------------------------------------------------------
// Built-in workloads. M is each conv layer's input side; pooling between
// layers shows up as the shrinking M. 1x1 layers are listed but cost nothing.

inline NetworkSpec preset_alexnet() {
    NetworkSpec n;
    n.name = "alexnet";
    auto add = [&](int M, int N, int Nc, int Nk) {
        ConvSpec s;
        s.M = M;
        s.N = N;
        s.Nc = Nc;
        s.Nk = Nk;
        n.layers.push_back(s);
    };
    add(227, 11, 3, 96);
    add(27, 5, 96, 256);
    add(13, 3, 256, 384);
    add(13, 3, 384, 384);
    add(13, 3, 384, 256);
    return n;
}

inline NetworkSpec preset_vgg16(int input_side, const std::string& name) {
    NetworkSpec n;
    n.name = name;
    int m = input_side;
    auto block = [&](int convs, int Nc_first, int Nk) {
        int nc = Nc_first;
        for (int i = 0; i < convs; ++i) {
            ConvSpec s;
            s.M = m;
            s.N = 3;
            s.Nc = nc;
            s.Nk = Nk;
            n.layers.push_back(s);
            nc = Nk;
        }
        m /= 2;
    };
    block(2, 3, 64);
    block(2, 64, 128);
    block(3, 128, 256);
    block(3, 256, 512);
    block(3, 512, 512);
    return n;
}

inline NetworkSpec preset_vgg16_cifar() { return preset_vgg16(32, "vgg16-cifar"); }
inline NetworkSpec preset_vgg16_imagenet() { return preset_vgg16(224, "vgg16-imagenet"); }

inline NetworkSpec preset_srcnn() {
    NetworkSpec n;
    n.name = "srcnn";
    auto add = [&](int M, int N, int Nc, int Nk) {
        ConvSpec s;
        s.M = M;
        s.N = N;
        s.Nc = Nc;
        s.Nk = Nk;
        n.layers.push_back(s);
    };
    add(512, 9, 1, 64);
    add(512, 5, 64, 32);
    add(512, 5, 32, 1);
    return n;
}

inline NetworkSpec preset_deconvnet() {
    NetworkSpec n;
    n.name = "deconvnet";
    auto add = [&](int M, int N, int Nc, int Nk) {
        ConvSpec s;
        s.M = M;
        s.N = N;
        s.Nc = Nc;
        s.Nk = Nk;
        // Even kernels cannot center a same-mode halo; cost is mode-agnostic.
        s.mode = N % 2 == 1 ? ConvMode::same : ConvMode::valid;
        n.layers.push_back(s);
    };
    add(512, 121, 1, 38);
    add(512, 121, 38, 38);
    add(512, 16, 38, 512);
    add(512, 1, 512, 512);
    add(512, 8, 512, 3);
    return n;
}

inline NetworkSpec preset_network(const std::string& name) {
    if (name == "alexnet") return preset_alexnet();
    if (name == "vgg16-cifar") return preset_vgg16_cifar();
    if (name == "vgg16-imagenet") return preset_vgg16_imagenet();
    if (name == "srcnn") return preset_srcnn();
    if (name == "deconvnet") return preset_deconvnet();
    fail(errc::validation, "unknown network preset: " + name);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const NetworkSpec& net) {
    nlohmann::json j;
    j["name"] = net.name;
    j["layers"] = nlohmann::json::array();
    for (const ConvSpec& l : net.layers)
        j["layers"].push_back({{"M", l.M},
                               {"N", l.N},
                               {"Nc", l.Nc},
                               {"Nk", l.Nk},
                               {"mode", l.mode == ConvMode::same ? "same" : "valid"}});
    return j;
}

inline NetworkSpec network_from_json(const nlohmann::json& j) {
    NetworkSpec net;
    require(j.contains("layers"), errc::format, "network JSON needs a layers array");
    try {
        net.name = j.value("name", "custom");
        for (const auto& l : j.at("layers")) {
            ConvSpec s;
            s.M = l.at("M").get<int>();
            s.N = l.at("N").get<int>();
            s.Nc = l.at("Nc").get<int>();
            s.Nk = l.at("Nk").get<int>();
            s.mode = l.value("mode", "same") == "valid" ? ConvMode::valid : ConvMode::same;
            net.layers.push_back(s);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("network JSON is malformed: ") + e.what());
    }
    net.validate();
    return net;
}

}  // namespace f4
