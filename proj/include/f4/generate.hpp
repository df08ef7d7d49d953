#pragma once

// Deterministic generator for a four-class texture-classification task sized
// for a desk-scale correlator plane. Classes are synthetic texture families
// (rings, checker, horizontal and vertical bands) rendered into three
// channels with a class-specific channel mix, then jittered by circular
// shift, brightness, and pixel noise.
//
// The model is derived, not trained: conv banks are seeded zero-mean random
// projections and the dense head is a nearest-class-mean readout fitted on an
// internally generated training split. Everything is a pure function of the
// seed.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "f4/nn.hpp"
#include "f4/model_io.hpp"
#include "f4/rng.hpp"

namespace f4 {

inline constexpr int kDeskSide = 12;
inline constexpr int kDeskChannels = 3;
inline constexpr int kDeskClasses = 4;

inline const std::vector<std::string>& desk_class_names() {
    static const std::vector<std::string> names = {"bands_v", "bands_h", "diag", "antidiag"};
    return names;
}

namespace detail {

// The four classes share one ring-textured base and differ only by a small
// oriented grating. Class margins are deliberately narrow so detector noise
// and quantization visibly move the decision boundary while clean inference
// stays essentially perfect.
inline constexpr double kDeskSignature = 0.067;

inline double desk_texture(int cls, int i, int j) {
    const double di = i - (kDeskSide - 1) / 2.0;
    const double dj = j - (kDeskSide - 1) / 2.0;
    const double base = 0.5 + 0.5 * std::cos(2.0 * 3.14159265358979324 *
                                             std::sqrt(di * di + dj * dj) / 5.5);
    const double w = 2.0 * 3.14159265358979324 / 4.0;
    double sig = 0.0;
    switch (cls) {
        case 0: sig = std::cos(w * j); break;
        case 1: sig = std::cos(w * i); break;
        case 2: sig = std::cos(w * (i + j)); break;
        default: sig = std::cos(w * (i - j)); break;
    }
    return 0.45 + 0.35 * base + kDeskSignature * sig;
}

inline const double kDeskChannelMix[kDeskChannels] = {1.00, 0.75, 0.55};

}  // namespace detail

// One sample of the given class: the class texture under mild brightness
// jitter and pixel noise, clipped to [0,1].
inline MultiChannelImage desk_sample(int cls, Rng& rng) {
    MultiChannelImage img(kDeskChannels, kDeskSide);
    const double bright = 0.95 + 0.10 * rng.uniform();
    for (int c = 0; c < kDeskChannels; ++c) {
        const double mix = detail::kDeskChannelMix[c];
        for (int i = 0; i < kDeskSide; ++i)
            for (int j = 0; j < kDeskSide; ++j) {
                double v = bright * mix * detail::desk_texture(cls, i, j) + 0.02 * rng.uniform();
                if (v < 0.0) v = 0.0;
                if (v > 1.0) v = 1.0;
                img.ch[c].at(i, j) = v;
            }
    }
    return img;
}

inline Dataset make_desk_dataset(std::uint64_t seed, int per_class) {
    require(per_class >= 1, errc::validation, "dataset needs at least one image per class");
    Dataset ds;
    ds.name = "desk4";
    ds.side = kDeskSide;
    ds.channels = kDeskChannels;
    ds.classes = desk_class_names();
    Rng rng(seed ^ 0x64617461736574ULL);  // dataset stream, distinct from training
    for (int rep = 0; rep < per_class; ++rep)
        for (int cls = 0; cls < kDeskClasses; ++cls)
            ds.items.push_back({desk_sample(cls, rng), cls});
    return ds;
}

namespace detail {

inline FilterBank desk_bank(int Nk, int Nc, int N, Rng& rng) {
    FilterBank fb(Nk, Nc, N);
    for (int k = 0; k < Nk; ++k) {
        double mean = 0.0;
        for (int c = 0; c < Nc; ++c)
            for (double& v : fb.f[k][c].v) {
                v = rng.normal();
                mean += v;
            }
        mean /= double(Nc) * N * N;
        const double scale = 1.0 / std::sqrt(double(Nc) * N * N);
        // Zero-mean, fan-in scaled: both pseudo-negative halves stay active.
        for (int c = 0; c < Nc; ++c)
            for (double& v : fb.f[k][c].v) v = (v - mean) * scale;
    }
    return fb;
}

// Electronic feature extractor matching the ideal backend: conv, |.|, pool.
inline std::vector<double> desk_features(const std::vector<ConvLayer>& convs,
                                         const MultiChannelImage& image) {
    MultiChannelImage x = image;
    for (const ConvLayer& layer : convs) {
        x = conv_ideal(layer, x);
        x = avgpool2(x);
    }
    return flatten(x);
}

}  // namespace detail

// Builds the shipped model: two same-mode conv layers with pooling and a
// nearest-class-mean dense head fitted on a seeded training split.
inline Model make_desk_model(std::uint64_t seed, int train_per_class = 32) {
    Rng wrng(seed ^ 0x776569676874ULL);  // weight stream

    std::vector<ConvLayer> convs(2);
    convs[0].spec.M = kDeskSide;
    convs[0].spec.N = 5;
    convs[0].spec.Nc = kDeskChannels;
    convs[0].spec.Nk = 8;
    convs[0].bank = detail::desk_bank(8, kDeskChannels, 5, wrng);
    convs[1].spec.M = kDeskSide / 2;
    convs[1].spec.N = 3;
    convs[1].spec.Nc = 8;
    convs[1].spec.Nk = 8;
    convs[1].bank = detail::desk_bank(8, 8, 3, wrng);

    const int feat_side = kDeskSide / 4;
    const int feat_dim = feat_side * feat_side * 8;

    // Class-mean features over the training split.
    Rng trng(seed ^ 0x747261696eULL);  // training stream
    std::vector<std::vector<double>> mean(kDeskClasses, std::vector<double>(feat_dim, 0.0));
    for (int rep = 0; rep < train_per_class; ++rep)
        for (int cls = 0; cls < kDeskClasses; ++cls) {
            const std::vector<double> f = detail::desk_features(convs, desk_sample(cls, trng));
            for (int i = 0; i < feat_dim; ++i) mean[cls][i] += f[i];
        }
    for (auto& m : mean)
        for (double& v : m) v /= double(train_per_class);

    Model model;
    model.name = "desk4";
    model.seed = seed;
    model.input_side = kDeskSide;
    model.input_channels = kDeskChannels;
    model.classes = desk_class_names();

    LayerNode c1;
    c1.kind = LayerKind::conv;
    c1.conv = convs[0];
    LayerNode p1;
    p1.kind = LayerKind::pool2;
    LayerNode c2;
    c2.kind = LayerKind::conv;
    c2.conv = convs[1];
    LayerNode p2;
    p2.kind = LayerKind::pool2;
    LayerNode d;
    d.kind = LayerKind::dense;
    d.dense.in = feat_dim;
    d.dense.out = kDeskClasses;
    d.dense.W.resize(std::size_t(feat_dim) * kDeskClasses);
    d.dense.b.resize(kDeskClasses);
    // Nearest-mean as a linear head: score_c = mu_c . f - |mu_c|^2 / 2.
    for (int cls = 0; cls < kDeskClasses; ++cls) {
        double norm2 = 0.0;
        for (int i = 0; i < feat_dim; ++i) {
            d.dense.W[std::size_t(cls) * feat_dim + i] = mean[cls][i];
            norm2 += mean[cls][i] * mean[cls][i];
        }
        d.dense.b[cls] = -0.5 * norm2;
    }

    model.layers = {c1, p1, c2, p2, d};
    model.validate();
    return model;
}

}  // namespace f4
