#pragma once

// Small CNN runtime with three interchangeable convolution backends:
//   ideal      exact digital arithmetic
//   channel4f  all channels summed in one exposure (channel or mixed tiling),
//              detector readout gives |sum|
//   pseudoneg  per-channel filter tiling; signed kernels split into
//              nonnegative halves, two exposures each, recombined and summed
//              digitally after readout
//
// Every backend applies the same |.| activation after each conv layer, so
// they approximate one ideal function and differ only in accumulated
// detector, noise, and quantization error. Pooling and the dense head are
// electronic and exact.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "f4/core.hpp"
#include "f4/sensor.hpp"
#include "f4/tiling.hpp"

namespace f4 {

enum class LayerKind { conv, pool2, dense };

struct ConvLayer {
    ConvSpec spec;
    FilterBank bank;
};

struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> W;  // row-major out x in
    std::vector<double> b;  // out
};

struct LayerNode {
    LayerKind kind = LayerKind::conv;
    ConvLayer conv;
    DenseLayer dense;
};

struct Model {
    std::string name;
    int input_side = 0;
    int input_channels = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> classes;
    std::vector<LayerNode> layers;

    void validate() const {
        require(input_side >= 1 && input_channels >= 1, errc::validation,
                "model: bad input shape");
        require(!layers.empty(), errc::validation, "model: no layers");
        int side = input_side, ch = input_channels;
        bool dense_seen = false;
        for (const LayerNode& n : layers) {
            require(!dense_seen, errc::validation, "model: layers after the dense head");
            switch (n.kind) {
                case LayerKind::conv: {
                    ConvSpec s = n.conv.spec;
                    require(s.M == side && s.Nc == ch, errc::validation,
                            "model: conv input shape mismatch");
                    s.validate();
                    require(n.conv.bank.filters() == s.Nk && n.conv.bank.channels() == s.Nc &&
                                n.conv.bank.kernel_side == s.N,
                            errc::validation, "model: conv bank shape mismatch");
                    side = s.out_side();
                    ch = s.Nk;
                    break;
                }
                case LayerKind::pool2:
                    require(side % 2 == 0, errc::validation, "model: pool needs an even side");
                    side /= 2;
                    break;
                case LayerKind::dense:
                    require(n.dense.in == side * side * ch, errc::validation,
                            "model: dense input size mismatch");
                    require(n.dense.out == int(classes.size()), errc::validation,
                            "model: dense output size must match class count");
                    require(int(n.dense.W.size()) == n.dense.in * n.dense.out &&
                                int(n.dense.b.size()) == n.dense.out,
                            errc::validation, "model: dense weight shape mismatch");
                    dense_seen = true;
                    break;
            }
        }
        require(dense_seen, errc::validation, "model: missing dense head");
    }
};

enum class Backend { ideal, channel4f, pseudoneg4f };

inline const char* to_string(Backend b) {
    switch (b) {
        case Backend::ideal: return "ideal";
        case Backend::channel4f: return "channel4f";
        case Backend::pseudoneg4f: return "pseudoneg4f";
    }
    return "?";
}

inline Backend backend_from_string(const std::string& s) {
    if (s == "ideal") return Backend::ideal;
    if (s == "channel4f") return Backend::channel4f;
    if (s == "pseudoneg4f") return Backend::pseudoneg4f;
    fail(errc::validation, "unknown backend: " + s);
}

struct RunConfig {
    SystemConfig sys{48, 2e6};
    SensorConfig sensor;            // noiseless, unquantized by default
    Scheme scheme = Scheme::none;   // none means plan per layer (channel4f only)
    std::vector<double> layer_full_scale;  // per conv layer; empty means per-frame auto
};

// ---------------------------------------------------------------------------
// Electronic pieces

inline MultiChannelImage avgpool2(const MultiChannelImage& x) {
    require(x.side % 2 == 0, errc::validation, "pool needs an even side");
    MultiChannelImage out(x.channels(), x.side / 2);
    for (int c = 0; c < x.channels(); ++c)
        for (int i = 0; i < out.side; ++i)
            for (int j = 0; j < out.side; ++j)
                out.ch[c].at(i, j) =
                    0.25 * (x.ch[c].at(2 * i, 2 * j) + x.ch[c].at(2 * i, 2 * j + 1) +
                            x.ch[c].at(2 * i + 1, 2 * j) + x.ch[c].at(2 * i + 1, 2 * j + 1));
    return out;
}

inline void abs_inplace(MultiChannelImage& x) {
    for (Plane& p : x.ch)
        for (double& v : p.v) v = std::abs(v);
}

inline std::vector<double> flatten(const MultiChannelImage& x) {
    std::vector<double> out;
    out.reserve(std::size_t(x.channels()) * x.side * x.side);
    for (const Plane& p : x.ch) out.insert(out.end(), p.v.begin(), p.v.end());
    return out;
}

inline std::vector<double> dense_forward(const DenseLayer& d, const std::vector<double>& in) {
    require(int(in.size()) == d.in, errc::validation, "dense input size mismatch");
    std::vector<double> out(d.out);
    for (int o = 0; o < d.out; ++o) {
        double acc = d.b[o];
        const double* w = d.W.data() + std::size_t(o) * d.in;
        for (int i = 0; i < d.in; ++i) acc += w[i] * in[i];
        out[o] = acc;
    }
    return out;
}

inline int argmax(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < int(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// ---------------------------------------------------------------------------
// Conv backends. Each returns the post-activation feature stack.

namespace detail {

inline std::uint64_t frame_key(std::uint64_t image_id, int layer_idx, int seq) {
    return (image_id << 20) ^ (std::uint64_t(layer_idx) << 14) ^ std::uint64_t(seq);
}

inline std::vector<std::pair<int, int>> window_origins(const TilingLayout& lay) {
    std::vector<std::pair<int, int>> o;
    for (const WindowRegion& w : lay.windows) o.push_back({w.row, w.col});
    return o;
}

}  // namespace detail

inline MultiChannelImage conv_ideal(const ConvLayer& layer, const MultiChannelImage& x) {
    MultiChannelImage out(layer.spec.Nk, layer.spec.out_side());
    for (int k = 0; k < layer.spec.Nk; ++k) out.ch[k] = direct_conv(x, layer.bank, k, layer.spec);
    abs_inplace(out);
    return out;
}

// Precomputed exposures for one conv layer: layout plus transform-plane
// filter pattern, reusable across every image.
struct FrameJob {
    TilingLayout layout;
    FieldPlane filter_fourier;
    std::vector<int> out_filter;   // which output channel each window feeds
    std::vector<int> sign;         // +1 / -1 contribution (pseudo-negative)
    std::vector<int> in_channel;   // pseudoneg: the single input channel, else -1
    int ch_first = 0;              // channel tiling: channel range of this pass
    int ch_count = -1;             // -1 means all channels
};

inline std::vector<FrameJob> build_channel_jobs(const ConvLayer& layer, const SystemConfig& sys,
                                                Scheme scheme) {
    const ConvSpec& spec = layer.spec;
    if (scheme == Scheme::none) scheme = plan_tiling(spec, sys).scheme;
    require(scheme == Scheme::channel || scheme == Scheme::mixed, errc::validation,
            "channel4f backend runs channel or mixed tiling");
    std::vector<FrameJob> jobs;
    if (scheme == Scheme::channel) {
        // Channel counts beyond one frame's capacity run as extra passes whose
        // magnitudes are summed electronically.
        for (const auto& [first, last] : channel_passes(spec, sys)) {
            ConvSpec sub = spec;
            sub.Nc = last - first;
            sub.Nk = 1;
            const TilingLayout lay = layout_channel(sub, sys);
            for (int k = 0; k < spec.Nk; ++k) {
                std::vector<const Plane*> ks;
                for (int c = first; c < last; ++c) ks.push_back(&layer.bank.f[k][c]);
                FrameJob job{lay, make_filter_plane(tiled_filter_pattern(lay, ks)), {k}, {1},
                             {-1}, first, last - first};
                jobs.push_back(std::move(job));
            }
        }
    } else {
        const int T_B = layout_mixed(spec, sys, 1).blocks_per_frame;
        for (int first = 0; first < spec.Nk; first += T_B) {
            const int n = std::min(T_B, spec.Nk - first);
            const TilingLayout lay = layout_mixed(spec, sys, n);
            std::vector<const Plane*> ks;
            FrameJob job;
            job.layout = lay;
            for (int t = 0; t < n; ++t) {
                for (int c = 0; c < spec.Nc; ++c) ks.push_back(&layer.bank.f[first + t][c]);
                job.out_filter.push_back(first + t);
                job.sign.push_back(1);
                job.in_channel.push_back(-1);
            }
            job.filter_fourier = make_filter_plane(tiled_filter_pattern(lay, ks));
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

inline std::vector<FrameJob> build_pseudoneg_jobs(const ConvLayer& layer,
                                                  const SystemConfig& sys) {
    const ConvSpec& spec = layer.spec;
    const int S = spec.cell_side();
    const int g = sys.D / S;
    require(g >= 1, errc::infeasible, "one padded cell exceeds the plane");
    const int T = g * g;
    std::vector<FrameJob> jobs;
    for (int c = 0; c < spec.Nc; ++c)
        for (int half = 0; half < 2; ++half)
            for (int first = 0; first < spec.Nk; first += T) {
                const int n = std::min(T, spec.Nk - first);
                const TilingLayout lay = layout_grid(Scheme::filter, spec, sys, n);
                FrameJob job;
                job.layout = lay;
                std::vector<Plane> halves;
                halves.reserve(n);
                for (int k = 0; k < n; ++k) {
                    auto [pos, neg] = split_pseudo_negative(layer.bank.f[first + k][c]);
                    halves.push_back(half == 0 ? pos : neg);
                    job.out_filter.push_back(first + k);
                    job.sign.push_back(half == 0 ? 1 : -1);
                    job.in_channel.push_back(c);
                }
                std::vector<const Plane*> kp;
                for (const Plane& p : halves) kp.push_back(&p);
                job.filter_fourier = make_filter_plane(tiled_filter_pattern(lay, kp));
                jobs.push_back(std::move(job));
            }
    return jobs;
}

// Runs one layer's prepared exposures on an input stack and accumulates the
// per-filter results after sensor readout.
inline MultiChannelImage run_conv_jobs(const std::vector<FrameJob>& jobs,
                                       const MultiChannelImage& x, const ConvSpec& spec,
                                       const SensorConfig& sensor, std::uint64_t image_id,
                                       int layer_idx) {
    MultiChannelImage out(spec.Nk, spec.out_side());
    int seq = 0;
    for (const FrameJob& job : jobs) {
        const TilingLayout& lay = job.layout;
        Plane input;
        if (lay.scheme == Scheme::filter) {
            input = tiled_input_plane(lay, x.ch[job.in_channel[0]]);
        } else if (job.ch_count >= 0 && job.ch_count < x.channels()) {
            MultiChannelImage sub(job.ch_count, x.side);
            for (int c = 0; c < job.ch_count; ++c) sub.ch[c] = x.ch[job.ch_first + c];
            input = tiled_input_plane(lay, sub);
        } else {
            input = tiled_input_plane(lay, x);
        }
        const TiledResult r = run_frame(lay, input, job.filter_fourier);
        const auto readouts = sensor_readout(r.outputs, detail::window_origins(lay), lay.D,
                                             sensor, detail::frame_key(image_id, layer_idx, seq));
        for (std::size_t w = 0; w < readouts.size(); ++w) {
            Plane& acc = out.ch[job.out_filter[w]];
            const double s = double(job.sign[w]);
            for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += s * readouts[w].v[i];
        }
        ++seq;
    }
    abs_inplace(out);
    return out;
}

// ---------------------------------------------------------------------------
// Whole-model forward

struct PreparedModel {
    const Model* model = nullptr;
    RunConfig cfg;
    Backend backend = Backend::ideal;
    std::vector<std::vector<FrameJob>> conv_jobs;  // empty vectors for the ideal backend
};

inline PreparedModel prepare(const Model& model, Backend backend, const RunConfig& cfg) {
    model.validate();
    PreparedModel pm;
    pm.model = &model;
    pm.cfg = cfg;
    pm.backend = backend;
    for (const LayerNode& n : model.layers) {
        if (n.kind != LayerKind::conv) continue;
        std::vector<FrameJob> jobs;
        if (backend == Backend::channel4f)
            jobs = build_channel_jobs(n.conv, cfg.sys, cfg.scheme);
        else if (backend == Backend::pseudoneg4f)
            jobs = build_pseudoneg_jobs(n.conv, cfg.sys);
        pm.conv_jobs.push_back(std::move(jobs));
    }
    return pm;
}

struct ForwardResult {
    std::vector<double> logits;
    int predicted = -1;
    std::vector<MultiChannelImage> conv_taps;  // post-activation stack per conv layer
};

inline ForwardResult forward(const PreparedModel& pm, const MultiChannelImage& image,
                             std::uint64_t image_id, bool keep_taps = false) {
    const Model& model = *pm.model;
    require(image.side == model.input_side && image.channels() == model.input_channels,
            errc::validation, "image shape does not match the model");
    MultiChannelImage x = image;
    ForwardResult res;
    int conv_idx = 0, layer_idx = 0;
    for (const LayerNode& n : model.layers) {
        switch (n.kind) {
            case LayerKind::conv: {
                SensorConfig sensor = pm.cfg.sensor;
                if (!pm.cfg.layer_full_scale.empty()) {
                    require(conv_idx < int(pm.cfg.layer_full_scale.size()), errc::validation,
                            "missing per-layer full scale");
                    sensor.full_scale = pm.cfg.layer_full_scale[conv_idx];
                }
                if (pm.backend == Backend::ideal)
                    x = conv_ideal(n.conv, x);
                else
                    x = run_conv_jobs(pm.conv_jobs[conv_idx], x, n.conv.spec, sensor, image_id,
                                      layer_idx);
                if (keep_taps) res.conv_taps.push_back(x);
                ++conv_idx;
                break;
            }
            case LayerKind::pool2:
                x = avgpool2(x);
                break;
            case LayerKind::dense:
                res.logits = dense_forward(n.dense, flatten(x));
                break;
        }
        ++layer_idx;
    }
    res.predicted = argmax(res.logits);
    return res;
}

// Per-layer full scales from a noiseless, unquantized pass over sample
// images: the largest intensity each conv layer ever presents to the ADC.
inline std::vector<double> calibrate_full_scale(const Model& model, Backend backend,
                                                const RunConfig& cfg,
                                                const std::vector<MultiChannelImage>& samples) {
    require(backend != Backend::ideal, errc::validation,
            "full-scale calibration applies to optical backends");
    RunConfig clean = cfg;
    clean.sensor = SensorConfig{};
    clean.layer_full_scale.clear();
    const PreparedModel pm = prepare(model, backend, clean);
    std::vector<double> fs(pm.conv_jobs.size(), 0.0);
    for (const MultiChannelImage& sample : samples) {
        MultiChannelImage x = sample;
        int conv_idx = 0;
        for (const LayerNode& n : model.layers) {
            if (n.kind == LayerKind::pool2) {
                x = avgpool2(x);
                continue;
            }
            if (n.kind == LayerKind::dense) break;
            for (const FrameJob& job : pm.conv_jobs[conv_idx]) {
                Plane input;
                if (job.layout.scheme == Scheme::filter) {
                    input = tiled_input_plane(job.layout, x.ch[job.in_channel[0]]);
                } else if (job.ch_count >= 0 && job.ch_count < x.channels()) {
                    MultiChannelImage sub(job.ch_count, x.side);
                    for (int c = 0; c < job.ch_count; ++c) sub.ch[c] = x.ch[job.ch_first + c];
                    input = tiled_input_plane(job.layout, sub);
                } else {
                    input = tiled_input_plane(job.layout, x);
                }
                const TiledResult r = run_frame(job.layout, input, job.filter_fourier);
                for (const Plane& w : r.outputs)
                    for (double v : w.v) fs[conv_idx] = std::max(fs[conv_idx], v * v);
            }
            x = run_conv_jobs(pm.conv_jobs[conv_idx], x, n.conv.spec, clean.sensor, 0, conv_idx);
            ++conv_idx;
        }
    }
    return fs;
}

// ---------------------------------------------------------------------------
// Dataset evaluation

struct LabeledImage {
    MultiChannelImage image;
    int label = -1;
};

struct Evaluation {
    int total = 0;
    int correct = 0;
    std::vector<int> predictions;
    std::vector<std::vector<double>> logits;
    // Mean squared error of each conv layer's output against the ideal
    // backend, averaged per image; filled when requested.
    std::vector<std::vector<double>> layer_mse;  // [image][conv layer]

    double accuracy() const { return total == 0 ? 0.0 : double(correct) / total; }
};

inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& t : pool) t.join();
}

inline Evaluation evaluate(const PreparedModel& pm, const std::vector<LabeledImage>& data,
                           int threads = 1, bool want_mse = false) {
    Evaluation ev;
    ev.total = int(data.size());
    ev.predictions.assign(data.size(), -1);
    ev.logits.assign(data.size(), {});
    if (want_mse) ev.layer_mse.assign(data.size(), {});

    PreparedModel ideal;
    if (want_mse && pm.backend != Backend::ideal)
        ideal = prepare(*pm.model, Backend::ideal, pm.cfg);

    parallel_for(ev.total, threads, [&](int i) {
        const ForwardResult r = forward(pm, data[i].image, std::uint64_t(i), want_mse);
        ev.predictions[i] = r.predicted;
        ev.logits[i] = r.logits;
        if (want_mse) {
            const ForwardResult ref = pm.backend == Backend::ideal
                                          ? r
                                          : forward(ideal, data[i].image, std::uint64_t(i), true);
            for (std::size_t l = 0; l < r.conv_taps.size(); ++l) {
                double acc = 0.0;
                std::size_t n = 0;
                for (int c = 0; c < r.conv_taps[l].channels(); ++c) {
                    const Plane& a = r.conv_taps[l].ch[c];
                    const Plane& b = ref.conv_taps[l].ch[c];
                    for (std::size_t k = 0; k < a.v.size(); ++k) {
                        const double d = a.v[k] - b.v[k];
                        acc += d * d;
                    }
                    n += a.v.size();
                }
                ev.layer_mse[i].push_back(acc / double(n));
            }
        }
    });
    for (int i = 0; i < ev.total; ++i)
        if (ev.predictions[i] == data[i].label) ++ev.correct;
    return ev;
}

}  // namespace f4
