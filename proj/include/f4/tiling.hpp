#pragma once

// Spatial tiling of convolution workloads onto one correlator plane.
//
// All schemes share one geometric fact: for correlation
// out(n) = sum_t F(t) X(n+t), a kernel whose matching input content sits at
// plane position P produces its aligned result at window position W exactly
// when the kernel is anchored at (P - W - halo) mod D on the filter plane.
// Input planes are assembled at natural, unwrapped positions; filter planes
// may wrap circularly, which only adds a linear phase to the transform-plane
// pattern the filter arm holds.
//
// Cell grids use pitch S = M+N-1. Within a cell, image content is centered
// with an (N-1)/2 halo in same mode and sits at the cell origin in valid
// mode. Declared output windows: channel tiling uses the single centered
// window of the tiled block; filter/input tiling use per-cell windows at
// cell+(h,h) (same) or cell+(N-1,N-1) (valid); mixed tiling centers each
// block's window inside the block extent.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "f4/core.hpp"
#include "f4/optics.hpp"

namespace f4 {

enum class Scheme { none, input, filter, channel, mixed };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::none: return "none";
        case Scheme::input: return "input";
        case Scheme::filter: return "filter";
        case Scheme::channel: return "channel";
        case Scheme::mixed: return "mixed";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "none") return Scheme::none;
    if (s == "input") return Scheme::input;
    if (s == "filter") return Scheme::filter;
    if (s == "channel") return Scheme::channel;
    if (s == "mixed") return Scheme::mixed;
    fail(errc::validation, "unknown scheme: " + s);
}

struct CellPlacement {
    int block = 0;  // channel index (channel/mixed), filter slot, or input slot
    int row = 0;    // cell origin, plane coordinates
    int col = 0;
};

struct WindowRegion {
    int block = 0;
    int row = 0;
    int col = 0;
    int rows = 0;
    int cols = 0;
};

struct TilingLayout {
    Scheme scheme = Scheme::channel;
    ConvMode mode = ConvMode::same;
    int D = 0;
    int M = 0;
    int N = 0;
    int cell_side = 0;             // S = M+N-1
    int grid_rows = 0;             // cell grid laid out on the plane
    int grid_cols = 0;
    int tiled_rows = 0;            // bounding extent of the placed input content
    int tiled_cols = 0;
    int capacity = 0;              // T = floor(D/S)^2, cells one plane can hold
    int count = 0;                 // tiles in this frame
    int rows_per_block = 0;        // mixed: cell-rows per block (rho)
    int blocks_per_frame = 0;      // mixed: T_B
    std::vector<CellPlacement> cells;   // input-content cells, natural order
    std::vector<WindowRegion> windows;  // declared output windows

    int halo() const { return mode == ConvMode::same ? (N - 1) / 2 : 0; }
    int out_side() const { return mode == ConvMode::same ? M : M - N + 1; }
};

namespace detail {

inline int cells_per_side(int D, int S) { return D / S; }

inline void check_fits(int need, int have, const std::string& what) {
    require(need <= have, errc::infeasible, what);
}

// content[...] += added at (r0,c0) with circular wrap.
inline void place_wrapped(Plane& plane, const Plane& content, int r0, int c0) {
    const int d = plane.rows;
    r0 = ((r0 % d) + d) % d;
    c0 = ((c0 % d) + d) % d;
    for (int i = 0; i < content.rows; ++i) {
        const int r = (r0 + i) % d;
        for (int j = 0; j < content.cols; ++j) plane.at(r, (c0 + j) % d) += content.at(i, j);
    }
}

// Non-wrapping placement for input planes; bounds are layout invariants.
inline void place(Plane& plane, const Plane& content, int r0, int c0) {
    require(r0 >= 0 && c0 >= 0 && r0 + content.rows <= plane.rows &&
                c0 + content.cols <= plane.cols,
            errc::validation, "tile placement escapes the plane");
    for (int i = 0; i < content.rows; ++i)
        for (int j = 0; j < content.cols; ++j) plane.at(r0 + i, c0 + j) += content.at(i, j);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Layouts

// All channels of one filter in a ceil(sqrt(n))^2 cell grid; channel sums form
// optically and one centered window holds the result.
inline TilingLayout layout_channel(const ConvSpec& spec, const SystemConfig& sys,
                                   int channels = -1) {
    spec.validate();
    sys.validate();
    const int n = channels < 0 ? spec.Nc : channels;
    require(n >= 1, errc::validation, "channel layout needs at least one channel");
    const int S = spec.cell_side();
    const int G = int(std::ceil(std::sqrt(double(n))));
    const int Mt = G * S;
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(Mt, sys.D,
                       "channel layout: tiled block exceeds the plane; split channels across "
                       "passes of at most " + std::to_string(g * g) + " channels");
    TilingLayout lay;
    lay.scheme = Scheme::channel;
    lay.mode = spec.mode;
    lay.D = sys.D;
    lay.M = spec.M;
    lay.N = spec.N;
    lay.cell_side = S;
    lay.grid_rows = lay.grid_cols = G;
    lay.tiled_rows = lay.tiled_cols = Mt;
    lay.capacity = g * g;
    lay.count = n;
    const int out = lay.out_side();
    const int a0 = (Mt - out) / 2;
    for (int k = 0; k < n; ++k)
        lay.cells.push_back({k, (k / G) * S, (k % G) * S});
    lay.windows.push_back({0, a0, a0, out, out});
    return lay;
}

// Shared grid for filter tiling (many kernels, one broadcast input) and input
// tiling (many inputs, one broadcast kernel). One output window per cell.
inline TilingLayout layout_grid(Scheme scheme, const ConvSpec& spec, const SystemConfig& sys,
                                int count) {
    spec.validate();
    sys.validate();
    require(scheme == Scheme::filter || scheme == Scheme::input, errc::validation,
            "grid layout covers filter and input tiling only");
    require(count >= 1, errc::validation, "grid layout needs at least one tile");
    const int S = spec.cell_side();
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(1, g, "grid layout: one padded cell exceeds the plane");
    detail::check_fits(count, g * g, "grid layout: more tiles than the plane holds per frame");
    TilingLayout lay;
    lay.scheme = scheme;
    lay.mode = spec.mode;
    lay.D = sys.D;
    lay.M = spec.M;
    lay.N = spec.N;
    lay.cell_side = S;
    lay.grid_rows = lay.grid_cols = g;
    lay.tiled_rows = lay.tiled_cols = g * S;
    lay.capacity = g * g;
    lay.count = count;
    const int out = lay.out_side();
    const int w0 = spec.mode == ConvMode::same ? (spec.N - 1) / 2 : spec.N - 1;
    for (int t = 0; t < count; ++t) {
        const int r = (t / g) * S, c = (t % g) * S;
        lay.cells.push_back({t, r, c});
        lay.windows.push_back({t, r + w0, c + w0, out, out});
    }
    return lay;
}

// All channels of several filters per frame: each filter's channels tile a
// rho-row block B, and T_B blocks stack vertically.
inline TilingLayout layout_mixed(const ConvSpec& spec, const SystemConfig& sys,
                                 int filters_this_frame = -1) {
    spec.validate();
    sys.validate();
    const int S = spec.cell_side();
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(1, g, "mixed layout: one padded cell exceeds the plane");
    const int T = g * g;
    require(2 * spec.Nc < T, errc::infeasible,
            "mixed layout requires Nc < T/2; fall back to channel tiling");
    const int rho = (spec.Nc + g - 1) / g;
    const int T_B = g / rho;
    const int nf = filters_this_frame < 0 ? std::min(spec.Nk, T_B) : filters_this_frame;
    require(nf >= 1 && nf <= T_B, errc::validation, "mixed layout: bad per-frame filter count");
    TilingLayout lay;
    lay.scheme = Scheme::mixed;
    lay.mode = spec.mode;
    lay.D = sys.D;
    lay.M = spec.M;
    lay.N = spec.N;
    lay.cell_side = S;
    lay.grid_rows = rho;
    lay.grid_cols = g;
    lay.tiled_rows = rho * S;
    lay.tiled_cols = g * S;
    lay.capacity = T;
    lay.count = nf;
    lay.rows_per_block = rho;
    lay.blocks_per_frame = T_B;
    const int out = lay.out_side();
    const int wr = (rho * S - out) / 2;
    const int wc = (g * S - out) / 2;
    for (int k = 0; k < spec.Nc; ++k)
        lay.cells.push_back({k, (k / g) * S, (k % g) * S});
    for (int t = 0; t < nf; ++t)
        lay.windows.push_back({t, t * rho * S + wr, wc, out, out});
    return lay;
}

// ---------------------------------------------------------------------------
// Plane assembly

namespace detail {

inline int content_off(const TilingLayout& lay) {
    return lay.mode == ConvMode::same ? lay.halo() : 0;
}

inline void check_content(const TilingLayout& lay, const Plane& p, int side,
                          const std::string& what) {
    require(p.rows == side && p.cols == side, errc::validation, what);
    (void)lay;
}

}  // namespace detail

// Input plane for channel tiling (also the single-block input of mixed tiling).
inline Plane tiled_input_plane(const TilingLayout& lay, const MultiChannelImage& x) {
    require(lay.scheme == Scheme::channel || lay.scheme == Scheme::mixed, errc::validation,
            "multi-channel input plane applies to channel/mixed layouts");
    require(lay.scheme == Scheme::mixed || x.channels() == lay.count, errc::validation,
            "channel count does not match layout");
    require(lay.scheme == Scheme::channel || x.channels() == int(lay.cells.size()),
            errc::validation, "channel count does not match layout");
    Plane plane(lay.D, lay.D);
    const int off = detail::content_off(lay);
    for (const CellPlacement& cp : lay.cells) {
        detail::check_content(lay, x.ch[cp.block], lay.M, "image side does not match layout");
        detail::place(plane, x.ch[cp.block], cp.row + off, cp.col + off);
    }
    return plane;
}

// Input plane for filter tiling: one content block near the far grid corner.
inline Plane tiled_input_plane(const TilingLayout& lay, const Plane& x) {
    require(lay.scheme == Scheme::filter, errc::validation,
            "broadcast input plane applies to filter tiling");
    detail::check_content(lay, x, lay.M, "image side does not match layout");
    Plane plane(lay.D, lay.D);
    const int a = (lay.grid_rows - 1) * lay.cell_side + lay.N - 1;
    detail::place(plane, x, a, a);
    return plane;
}

// Input plane for input tiling: each image centered in its own cell.
inline Plane tiled_input_plane(const TilingLayout& lay, const std::vector<Plane>& inputs) {
    require(lay.scheme == Scheme::input, errc::validation,
            "per-cell input plane applies to input tiling");
    require(int(inputs.size()) == lay.count, errc::validation,
            "input count does not match layout");
    Plane plane(lay.D, lay.D);
    const int off = detail::content_off(lay);
    for (const CellPlacement& cp : lay.cells) {
        detail::check_content(lay, inputs[cp.block], lay.M, "image side does not match layout");
        detail::place(plane, inputs[cp.block], cp.row + off, cp.col + off);
    }
    return plane;
}

// Space-domain filter pattern: every kernel anchored at (P - W - halo) mod D,
// where P is its matching input content position and W its output window.
inline Plane tiled_filter_pattern(const TilingLayout& lay,
                                  const std::vector<const Plane*>& kernels) {
    Plane pat(lay.D, lay.D);
    const int off = detail::content_off(lay);
    const int h = lay.halo();
    switch (lay.scheme) {
        case Scheme::channel: {
            require(int(kernels.size()) == lay.count, errc::validation,
                    "kernel count does not match layout");
            const WindowRegion& w = lay.windows[0];
            for (const CellPlacement& cp : lay.cells) {
                const Plane& k = *kernels[cp.block];
                detail::check_content(lay, k, lay.N, "kernel side does not match layout");
                detail::place_wrapped(pat, k, cp.row + off - w.row - h, cp.col + off - w.col - h);
            }
            break;
        }
        case Scheme::filter: {
            require(int(kernels.size()) == lay.count, errc::validation,
                    "kernel count does not match layout");
            const int a = (lay.grid_rows - 1) * lay.cell_side + lay.N - 1;
            for (const WindowRegion& w : lay.windows) {
                const Plane& k = *kernels[w.block];
                detail::check_content(lay, k, lay.N, "kernel side does not match layout");
                detail::place_wrapped(pat, k, a - w.row - h, a - w.col - h);
            }
            break;
        }
        case Scheme::input: {
            require(kernels.size() == 1, errc::validation, "input tiling broadcasts one kernel");
            const Plane& k = *kernels[0];
            detail::check_content(lay, k, lay.N, "kernel side does not match layout");
            // P - W is cell-independent; anchor once.
            detail::place_wrapped(pat, k, off - lay.windows[0].row + lay.cells[0].row - h,
                                  off - lay.windows[0].col + lay.cells[0].col - h);
            break;
        }
        case Scheme::mixed: {
            require(int(kernels.size()) == lay.count * int(lay.cells.size()), errc::validation,
                    "mixed tiling needs count*Nc kernels, filter-major");
            for (const WindowRegion& w : lay.windows)
                for (const CellPlacement& cp : lay.cells) {
                    const Plane& k = *kernels[std::size_t(w.block) * lay.cells.size() + cp.block];
                    detail::check_content(lay, k, lay.N, "kernel side does not match layout");
                    detail::place_wrapped(pat, k, cp.row + off - w.row - h,
                                          cp.col + off - w.col - h);
                }
            break;
        }
        default:
            fail(errc::validation, "no tiled filter pattern for this scheme");
    }
    return pat;
}

// ---------------------------------------------------------------------------
// Running frames

struct TiledResult {
    TilingLayout layout;
    FieldPlane raw;               // full complex output plane
    std::vector<Plane> outputs;   // one real plane per declared window
    double imag_residue = 0.0;    // max |imag| / max |field| over the raw plane
};

inline Plane extract_window(const FieldPlane& raw, const WindowRegion& w) {
    Plane out(w.rows, w.cols);
    for (int i = 0; i < w.rows; ++i)
        for (int j = 0; j < w.cols; ++j) out.at(i, j) = raw.at(w.row + i, w.col + j).real();
    return out;
}

inline TiledResult run_frame(const TilingLayout& lay, const Plane& input_plane,
                             const FieldPlane& filter_fourier) {
    TiledResult res;
    res.layout = lay;
    res.raw = four_f_pass(input_plane, filter_fourier);
    double scale = 0.0;
    for (const cplx& z : res.raw.v) scale = std::max(scale, std::abs(z));
    res.imag_residue = scale > 0.0 ? max_imag(res.raw) / scale : 0.0;
    res.outputs.reserve(lay.windows.size());
    for (const WindowRegion& w : lay.windows) res.outputs.push_back(extract_window(res.raw, w));
    return res;
}

inline TiledResult run_frame(const TilingLayout& lay, const Plane& input_plane,
                             const Plane& filter_pattern) {
    return run_frame(lay, input_plane, make_filter_plane(filter_pattern));
}

// One frame: all channels of filter k against the tiled input. Requires the
// tiled block to fit; callers split larger channel counts across passes.
inline TiledResult channel_tiled_conv(const MultiChannelImage& x, const FilterBank& fb, int k,
                                      const ConvSpec& spec, const SystemConfig& sys) {
    check_pair(x, fb, spec);
    require(k >= 0 && k < spec.Nk, errc::validation, "filter index out of range");
    const TilingLayout lay = layout_channel(spec, sys);
    std::vector<const Plane*> ks;
    for (int c = 0; c < spec.Nc; ++c) ks.push_back(&fb.f[k][c]);
    return run_frame(lay, tiled_input_plane(lay, x), tiled_filter_pattern(lay, ks));
}

// Channel ranges for one filter when Nc exceeds the per-frame capacity T.
inline std::vector<std::pair<int, int>> channel_passes(const ConvSpec& spec,
                                                       const SystemConfig& sys) {
    const int g = detail::cells_per_side(sys.D, spec.cell_side());
    detail::check_fits(1, g, "one padded cell exceeds the plane");
    const int T = g * g;
    std::vector<std::pair<int, int>> ranges;
    for (int first = 0; first < spec.Nc; first += T)
        ranges.push_back({first, std::min(spec.Nc, first + T)});
    return ranges;
}

// Pre-detection multi-pass channel result: pass fields summed exactly.
inline Plane channel_tiled_conv_multi(const MultiChannelImage& x, const FilterBank& fb, int k,
                                      const ConvSpec& spec, const SystemConfig& sys) {
    check_pair(x, fb, spec);
    Plane acc;
    for (const auto& [first, last] : channel_passes(spec, sys)) {
        ConvSpec sub = spec;
        sub.Nc = last - first;
        MultiChannelImage xs(sub.Nc, spec.M);
        FilterBank fs(1, sub.Nc, spec.N);
        for (int c = first; c < last; ++c) {
            xs.ch[c - first] = x.ch[c];
            fs.f[0][c - first] = fb.f[k][c];
        }
        sub.Nk = 1;
        const TiledResult r = channel_tiled_conv(xs, fs, 0, sub, sys);
        if (acc.rows == 0)
            acc = r.outputs[0];
        else
            for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += r.outputs[0].v[i];
    }
    return acc;
}

// One input channel against up to T kernels per frame; returns the frames.
inline std::vector<TiledResult> filter_tiled_conv(const Plane& x, const std::vector<Plane>& ks,
                                                  const ConvSpec& spec, const SystemConfig& sys) {
    spec.validate();
    require(!ks.empty(), errc::validation, "filter tiling needs at least one kernel");
    const int g = detail::cells_per_side(sys.D, spec.cell_side());
    detail::check_fits(1, g, "one padded cell exceeds the plane");
    const int T = g * g;
    std::vector<TiledResult> frames;
    for (int first = 0; first < int(ks.size()); first += T) {
        const int n = std::min<int>(T, int(ks.size()) - first);
        const TilingLayout lay = layout_grid(Scheme::filter, spec, sys, n);
        std::vector<const Plane*> kp;
        for (int t = 0; t < n; ++t) kp.push_back(&ks[first + t]);
        frames.push_back(run_frame(lay, tiled_input_plane(lay, x), tiled_filter_pattern(lay, kp)));
    }
    return frames;
}

// Up to T input tiles against one broadcast kernel per frame.
inline std::vector<TiledResult> input_tiled_conv(const std::vector<Plane>& xs, const Plane& kern,
                                                 const ConvSpec& spec, const SystemConfig& sys) {
    spec.validate();
    require(!xs.empty(), errc::validation, "input tiling needs at least one input");
    const int g = detail::cells_per_side(sys.D, spec.cell_side());
    detail::check_fits(1, g, "one padded cell exceeds the plane");
    const int T = g * g;
    std::vector<TiledResult> frames;
    for (int first = 0; first < int(xs.size()); first += T) {
        const int n = std::min<int>(T, int(xs.size()) - first);
        const TilingLayout lay = layout_grid(Scheme::input, spec, sys, n);
        std::vector<Plane> batch(xs.begin() + first, xs.begin() + first + n);
        frames.push_back(
            run_frame(lay, tiled_input_plane(lay, batch), tiled_filter_pattern(lay, {&kern})));
    }
    return frames;
}

// All filters of the bank, T_B per frame, all channels per filter.
inline std::vector<TiledResult> mixed_tiled_conv(const MultiChannelImage& x, const FilterBank& fb,
                                                 const ConvSpec& spec, const SystemConfig& sys) {
    check_pair(x, fb, spec);
    const TilingLayout probe = layout_mixed(spec, sys, 1);
    const int T_B = probe.blocks_per_frame;
    std::vector<TiledResult> frames;
    for (int first = 0; first < spec.Nk; first += T_B) {
        const int n = std::min(T_B, spec.Nk - first);
        const TilingLayout lay = layout_mixed(spec, sys, n);
        const Plane in = tiled_input_plane(lay, x);
        std::vector<const Plane*> ks;
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < spec.Nc; ++c) ks.push_back(&fb.f[first + t][c]);
        frames.push_back(run_frame(lay, in, tiled_filter_pattern(lay, ks)));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Utilization and planning

// U = M^2 * count / (D^2 * ceil(count / T)) for the single-kind schemes.
inline double utilization_single(int M, int count, const ConvSpec& spec, const SystemConfig& sys) {
    sys.validate();
    const int S = spec.cell_side();
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(1, g, "one padded cell exceeds the plane");
    const double T = double(g) * g;
    const double frames = std::ceil(double(count) / T);
    return double(M) * M * count / (double(sys.D) * sys.D * frames);
}

// U = M^2 * N1 * N2 / (D^2 * ceil(N2 / T_B)) with N1 channels, N2 filters.
inline double utilization_mixed(const ConvSpec& spec, const SystemConfig& sys) {
    sys.validate();
    const int S = spec.cell_side();
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(1, g, "one padded cell exceeds the plane");
    require(2 * spec.Nc < g * g, errc::infeasible, "mixed tiling requires Nc < T/2");
    const int rho = (spec.Nc + g - 1) / g;
    const int T_B = g / rho;
    const double frames = std::ceil(double(spec.Nk) / T_B);
    return double(spec.M) * spec.M * spec.Nc * spec.Nk / (double(sys.D) * sys.D * frames);
}

struct TilingPlan {
    Scheme scheme = Scheme::channel;
    int S = 0;
    int g = 0;           // cells per side
    int T = 0;           // g^2
    int rho = 0;         // mixed only
    int T_B = 0;         // mixed only
    long long frames = 0;  // frames for the whole layer (all filters)
    double utilization = 0.0;
};

// Mixed when its feasibility condition holds, channel otherwise. Mixed never
// loses this contest: it needs ceil(Nk/T_B) frames versus channel's
// Nk*ceil(Nc/T), and utilization breaks any remaining tie in its favor.
inline TilingPlan plan_tiling(const ConvSpec& spec, const SystemConfig& sys) {
    spec.validate();
    sys.validate();
    const int S = spec.cell_side();
    const int g = detail::cells_per_side(sys.D, S);
    detail::check_fits(1, g, "layer does not fit: one padded cell exceeds the plane");
    TilingPlan plan;
    plan.S = S;
    plan.g = g;
    plan.T = g * g;
    if (2 * spec.Nc < plan.T) {
        plan.scheme = Scheme::mixed;
        plan.rho = (spec.Nc + g - 1) / g;
        plan.T_B = g / plan.rho;
        plan.frames = (spec.Nk + plan.T_B - 1) / plan.T_B;
        plan.utilization = utilization_mixed(spec, sys);
    } else {
        plan.scheme = Scheme::channel;
        plan.frames = (long long)spec.Nk * ((spec.Nc + plan.T - 1) / plan.T);
        plan.utilization = utilization_single(spec.M, spec.Nc, spec, sys);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const TilingLayout& lay) {
    nlohmann::json j;
    j["scheme"] = to_string(lay.scheme);
    j["mode"] = lay.mode == ConvMode::same ? "same" : "valid";
    j["plane_side"] = lay.D;
    j["image_side"] = lay.M;
    j["kernel_side"] = lay.N;
    j["cell_side"] = lay.cell_side;
    j["grid"] = {{"rows", lay.grid_rows}, {"cols", lay.grid_cols}};
    j["tiled_extent"] = {{"rows", lay.tiled_rows}, {"cols", lay.tiled_cols}};
    j["capacity"] = lay.capacity;
    j["count"] = lay.count;
    if (lay.scheme == Scheme::mixed) {
        j["rows_per_block"] = lay.rows_per_block;
        j["blocks_per_frame"] = lay.blocks_per_frame;
    }
    j["cells"] = nlohmann::json::array();
    for (const CellPlacement& c : lay.cells)
        j["cells"].push_back({{"block", c.block}, {"row", c.row}, {"col", c.col}});
    j["windows"] = nlohmann::json::array();
    for (const WindowRegion& w : lay.windows)
        j["windows"].push_back({{"block", w.block},
                                {"row", w.row},
                                {"col", w.col},
                                {"rows", w.rows},
                                {"cols", w.cols}});
    return j;
}

inline TilingLayout layout_from_json(const nlohmann::json& j) {
    TilingLayout lay;
    lay.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    lay.mode = j.at("mode").get<std::string>() == "same" ? ConvMode::same : ConvMode::valid;
    lay.D = j.at("plane_side").get<int>();
    lay.M = j.at("image_side").get<int>();
    lay.N = j.at("kernel_side").get<int>();
    lay.cell_side = j.at("cell_side").get<int>();
    lay.grid_rows = j.at("grid").at("rows").get<int>();
    lay.grid_cols = j.at("grid").at("cols").get<int>();
    lay.tiled_rows = j.at("tiled_extent").at("rows").get<int>();
    lay.tiled_cols = j.at("tiled_extent").at("cols").get<int>();
    lay.capacity = j.at("capacity").get<int>();
    lay.count = j.at("count").get<int>();
    lay.rows_per_block = j.value("rows_per_block", 0);
    lay.blocks_per_frame = j.value("blocks_per_frame", 0);
    for (const auto& c : j.at("cells"))
        lay.cells.push_back(
            {c.at("block").get<int>(), c.at("row").get<int>(), c.at("col").get<int>()});
    for (const auto& w : j.at("windows"))
        lay.windows.push_back({w.at("block").get<int>(), w.at("row").get<int>(),
                               w.at("col").get<int>(), w.at("rows").get<int>(),
                               w.at("cols").get<int>()});
    return lay;
}

}  // namespace f4
