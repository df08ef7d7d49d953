#pragma once

// Square-law detector model: intensity capture, additive Gaussian read noise
// at a configured SNR, ADC quantization against a full-scale range, and the
// square-root readout that recovers field magnitude.
//
// Noise draws are keyed by (seed, frame_id, absolute plane pixel), never by
// call order, so every pixel's noise is reproducible under any threading or
// evaluation order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "f4/core.hpp"
#include "f4/rng.hpp"

namespace f4 {

struct SensorConfig {
    int bits = 0;         // ADC bits; 0 means no quantization
    double snr_db = std::numeric_limits<double>::infinity();  // inf means noiseless
    std::uint64_t seed = 0;
    double full_scale = 0.0;  // ADC range; 0 means per-frame auto (max observed)

    bool noisy() const { return std::isfinite(snr_db); }
    bool quantized() const { return bits > 0; }
};

// Intensity of a real field: pointwise square.
inline Plane detect(const Plane& field) {
    Plane out(field.rows, field.cols);
    for (std::size_t i = 0; i < field.v.size(); ++i) out.v[i] = field.v[i] * field.v[i];
    return out;
}

// Signal power of the measured regions: mean of intensity^2.
inline double mean_sq(const std::vector<const Plane*>& regions) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const Plane* p : regions) {
        for (double x : p->v) acc += x * x;
        n += p->v.size();
    }
    return n == 0 ? 0.0 : acc / double(n);
}

inline double noise_sigma(double signal_power, double snr_db) {
    return std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
}

// Adds N(0, sigma^2) keyed by absolute plane pixel, then clamps at zero:
// a photodetector cannot report negative intensity.
inline void add_noise_keyed(Plane& intensity, double sigma, std::uint64_t seed,
                            std::uint64_t frame_id, int plane_side, int row0, int col0) {
    if (sigma <= 0.0) return;
    for (int i = 0; i < intensity.rows; ++i)
        for (int j = 0; j < intensity.cols; ++j) {
            const std::uint64_t pixel =
                std::uint64_t(row0 + i) * std::uint64_t(plane_side) + std::uint64_t(col0 + j);
            double& x = intensity.at(i, j);
            x += sigma * normal_from_counter(seed, frame_id, pixel, 0);
            if (x < 0.0) x = 0.0;
        }
}

// Uniform mid-tread ADC over [0, full_scale] with 2^bits levels; output is
// the dequantized intensity so downstream math stays in physical units.
inline void quantize(Plane& intensity, int bits, double full_scale) {
    require(bits >= 1 && bits <= 30, errc::validation, "quantize: bits out of range");
    if (full_scale <= 0.0) {
        for (double& x : intensity.v) x = 0.0;
        return;
    }
    const double levels = double((1 << bits) - 1);
    for (double& x : intensity.v) {
        double q = std::round(x / full_scale * levels);
        if (q < 0.0) q = 0.0;
        if (q > levels) q = levels;
        x = q * full_scale / levels;
    }
}

inline Plane readout_sqrt(const Plane& intensity) {
    Plane out(intensity.rows, intensity.cols);
    for (std::size_t i = 0; i < intensity.v.size(); ++i)
        out.v[i] = std::sqrt(std::max(0.0, intensity.v[i]));
    return out;
}

// Full sensor chain for one frame's output windows. origins give each
// window's top-left corner on the D x D plane (noise keying); the returned
// planes are recovered field magnitudes.
inline std::vector<Plane> sensor_readout(const std::vector<Plane>& window_fields,
                                         const std::vector<std::pair<int, int>>& origins,
                                         int plane_side, const SensorConfig& cfg,
                                         std::uint64_t frame_id) {
    require(window_fields.size() == origins.size(), errc::validation,
            "sensor_readout: one origin per window");
    std::vector<Plane> intens;
    intens.reserve(window_fields.size());
    for (const Plane& f : window_fields) intens.push_back(detect(f));

    if (cfg.noisy()) {
        std::vector<const Plane*> regions;
        for (const Plane& p : intens) regions.push_back(&p);
        const double sigma = noise_sigma(mean_sq(regions), cfg.snr_db);
        for (std::size_t w = 0; w < intens.size(); ++w)
            add_noise_keyed(intens[w], sigma, cfg.seed, frame_id, plane_side, origins[w].first,
                            origins[w].second);
    }
    if (cfg.quantized()) {
        double fs = cfg.full_scale;
        if (fs <= 0.0)
            for (const Plane& p : intens)
                for (double x : p.v) fs = std::max(fs, x);
        for (Plane& p : intens) quantize(p, cfg.bits, fs);
    }
    std::vector<Plane> out;
    out.reserve(intens.size());
    for (const Plane& p : intens) out.push_back(readout_sqrt(p));
    return out;
}

// Per-frame auto full scale: the largest intensity the frame would present
// to the ADC (after noise). Used by fixed-range calibration passes.
inline double frame_full_scale(const std::vector<Plane>& window_fields,
                               const std::vector<std::pair<int, int>>& origins, int plane_side,
                               const SensorConfig& cfg, std::uint64_t frame_id) {
    std::vector<Plane> intens;
    for (const Plane& f : window_fields) intens.push_back(detect(f));
    if (cfg.noisy()) {
        std::vector<const Plane*> regions;
        for (const Plane& p : intens) regions.push_back(&p);
        const double sigma = noise_sigma(mean_sq(regions), cfg.snr_db);
        for (std::size_t w = 0; w < intens.size(); ++w)
            add_noise_keyed(intens[w], sigma, cfg.seed, frame_id, plane_side, origins[w].first,
                            origins[w].second);
    }
    double fs = 0.0;
    for (const Plane& p : intens)
        for (double x : p.v) fs = std::max(fs, x);
    return fs;
}

// Nonnegative decomposition k = pos - neg for running signed kernels through
// an amplitude-only modulator in two passes.
inline std::pair<Plane, Plane> split_pseudo_negative(const Plane& k) {
    Plane pos(k.rows, k.cols), neg(k.rows, k.cols);
    for (std::size_t i = 0; i < k.v.size(); ++i) {
        pos.v[i] = std::max(0.0, k.v[i]);
        neg.v[i] = std::max(0.0, -k.v[i]);
    }
    return {pos, neg};
}

inline Plane combine_pseudo_negative(const Plane& pos_readout, const Plane& neg_readout) {
    require(pos_readout.same_shape(neg_readout), errc::validation,
            "pseudo-negative halves must share a shape");
    return pos_readout - neg_readout;
}

}  // namespace f4
