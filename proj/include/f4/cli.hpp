#pragma once

// Command-line front end. Subcommands:
//   plan         per-layer tiling choice, geometry, frames, utilization
//   perf         per-layer and total frame counts and times
//   simulate     run a model file over a dataset directory on one backend
//   sweep        simulate over a grid of SNR and ADC settings
//   gen-model    write the built-in reference model
//   gen-dataset  write a generated dataset directory
//
// Reports are deterministic: a manifest line hashes (tool version, command,
// canonical config, seed); wall-clock timing and thread counts never enter
// the report body. Exit codes: 0 ok, 2 validation, 3 infeasible, 4 io/format.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "f4/core.hpp"
#include "f4/generate.hpp"
#include "f4/model_io.hpp"
#include "f4/nn.hpp"
#include "f4/perf.hpp"
#include "f4/tiling.hpp"

namespace f4::cli {

inline constexpr const char* kToolName = "f4sim";
inline constexpr const char* kToolVersion = "1.0.0";

inline int exit_code(errc c) {
    switch (c) {
        case errc::validation: return 2;
        case errc::infeasible: return 3;
        case errc::io: return 4;
        case errc::format: return 4;
    }
    return 2;
}

// Canonical key=value config echo; also the manifest hash input.
struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void cfg(const std::string& k, const std::string& v) { config.push_back({k, v}); }

    std::string manifest() const {
        std::string s = std::string(kToolName) + "|" + kToolVersion + "|" + command;
        for (const auto& [k, v] : config) s += "|" + k + "=" + v;
        return hex64(fnv1a64(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
    }
};

inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string fmt_int(long long v) { return std::to_string(v); }

inline std::string render_csv(const Report& r) {
    std::string out;
    out += "# manifest=" + r.manifest() + " tool=" + kToolName + " version=" + kToolVersion +
           "\n";
    std::string cfg = "# command=" + r.command;
    for (const auto& [k, v] : r.config) cfg += " " + k + "=" + v;
    out += cfg + "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        out += (i ? "," : "") + r.columns[i];
    out += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

inline std::string render_json(const Report& r) {
    nlohmann::json j;
    j["manifest"] = r.manifest();
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = r.command;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json o = nlohmann::json::object();
        for (std::size_t i = 0; i < r.columns.size(); ++i) o[r.columns[i]] = row[i];
        j["rows"].push_back(o);
    }
    return j.dump(2) + "\n";
}

inline void emit(const Report& r, const std::string& format, const std::string& out_path) {
    const std::string text = format == "json" ? render_json(r) : render_csv(r);
    if (out_path.empty() || out_path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    require(bool(out), errc::io, "cannot create " + out_path);
    out.write(text.data(), std::streamsize(text.size()));
    require(bool(out), errc::io, "write failed: " + out_path);
}

// ---------------------------------------------------------------------------
// Shared option plumbing

struct CommonOpts {
    int slm_d = 4096;
    double freq_hz = 2e6;
    std::string format = "csv";
    std::string out;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string scheme = "auto";
    std::string bits = "inf";
    std::string snr_db = "inf";

    SystemConfig sys() const { return SystemConfig{slm_d, freq_hz}; }

    int parse_bits() const {
        if (bits == "inf") return 0;
        if (bits == "8") return 8;
        if (bits == "12") return 12;
        try {
            const int b = std::stoi(bits);
            require(b >= 1 && b <= 30, errc::validation, "bits out of range");
            return b;
        } catch (const error&) {
            throw;
        } catch (...) {
            fail(errc::validation, "bits must be an integer or inf");
        }
    }

    double parse_snr() const {
        if (snr_db == "inf") return std::numeric_limits<double>::infinity();
        try {
            return std::stod(snr_db);
        } catch (...) {
            fail(errc::validation, "snr-db must be a number or inf");
        }
    }
};

inline NetworkSpec load_network(const std::string& arg) {
    for (const char* p : {"alexnet", "vgg16-cifar", "vgg16-imagenet", "srcnn", "deconvnet"})
        if (arg == p) return preset_network(arg);
    const std::vector<unsigned char> bytes = detail::read_file(arg);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("network file is not valid JSON: ") + e.what());
    }
    return network_from_json(j);
}

inline std::vector<Scheme> schemes_for(const std::string& s) {
    if (s == "all")
        return {Scheme::none, Scheme::input, Scheme::filter, Scheme::channel, Scheme::mixed};
    if (s == "auto") return {};
    return {scheme_from_string(s)};
}

// ---------------------------------------------------------------------------
// plan

inline double plan_utilization(const ConvSpec& l, const SystemConfig& sys, Scheme s, int T,
                               int T_B) {
    switch (s) {
        case Scheme::none:
            return double(l.M) * l.M / (double(sys.D) * sys.D);
        case Scheme::input:
            return utilization_single(l.M, T, l, sys);  // steady state: a full frame of images
        case Scheme::filter:
            return utilization_single(l.M, l.Nk, l, sys);
        case Scheme::channel:
            return utilization_single(l.M, l.Nc, l, sys);
        case Scheme::mixed:
            (void)T_B;
            return utilization_mixed(l, sys);
    }
    return 0.0;
}

inline int cmd_plan(const CommonOpts& co, const std::string& network) {
    require(co.scheme != "all", errc::validation, "scheme=all is only valid for perf");
    const NetworkSpec net = load_network(network);
    const SystemConfig sys = co.sys();
    Report rep;
    rep.command = "plan";
    rep.cfg("network", net.name);
    rep.cfg("slm_d", fmt_int(co.slm_d));
    rep.cfg("freq_hz", fmt_double(co.freq_hz));
    rep.cfg("scheme", co.scheme);
    rep.columns = {"layer", "M",   "N",      "Nc",  "Nk",    "mode",       "scheme",
                   "S",     "g",   "T",      "rho", "T_B",   "frames",     "utilization"};
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const ConvSpec& l = net.layers[i];
        const int S = l.cell_side();
        const int g = sys.D / S;
        require(g >= 1, errc::infeasible,
                "layer " + std::to_string(i) + ": one padded cell exceeds the plane");
        const int T = g * g;
        Scheme s;
        long long frames;
        int rho = 0, T_B = 0;
        if (co.scheme == "auto") {
            const TilingPlan p = plan_tiling(l, sys);
            s = p.scheme;
            frames = p.frames;
            rho = p.rho;
            T_B = p.T_B;
        } else {
            s = scheme_from_string(co.scheme);
            if (s == Scheme::mixed) {
                const TilingPlan p = plan_tiling(l, sys);
                require(p.scheme == Scheme::mixed, errc::infeasible,
                        "layer " + std::to_string(i) + ": mixed tiling infeasible");
                rho = p.rho;
                T_B = p.T_B;
            }
            frames = (long long)std::llround(std::ceil(frames_for_layer(l, sys, s)));
        }
        rep.rows.push_back({fmt_int((long long)i), fmt_int(l.M), fmt_int(l.N), fmt_int(l.Nc),
                            fmt_int(l.Nk), l.mode == ConvMode::same ? "same" : "valid",
                            to_string(s), fmt_int(S), fmt_int(g), fmt_int(T), fmt_int(rho),
                            fmt_int(T_B), fmt_int(frames),
                            fmt_double(plan_utilization(l, sys, s, T, T_B))});
    }
    emit(rep, co.format, co.out);
    return 0;
}

// ---------------------------------------------------------------------------
// perf

inline int cmd_perf(const CommonOpts& co, const std::string& network) {
    const NetworkSpec net = load_network(network);
    const SystemConfig sys = co.sys();
    Report rep;
    rep.command = "perf";
    rep.cfg("network", net.name);
    rep.cfg("slm_d", fmt_int(co.slm_d));
    rep.cfg("freq_hz", fmt_double(co.freq_hz));
    rep.cfg("scheme", co.scheme);
    rep.columns = {"scheme", "layer", "M", "N", "Nc", "Nk", "T", "feasible", "frames", "time_s"};

    std::vector<Scheme> list = schemes_for(co.scheme);
    const bool auto_plan = co.scheme == "auto";
    if (auto_plan) list = {Scheme::none};  // placeholder; resolved per layer

    for (Scheme requested : list) {
        double total_frames = 0.0;
        bool total_ok = true;
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            const ConvSpec& l = net.layers[i];
            Scheme s = requested;
            if (l.N == 1) {
                rep.rows.push_back({auto_plan ? "auto" : to_string(requested),
                                    fmt_int((long long)i), fmt_int(l.M), fmt_int(l.N),
                                    fmt_int(l.Nc), fmt_int(l.Nk), "", "1", "0", "0"});
                continue;
            }
            try {
                if (auto_plan) s = plan_tiling(l, sys).scheme;
                const double frames = frames_for_layer(l, sys, s);
                const int T = cells_per_frame(l, sys);
                total_frames += frames;
                rep.rows.push_back({auto_plan ? std::string("auto:") + to_string(s)
                                              : to_string(s),
                                    fmt_int((long long)i), fmt_int(l.M), fmt_int(l.N),
                                    fmt_int(l.Nc), fmt_int(l.Nk), fmt_int(T), "1",
                                    fmt_double(frames), fmt_double(frames / sys.freq_hz)});
            } catch (const error& e) {
                if (e.code() != errc::infeasible || co.scheme != "all") throw;
                total_ok = false;
                rep.rows.push_back({to_string(s), fmt_int((long long)i), fmt_int(l.M),
                                    fmt_int(l.N), fmt_int(l.Nc), fmt_int(l.Nk), "", "0", "",
                                    ""});
            }
        }
        rep.rows.push_back({auto_plan ? "auto" : to_string(requested), "all", "", "", "", "", "",
                            total_ok ? "1" : "0", total_ok ? fmt_double(total_frames) : "",
                            total_ok ? fmt_double(total_frames / sys.freq_hz) : ""});
    }
    emit(rep, co.format, co.out);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / sweep

struct SimArgs {
    std::string model_path;
    std::string dataset_dir;
    std::string backend = "channel4f";
    bool want_mse = false;
    bool per_image = false;
    bool calibrate = false;
};

// For simulation, "auto" and "none" both mean: let the planner pick per layer.
inline RunConfig make_run_config(const CommonOpts& co, double snr, int bits) {
    RunConfig cfg;
    cfg.sys = co.sys();
    cfg.scheme = (co.scheme == "auto" || co.scheme == "none") ? Scheme::none
                                                              : scheme_from_string(co.scheme);
    cfg.sensor.snr_db = snr;
    cfg.sensor.bits = bits;
    cfg.sensor.seed = co.seed;
    return cfg;
}

inline void add_eval_rows(Report& rep, const std::string& tag, const Evaluation& ev,
                          const Dataset& ds, const SimArgs& sim) {
    rep.rows.push_back({tag, "accuracy", fmt_double(ev.accuracy())});
    rep.rows.push_back({tag, "correct", fmt_int(ev.correct)});
    rep.rows.push_back({tag, "total", fmt_int(ev.total)});
    for (std::size_t c = 0; c < ds.classes.size(); ++c) {
        int n = 0, ok = 0;
        for (std::size_t i = 0; i < ds.items.size(); ++i)
            if (ds.items[i].label == int(c)) {
                ++n;
                if (ev.predictions[i] == int(c)) ++ok;
            }
        rep.rows.push_back({tag, "accuracy_" + ds.classes[c],
                            fmt_double(n == 0 ? 0.0 : double(ok) / n)});
    }
    if (sim.want_mse && !ev.layer_mse.empty() && !ev.layer_mse[0].empty()) {
        const std::size_t nl = ev.layer_mse[0].size();
        for (std::size_t l = 0; l < nl; ++l) {
            double acc = 0.0;
            for (const auto& per : ev.layer_mse) acc += per[l];
            rep.rows.push_back({tag, "mean_mse_conv" + std::to_string(l),
                                fmt_double(acc / double(ev.layer_mse.size()))});
        }
    }
    if (sim.per_image)
        for (std::size_t i = 0; i < ds.items.size(); ++i) {
            std::string logits;
            for (std::size_t k = 0; k < ev.logits[i].size(); ++k)
                logits += (k ? ";" : "") + fmt_double(ev.logits[i][k]);
            rep.rows.push_back({tag, "image_" + std::to_string(i),
                                fmt_int(ds.items[i].label) + ":" +
                                    fmt_int(ev.predictions[i]) + ":" + logits});
        }
}

inline int cmd_simulate(const CommonOpts& co, const SimArgs& sim) {
    const Model model = load_model(sim.model_path);
    const Dataset ds = load_dataset(sim.dataset_dir);
    const Backend backend = backend_from_string(sim.backend);
    RunConfig cfg = make_run_config(co, co.parse_snr(), co.parse_bits());
    if (sim.calibrate && backend != Backend::ideal) {
        std::vector<MultiChannelImage> samples;
        for (std::size_t i = 0; i < ds.items.size() && i < 16; ++i)
            samples.push_back(ds.items[i].image);
        cfg.layer_full_scale = calibrate_full_scale(model, backend, cfg, samples);
    }
    const PreparedModel pm = prepare(model, backend, cfg);
    const Evaluation ev = evaluate(pm, ds.items, co.threads, sim.want_mse);

    Report rep;
    rep.command = "simulate";
    rep.cfg("model", model.name);
    rep.cfg("dataset", ds.name);
    rep.cfg("backend", sim.backend);
    rep.cfg("scheme", co.scheme);
    rep.cfg("slm_d", fmt_int(co.slm_d));
    rep.cfg("freq_hz", fmt_double(co.freq_hz));
    rep.cfg("bits", co.bits);
    rep.cfg("snr_db", co.snr_db);
    rep.cfg("seed", fmt_int((long long)co.seed));
    rep.cfg("calibrate", sim.calibrate ? "1" : "0");
    rep.columns = {"section", "metric", "value"};
    add_eval_rows(rep, "result", ev, ds, sim);
    emit(rep, co.format, co.out);
    return 0;
}

inline int cmd_sweep(const CommonOpts& co, const SimArgs& sim, const std::string& snr_list,
                     const std::string& bits_list) {
    const Model model = load_model(sim.model_path);
    const Dataset ds = load_dataset(sim.dataset_dir);
    const Backend backend = backend_from_string(sim.backend);

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
        require(!out.empty(), errc::validation, "empty sweep list");
        return out;
    };

    Report rep;
    rep.command = "sweep";
    rep.cfg("model", model.name);
    rep.cfg("dataset", ds.name);
    rep.cfg("backend", sim.backend);
    rep.cfg("scheme", co.scheme);
    rep.cfg("slm_d", fmt_int(co.slm_d));
    rep.cfg("snr_db", snr_list);
    rep.cfg("bits", bits_list);
    rep.cfg("seed", fmt_int((long long)co.seed));
    rep.columns = {"snr_db", "bits", "accuracy", "correct", "total"};
    for (const std::string& snr_s : split(snr_list))
        for (const std::string& bits_s : split(bits_list)) {
            CommonOpts cell = co;
            cell.snr_db = snr_s;
            cell.bits = bits_s;
            const RunConfig cfg = make_run_config(cell, cell.parse_snr(), cell.parse_bits());
            const PreparedModel pm = prepare(model, backend, cfg);
            const Evaluation ev = evaluate(pm, ds.items, co.threads, false);
            rep.rows.push_back({snr_s, bits_s, fmt_double(ev.accuracy()), fmt_int(ev.correct),
                                fmt_int(ev.total)});
        }
    emit(rep, co.format, co.out);
    return 0;
}

// ---------------------------------------------------------------------------
// generators

inline int cmd_gen_model(const CommonOpts& co, const std::string& out_path) {
    require(!out_path.empty(), errc::validation, "gen-model requires --out");
    const Model model = make_desk_model(co.seed);
    save_model(model, out_path);
    std::fprintf(stderr, "wrote model '%s' (seed %llu) to %s\n", model.name.c_str(),
                 (unsigned long long)co.seed, out_path.c_str());
    return 0;
}

inline int cmd_gen_dataset(const CommonOpts& co, const std::string& out_dir, int per_class) {
    require(!out_dir.empty(), errc::validation, "gen-dataset requires --out");
    const Dataset ds = make_desk_dataset(co.seed, per_class);
    save_dataset(ds, out_dir);
    std::fprintf(stderr, "wrote dataset '%s' (%zu images, seed %llu) to %s\n", ds.name.c_str(),
                 ds.items.size(), (unsigned long long)co.seed, out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

inline int run(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"Free-space correlator accelerator planner and simulator"};
    app.require_subcommand(1);

    CommonOpts co;
    std::string network;
    SimArgs sim;
    std::string snr_list = "inf";
    std::string bits_list = "inf";
    int per_class = 60;

    auto add_common = [&](CLI::App* sub, bool sim_defaults) {
        // Simulation defaults to a small plane; planning defaults to a large one.
        if (sim_defaults)
            sub->preparse_callback([&co](std::size_t) { co.slm_d = 48; });
        sub->add_option("--slm-d", co.slm_d, "plane side in pixels")->envname("F4SIM_SLM_D");
        sub->add_option("--freq-hz", co.freq_hz, "modulator frame rate")
            ->envname("F4SIM_FREQ_HZ");
        sub->add_option("--format", co.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->envname("F4SIM_FORMAT");
        sub->add_option("--out", co.out, "output file (default stdout)");
        sub->add_option("--threads", co.threads, "worker threads")
            ->check(CLI::Range(1, 256))
            ->envname("F4SIM_THREADS");
        sub->add_option("--seed", co.seed, "master seed")->envname("F4SIM_SEED");
        sub->add_option("--scheme", co.scheme, "tiling scheme")
            ->check(CLI::IsMember({"none", "input", "filter", "channel", "mixed", "auto", "all"}))
            ->envname("F4SIM_SCHEME");
        sub->add_option("--bits", co.bits, "ADC bits: 8, 12, or inf")->envname("F4SIM_BITS");
        sub->add_option("--snr-db", co.snr_db, "detector SNR in dB, or inf")
            ->envname("F4SIM_SNR_DB");
    };

    CLI::App* plan = app.add_subcommand("plan", "tiling plan per layer");
    plan->add_option("--network", network, "preset name or network JSON file")->required();
    add_common(plan, false);

    CLI::App* perf = app.add_subcommand("perf", "frame counts and times");
    perf->add_option("--network", network, "preset name or network JSON file")->required();
    add_common(perf, false);

    CLI::App* simulate = app.add_subcommand("simulate", "run a model over a dataset");
    simulate->add_option("--model", sim.model_path, "model file")->required();
    simulate->add_option("--dataset", sim.dataset_dir, "dataset directory")->required();
    simulate->add_option("--backend", sim.backend, "ideal, channel4f, or pseudoneg4f")
        ->check(CLI::IsMember({"ideal", "channel4f", "pseudoneg4f"}));
    simulate->add_flag("--mse", sim.want_mse, "report per-conv-layer MSE against ideal");
    simulate->add_flag("--per-image", sim.per_image, "emit one row per image");
    simulate->add_flag("--calibrate", sim.calibrate,
                       "fixed per-layer full scale from a calibration pass");
    add_common(simulate, true);

    CLI::App* sweep = app.add_subcommand("sweep", "grid of SNR x bits evaluations");
    sweep->add_option("--model", sim.model_path, "model file")->required();
    sweep->add_option("--dataset", sim.dataset_dir, "dataset directory")->required();
    sweep->add_option("--backend", sim.backend, "ideal, channel4f, or pseudoneg4f")
        ->check(CLI::IsMember({"ideal", "channel4f", "pseudoneg4f"}));
    sweep->add_option("--snr-db-list", snr_list, "comma-separated SNR values (dB or inf)");
    sweep->add_option("--bits-list", bits_list, "comma-separated bit depths (or inf)");
    add_common(sweep, true);

    CLI::App* gen_model = app.add_subcommand("gen-model", "write the reference model");
    gen_model->preparse_callback([&co](std::size_t) { co.seed = 20260815; });
    gen_model->add_option("--out", co.out, "output model file")->required();
    gen_model->add_option("--seed", co.seed, "generator seed")->envname("F4SIM_SEED");

    CLI::App* gen_dataset = app.add_subcommand("gen-dataset", "write a generated dataset");
    gen_dataset->preparse_callback([&co](std::size_t) { co.seed = 20260815; });
    gen_dataset->add_option("--out", co.out, "output directory")->required();
    gen_dataset->add_option("--seed", co.seed, "generator seed")->envname("F4SIM_SEED");
    gen_dataset->add_option("--per-class", per_class, "images per class")
        ->check(CLI::Range(1, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    int rc = 0;
    try {
        if (plan->parsed())
            rc = cmd_plan(co, network);
        else if (perf->parsed())
            rc = cmd_perf(co, network);
        else if (simulate->parsed())
            rc = cmd_simulate(co, sim);
        else if (sweep->parsed())
            rc = cmd_sweep(co, sim, snr_list, bits_list);
        else if (gen_model->parsed())
            rc = cmd_gen_model(co, co.out);
        else if (gen_dataset->parsed())
            rc = cmd_gen_dataset(co, co.out, per_class);
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "[%s %s] wall %.3f s, threads %d\n", kToolName,
                 app.get_subcommands().front()->get_name().c_str(), secs, co.threads);
    return rc;
}

}  // namespace f4::cli
