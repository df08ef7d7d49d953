#pragma once

// Model and dataset file formats.
//
// Model file: one UTF-8 JSON header line ending in '\n', then the raw weight
// payload as little-endian float32. The header names every layer, the payload
// element count, and an FNV-1a checksum of the payload bytes. Payload order
// follows the layer list: conv banks filter-major (k, then c, then row-major
// pixels), dense W row-major then bias.
//
// Dataset: a directory holding index.json (shape, class names, item list)
// plus one raw little-endian float32 file per image, channel-planar.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "f4/nn.hpp"

namespace f4 {

inline constexpr const char* kModelMagic = "F4NN";
inline constexpr int kModelVersion = 1;

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = digits[v & 0xf];
    return s;
}

namespace detail {

inline void append_f32(std::vector<unsigned char>& out, double v) {
    const float f = float(v);
    unsigned char b[4];
    std::memcpy(b, &f, 4);
    out.insert(out.end(), b, b + 4);
}

inline double read_f32(const unsigned char* p) {
    float f;
    std::memcpy(&f, p, 4);
    return double(f);
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(bool(in), errc::io, "cannot open " + path);
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>()};
    require(!in.bad(), errc::io, "read failed: " + path);
    return bytes;
}

inline void write_file(const std::string& path, const void* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(bool(out), errc::io, "cannot create " + path);
    out.write(static_cast<const char*>(data), std::streamsize(n));
    require(bool(out), errc::io, "write failed: " + path);
}

}  // namespace detail

inline std::vector<unsigned char> model_payload(const Model& m) {
    std::vector<unsigned char> payload;
    for (const LayerNode& n : m.layers) {
        if (n.kind == LayerKind::conv) {
            for (const auto& filt : n.conv.bank.f)
                for (const Plane& k : filt)
                    for (double v : k.v) detail::append_f32(payload, v);
        } else if (n.kind == LayerKind::dense) {
            for (double v : n.dense.W) detail::append_f32(payload, v);
            for (double v : n.dense.b) detail::append_f32(payload, v);
        }
    }
    return payload;
}

inline void save_model(const Model& m, const std::string& path) {
    m.validate();
    const std::vector<unsigned char> payload = model_payload(m);

    nlohmann::json j;
    j["magic"] = kModelMagic;
    j["version"] = kModelVersion;
    j["name"] = m.name;
    j["dtype"] = "f32";
    j["seed"] = m.seed;
    j["input"] = {{"side", m.input_side}, {"channels", m.input_channels}};
    j["classes"] = m.classes;
    j["layers"] = nlohmann::json::array();
    for (const LayerNode& n : m.layers) {
        switch (n.kind) {
            case LayerKind::conv:
                j["layers"].push_back(
                    {{"type", "conv"},
                     {"N", n.conv.spec.N},
                     {"Nc", n.conv.spec.Nc},
                     {"Nk", n.conv.spec.Nk},
                     {"mode", n.conv.spec.mode == ConvMode::same ? "same" : "valid"}});
                break;
            case LayerKind::pool2:
                j["layers"].push_back({{"type", "pool2"}});
                break;
            case LayerKind::dense:
                j["layers"].push_back(
                    {{"type", "dense"}, {"in", n.dense.in}, {"out", n.dense.out}});
                break;
        }
    }
    j["payload_f32"] = payload.size() / 4;
    j["checksum"] = hex64(fnv1a64(payload.data(), payload.size()));

    std::string header = j.dump();
    header.push_back('\n');
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), payload.begin(), payload.end());
    detail::write_file(path, bytes.data(), bytes.size());
}

namespace detail {
inline Model model_from_parts(const nlohmann::json& j, const std::vector<unsigned char>& bytes,
                              std::vector<unsigned char>::const_iterator nl);
}  // namespace detail

inline Model load_model(const std::string& path) {
    const std::vector<unsigned char> bytes = detail::read_file(path);
    const auto nl = std::find(bytes.begin(), bytes.end(), '\n');
    require(nl != bytes.end(), errc::format, "model file has no header line");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(std::string(bytes.begin(), nl));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("model header is not valid JSON: ") + e.what());
    }
    require(j.value("magic", "") == kModelMagic, errc::format, "not a model file");
    require(j.value("version", -1) == kModelVersion, errc::format,
            "unsupported model version");
    require(j.value("dtype", "") == "f32", errc::format, "unsupported model dtype");

    try {
        return detail::model_from_parts(j, bytes, nl);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("model header is malformed: ") + e.what());
    }
}

namespace detail {

inline Model model_from_parts(const nlohmann::json& j, const std::vector<unsigned char>& bytes,
                              std::vector<unsigned char>::const_iterator nl) {
    const unsigned char* payload = &*nl + 1;
    const std::size_t payload_bytes = std::size_t(bytes.end() - nl) - 1;
    const std::size_t expect = j.at("payload_f32").get<std::size_t>() * 4;
    require(payload_bytes == expect, errc::format, "model payload is truncated or oversized");
    require(hex64(fnv1a64(payload, payload_bytes)) == j.at("checksum").get<std::string>(),
            errc::format, "model payload checksum mismatch");

    Model m;
    m.name = j.value("name", "model");
    m.seed = j.value("seed", std::uint64_t(0));
    m.input_side = j.at("input").at("side").get<int>();
    m.input_channels = j.at("input").at("channels").get<int>();
    for (const auto& c : j.at("classes")) m.classes.push_back(c.get<std::string>());

    std::size_t off = 0;
    auto take = [&](double* dst, std::size_t n) {
        require(off + 4 * n <= payload_bytes, errc::format, "model payload is truncated");
        for (std::size_t i = 0; i < n; ++i, off += 4) dst[i] = detail::read_f32(payload + off);
    };
    int side = m.input_side, ch = m.input_channels;
    for (const auto& lj : j.at("layers")) {
        const std::string type = lj.at("type").get<std::string>();
        LayerNode node;
        if (type == "conv") {
            node.kind = LayerKind::conv;
            ConvSpec& s = node.conv.spec;
            s.M = side;
            s.N = lj.at("N").get<int>();
            s.Nc = lj.at("Nc").get<int>();
            s.Nk = lj.at("Nk").get<int>();
            s.mode = lj.value("mode", "same") == "valid" ? ConvMode::valid : ConvMode::same;
            require(s.Nc == ch, errc::format, "model layer channel chain is inconsistent");
            node.conv.bank = FilterBank(s.Nk, s.Nc, s.N);
            for (auto& filt : node.conv.bank.f)
                for (Plane& k : filt) take(k.v.data(), k.v.size());
            side = s.out_side();
            ch = s.Nk;
        } else if (type == "pool2") {
            node.kind = LayerKind::pool2;
            side /= 2;
        } else if (type == "dense") {
            node.kind = LayerKind::dense;
            node.dense.in = lj.at("in").get<int>();
            node.dense.out = lj.at("out").get<int>();
            node.dense.W.resize(std::size_t(node.dense.in) * node.dense.out);
            node.dense.b.resize(std::size_t(node.dense.out));
            take(node.dense.W.data(), node.dense.W.size());
            take(node.dense.b.data(), node.dense.b.size());
        } else {
            fail(errc::format, "unknown layer type: " + type);
        }
        m.layers.push_back(std::move(node));
    }
    require(off == payload_bytes, errc::format, "model payload has trailing bytes");
    m.validate();
    return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset

struct Dataset {
    std::string name;
    int side = 0;
    int channels = 0;
    std::vector<std::string> classes;
    std::vector<LabeledImage> items;
};

inline void save_dataset(const Dataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["name"] = ds.name;
    j["side"] = ds.side;
    j["channels"] = ds.channels;
    j["classes"] = ds.classes;
    j["items"] = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        char file[32];
        std::snprintf(file, sizeof file, "img_%05zu.bin", i);
        const LabeledImage& it = ds.items[i];
        require(it.image.side == ds.side && it.image.channels() == ds.channels,
                errc::validation, "dataset item shape mismatch");
        std::vector<unsigned char> raw;
        raw.reserve(std::size_t(ds.side) * ds.side * ds.channels * 4);
        for (const Plane& p : it.image.ch)
            for (double v : p.v) detail::append_f32(raw, v);
        detail::write_file(dir + "/" + file, raw.data(), raw.size());
        j["items"].push_back({{"file", file}, {"label", it.label}});
    }
    const std::string text = j.dump(2) + "\n";
    detail::write_file(dir + "/index.json", text.data(), text.size());
}

inline Dataset load_dataset(const std::string& dir) {
    const std::vector<unsigned char> idx = detail::read_file(dir + "/index.json");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(idx.begin(), idx.end());
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("dataset index is not valid JSON: ") + e.what());
    }
    Dataset ds;
    try {
        ds.name = j.value("name", "dataset");
        ds.side = j.at("side").get<int>();
        ds.channels = j.at("channels").get<int>();
        for (const auto& c : j.at("classes")) ds.classes.push_back(c.get<std::string>());
        const std::size_t pixels = std::size_t(ds.side) * ds.side;
        for (const auto& item : j.at("items")) {
            LabeledImage li;
            li.label = item.at("label").get<int>();
            require(li.label >= 0 && li.label < int(ds.classes.size()), errc::format,
                    "dataset label out of range");
            const std::vector<unsigned char> raw =
                detail::read_file(dir + "/" + item.at("file").get<std::string>());
            require(raw.size() == pixels * std::size_t(ds.channels) * 4, errc::format,
                    "dataset image has the wrong byte count");
            li.image = MultiChannelImage(ds.channels, ds.side);
            std::size_t off = 0;
            for (Plane& p : li.image.ch)
                for (double& v : p.v) {
                    v = detail::read_f32(raw.data() + off);
                    off += 4;
                }
            ds.items.push_back(std::move(li));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::format, std::string("dataset index is malformed: ") + e.what());
    }
    require(!ds.items.empty(), errc::format, "dataset is empty");
    return ds;
}

}  // namespace f4
