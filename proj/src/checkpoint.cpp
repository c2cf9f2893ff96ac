#include "nehd/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace nehd {

namespace {

constexpr char kMagic[8] = {'N', 'E', 'H', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error("checkpoint: truncated reading " + what);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) write_u32(out, static_cast<std::uint32_t>(d));
    std::vector<float> buf(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) buf[i] = static_cast<float>(t[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

nlohmann::json meta_to_json(const CheckpointMeta& meta) {
    nlohmann::json j;
    j["tool_version"] = meta.tool_version;
    j["container_version"] = kVersion;
    j["seed"] = meta.seed;
    j["class_names"] = meta.class_names;
    j["manifest_hash"] = meta.manifest_hash;
    j["model"] = {{"variant", variant_name(meta.model.kind)},
                  {"freq_bins", meta.model.freq_bins},
                  {"frames", meta.model.frames},
                  {"classes", meta.model.classes},
                  {"edge_filters", meta.model.edge_filters},
                  {"bins", meta.model.bins},
                  {"pool_rows", meta.model.pool_rows},
                  {"pool_cols", meta.model.pool_cols},
                  {"edge_init", edge_init_name(meta.model.edge_init)},
                  {"hist_init", histogram_init_name(meta.model.hist_init)},
                  {"hist_lo", meta.model.hist_lo},
                  {"hist_hi", meta.model.hist_hi}};
    j["stft"] = {{"window_length", meta.stft.window_length},
                 {"hop_length", meta.stft.hop_length},
                 {"freq_bins", meta.stft.freq_bins},
                 {"center_pad", meta.stft.center_pad},
                 {"magnitude_scale", magnitude_scale_name(meta.stft.magnitude_scale)}};
    j["ingest"] = {{"target_rate", meta.ingest.target_rate},
                   {"segment_seconds", meta.ingest.segment_seconds}};
    return j;
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
    CheckpointMeta meta;
    meta.tool_version = j.at("tool_version").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.class_names = j.at("class_names").get<std::vector<std::string>>();
    meta.manifest_hash = j.at("manifest_hash").get<std::string>();
    const auto& m = j.at("model");
    meta.model.kind = variant_from_name(m.at("variant").get<std::string>());
    meta.model.freq_bins = m.at("freq_bins").get<std::size_t>();
    meta.model.frames = m.at("frames").get<std::size_t>();
    meta.model.classes = m.at("classes").get<std::size_t>();
    meta.model.edge_filters = m.at("edge_filters").get<std::size_t>();
    meta.model.bins = m.at("bins").get<std::size_t>();
    meta.model.pool_rows = m.at("pool_rows").get<std::size_t>();
    meta.model.pool_cols = m.at("pool_cols").get<std::size_t>();
    meta.model.edge_init = edge_init_from_name(m.at("edge_init").get<std::string>());
    meta.model.hist_init = histogram_init_from_name(m.at("hist_init").get<std::string>());
    meta.model.hist_lo = m.at("hist_lo").get<double>();
    meta.model.hist_hi = m.at("hist_hi").get<double>();
    const auto& s = j.at("stft");
    meta.stft.window_length = s.at("window_length").get<std::size_t>();
    meta.stft.hop_length = s.at("hop_length").get<std::size_t>();
    meta.stft.freq_bins = s.at("freq_bins").get<std::size_t>();
    meta.stft.center_pad = s.at("center_pad").get<bool>();
    meta.stft.magnitude_scale =
        magnitude_scale_from_name(s.at("magnitude_scale").get<std::string>());
    const auto& i = j.at("ingest");
    meta.ingest.target_rate = i.at("target_rate").get<int>();
    meta.ingest.segment_seconds = i.at("segment_seconds").get<double>();
    return meta;
}

}  // namespace

void save_checkpoint(Model& m, const NormStats& stats, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);

    const auto params = m.parameters();
    write_u32(out, static_cast<std::uint32_t>(params.size() + 2));
    for (const auto& p : params) write_tensor(out, p.name, *p.tensor);

    Tensor mean({stats.mean.size()});
    Tensor std_dev({stats.std_dev.size()});
    for (std::size_t i = 0; i < stats.mean.size(); ++i) {
        mean[i] = stats.mean[i];
        std_dev[i] = stats.std_dev[i];
    }
    write_tensor(out, "norm.mean", mean);
    write_tensor(out, "norm.std", std_dev);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());

    const std::filesystem::path sidecar = path.string() + ".json";
    std::ofstream js(sidecar);
    if (!js) throw std::runtime_error("checkpoint: cannot open " + sidecar.string() + " for writing");
    js << meta_to_json(meta).dump(2) << '\n';
    if (!js) throw std::runtime_error("checkpoint: write failed for " + sidecar.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    const std::filesystem::path sidecar = path.string() + ".json";
    std::ifstream js(sidecar);
    if (!js) throw std::runtime_error("checkpoint: cannot open sidecar " + sidecar.string());
    nlohmann::json j;
    try {
        js >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint: bad sidecar " + sidecar.string() + ": " + e.what());
    }

    LoadedCheckpoint ckpt;
    ckpt.meta = meta_from_json(j);
    ckpt.model = build_model(ckpt.meta.model, 0);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    }
    const std::uint32_t version = read_u32(in, "version");
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported container version " +
                                 std::to_string(version) + " in " + path.string() +
                                 " (this tool reads version " + std::to_string(kVersion) + ")");
    }
    const std::uint32_t count = read_u32(in, "tensor count");

    auto params = ckpt.model.parameters();
    std::vector<bool> seen(params.size(), false);
    bool have_mean = false;
    bool have_std = false;

    for (std::uint32_t ti = 0; ti < count; ++ti) {
        const std::uint32_t name_len = read_u32(in, "tensor name length");
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) {
            throw std::runtime_error("checkpoint: truncated tensor name");
        }
        const std::uint32_t ndim = read_u32(in, "tensor rank");
        if (ndim < 1 || ndim > 4) {
            throw std::runtime_error("checkpoint: tensor '" + name + "' has unsupported rank " +
                                     std::to_string(ndim));
        }
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape) d = read_u32(in, "tensor dims");
        Tensor t(shape);
        std::vector<float> buf(t.size());
        if (!in.read(reinterpret_cast<char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
            throw std::runtime_error("checkpoint: truncated data for tensor '" + name + "'");
        }
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(buf[i]);

        if (name == "norm.mean") {
            ckpt.stats.mean.assign(t.data(), t.data() + t.size());
            have_mean = true;
            continue;
        }
        if (name == "norm.std") {
            ckpt.stats.std_dev.assign(t.data(), t.data() + t.size());
            have_std = true;
            continue;
        }
        bool matched = false;
        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            if (params[pi].name != name) continue;
            if (!params[pi].tensor->same_shape(t)) {
                throw std::runtime_error("checkpoint: tensor '" + name + "' has shape " +
                                         t.shape_str() + " but the config implies " +
                                         params[pi].tensor->shape_str());
            }
            *params[pi].tensor = std::move(t);
            seen[pi] = true;
            matched = true;
            break;
        }
        if (!matched) {
            throw std::runtime_error("checkpoint: unexpected tensor '" + name + "' in " +
                                     path.string());
        }
    }

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        if (!seen[pi]) {
            throw std::runtime_error("checkpoint: missing tensor '" + params[pi].name + "' in " +
                                     path.string());
        }
    }
    if (!have_mean || !have_std) {
        throw std::runtime_error("checkpoint: missing normalizer tensors in " + path.string());
    }
    return ckpt;
}

}  // namespace nehd
