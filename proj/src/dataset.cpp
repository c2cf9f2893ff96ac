#include "nehd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "nehd/rng.hpp"

namespace nehd {

std::vector<Segment> segment(const Waveform& w, double window_seconds,
                             const std::string& source_id, const std::string& label) {
    if (window_seconds <= 0.0) throw std::invalid_argument("segment: window must be positive");
    if (w.sample_rate <= 0) throw std::invalid_argument("segment: sample rate must be positive");

    const auto win = static_cast<std::size_t>(std::llround(window_seconds * w.sample_rate));
    std::vector<Segment> out;
    if (win == 0 || w.samples.size() < win) return out;

    const std::size_t count = w.samples.size() / win;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Segment s;
        s.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(i * win),
                         w.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * win));
        s.sample_rate = w.sample_rate;
        s.source_id = source_id;
        s.offset_seconds = static_cast<double>(i) * window_seconds;
        s.label = label;
        out.push_back(std::move(s));
    }
    return out;
}

const char* split_name(Split s) {
    switch (s) {
        case Split::kTrain: return "train";
        case Split::kVal: return "val";
        case Split::kTest: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::kTrain;
    if (name == "val") return Split::kVal;
    if (name == "test") return Split::kTest;
    throw std::invalid_argument("unknown split name: " + name);
}

std::size_t DatasetManifest::label_index(const std::string& label) const {
    auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it == class_names.end()) throw std::runtime_error("label not in manifest class set: " + label);
    return static_cast<std::size_t>(it - class_names.begin());
}

std::vector<ManifestEntry> DatasetManifest::split_entries(Split s) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries) {
        if (e.split == s) out.push_back(e);
    }
    return out;
}

DatasetManifest split_dataset(const std::vector<SourceRecord>& sources,
                              const std::array<double, 3>& ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (r <= 0.0) throw std::invalid_argument("split: ratios must be positive");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("split: ratios must sum to 1");
    }
    if (sources.empty()) throw std::invalid_argument("split: no sources");

    std::map<std::string, std::vector<SourceRecord>> by_class;
    for (const auto& s : sources) by_class[s.label].push_back(s);

    DatasetManifest m;
    m.seed = seed;
    for (const auto& [label, group] : by_class) {
        m.class_names.push_back(label);
        if (group.size() < 3) {
            throw std::runtime_error("split: class '" + label + "' has " +
                                     std::to_string(group.size()) +
                                     " sources; stratified split needs at least 3");
        }
    }

    for (const auto& [label, group_const] : by_class) {
        auto group = group_const;
        // sort, then seeded shuffle: assignment is independent of input order
        std::sort(group.begin(), group.end(),
                  [](const SourceRecord& a, const SourceRecord& b) { return a.source_id < b.source_id; });
        auto rng = make_rng(mix_seed(mix_seed(seed, "split"), tag_salt(label)));
        std::shuffle(group.begin(), group.end(), rng);

        // largest-remainder apportionment of this class across splits
        const std::size_t n = group.size();
        std::array<std::size_t, 3> count{};
        std::array<double, 3> frac{};
        std::size_t assigned = 0;
        for (int i = 0; i < 3; ++i) {
            const double ideal = static_cast<double>(n) * ratios[static_cast<std::size_t>(i)];
            count[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor(ideal));
            frac[static_cast<std::size_t>(i)] = ideal - std::floor(ideal);
            assigned += count[static_cast<std::size_t>(i)];
        }
        while (assigned < n) {
            int best = 0;
            for (int i = 1; i < 3; ++i) {
                if (frac[static_cast<std::size_t>(i)] > frac[static_cast<std::size_t>(best)]) best = i;
            }
            count[static_cast<std::size_t>(best)] += 1;
            frac[static_cast<std::size_t>(best)] = -1.0;
            assigned += 1;
        }

        std::size_t pos = 0;
        for (int i = 0; i < 3; ++i) {
            for (std::size_t k = 0; k < count[static_cast<std::size_t>(i)]; ++k, ++pos) {
                ManifestEntry e;
                e.source_id = group[pos].source_id;
                e.path = group[pos].path;
                e.label = label;
                e.split = static_cast<Split>(i);
                m.entries.push_back(std::move(e));
            }
        }
    }

    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.source_id < b.source_id; });
    return m;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot open " + path.string());

    nlohmann::json header;
    header["schema_version"] = DatasetManifest::kSchemaVersion;
    header["class_names"] = m.class_names;
    header["seed"] = m.seed;
    out << header.dump() << "\n";
    for (const auto& e : m.entries) {
        nlohmann::json rec;
        rec["id"] = e.source_id;
        rec["path"] = e.path;
        rec["label"] = e.label;
        rec["split"] = split_name(e.split);
        out << rec.dump() << "\n";
    }
    if (!out) throw std::runtime_error("manifest: write failed for " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("manifest: empty file " + path.string());

    DatasetManifest m;
    try {
        auto header = nlohmann::json::parse(line);
        const int version = header.at("schema_version").get<int>();
        if (version != DatasetManifest::kSchemaVersion) {
            throw std::runtime_error("manifest: unsupported schema version " + std::to_string(version));
        }
        m.class_names = header.at("class_names").get<std::vector<std::string>>();
        m.seed = header.at("seed").get<std::uint64_t>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto rec = nlohmann::json::parse(line);
            ManifestEntry e;
            e.source_id = rec.at("id").get<std::string>();
            e.path = rec.at("path").get<std::string>();
            e.label = rec.at("label").get<std::string>();
            e.split = split_from_name(rec.at("split").get<std::string>());
            m.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest: parse error in " + path.string() + ": " + e.what());
    }
    return m;
}

}  // namespace nehd
