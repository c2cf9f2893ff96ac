#include "nehd/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace nehd {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error(std::string("tensor file: truncated reading ") + what);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("tensor file: cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) write_u32(out, static_cast<std::uint32_t>(d));
    std::vector<float> buf(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) buf[i] = static_cast<float>(t[i]);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw std::runtime_error("tensor file: write failed for " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tensor file: cannot open " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("tensor file: bad magic in " + path.string());
    }
    const std::uint32_t version = read_u32(in, "version");
    if (version != kVersion) {
        throw std::runtime_error("tensor file: unsupported version " + std::to_string(version) +
                                 " in " + path.string());
    }
    const std::uint32_t ndim = read_u32(in, "ndim");
    if (ndim < 1 || ndim > 4) {
        throw std::runtime_error("tensor file: unsupported rank " + std::to_string(ndim) + " in " +
                                 path.string());
    }
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) d = read_u32(in, "dims");
    Tensor t(shape);
    std::vector<float> buf(t.size());
    if (!in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
        throw std::runtime_error("tensor file: truncated data in " + path.string());
    }
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(buf[i]);
    return t;
}

void write_csv(const Tensor& t, const std::filesystem::path& path) {
    if (t.rank() != 2) {
        throw std::invalid_argument("csv export: expected a rank-2 tensor, got " + t.shape_str());
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv export: cannot open " + path.string() + " for writing");
    out.precision(9);
    for (std::size_t i = 0; i < t.dim(0); ++i) {
        for (std::size_t j = 0; j < t.dim(1); ++j) {
            if (j) out << ',';
            out << t(i, j);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("csv export: write failed for " + path.string());
}

}  // namespace nehd
