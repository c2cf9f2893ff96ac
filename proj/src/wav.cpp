#include "nehd/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nehd {

namespace {

struct Cursor {
    const std::uint8_t* p;
    std::size_t remaining;

    void need(std::size_t n, const char* what) {
        if (remaining < n) {
            throw std::runtime_error(std::string("wav decode: truncated ") + what);
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        remaining -= 2;
        return v;
    }
    void fourcc(char out[5], const char* what) {
        need(4, what);
        std::memcpy(out, p, 4);
        out[4] = '\0';
        p += 4;
        remaining -= 4;
    }
    void skip(std::size_t n, const char* what) {
        need(n, what);
        p += n;
        remaining -= n;
    }
};

float read_f32le(const std::uint8_t* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

std::int16_t read_s16le(const std::uint8_t* p) {
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

}  // namespace

Waveform decode_wav(const std::vector<std::uint8_t>& bytes) {
    Cursor c{bytes.data(), bytes.size()};

    char id[5];
    c.fourcc(id, "'RIFF' header");
    if (std::strncmp(id, "RIFF", 4) != 0) {
        throw std::runtime_error("wav decode: missing 'RIFF' header");
    }
    c.u32("'RIFF' size field");
    c.fourcc(id, "'WAVE' tag");
    if (std::strncmp(id, "WAVE", 4) != 0) {
        throw std::runtime_error("wav decode: missing 'WAVE' tag");
    }

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const std::uint8_t* data_ptr = nullptr;
    std::uint32_t data_size = 0;

    while (c.remaining > 0) {
        if (c.remaining < 8) {
            throw std::runtime_error("wav decode: truncated chunk header");
        }
        c.fourcc(id, "chunk id");
        std::uint32_t chunk_size = c.u32("chunk size");
        if (std::strncmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw std::runtime_error("wav decode: short 'fmt ' chunk");
            format = c.u16("'fmt ' chunk");
            channels = c.u16("'fmt ' chunk");
            rate = c.u32("'fmt ' chunk");
            c.u32("'fmt ' chunk");  // byte rate
            c.u16("'fmt ' chunk");  // block align
            bits = c.u16("'fmt ' chunk");
            c.skip(chunk_size - 16, "'fmt ' chunk extension");
            have_fmt = true;
        } else if (std::strncmp(id, "data", 4) == 0) {
            c.need(chunk_size, "'data' chunk");
            data_ptr = c.p;
            data_size = chunk_size;
            c.skip(chunk_size, "'data' chunk");
        } else {
            // pad byte after odd-sized chunks
            c.skip(chunk_size + (chunk_size & 1), "chunk body");
        }
    }

    if (!have_fmt) throw std::runtime_error("wav decode: missing 'fmt ' chunk");
    if (data_ptr == nullptr) throw std::runtime_error("wav decode: missing 'data' chunk");
    if (channels != 1 && channels != 2) {
        throw std::runtime_error("wav decode: unsupported format: " + std::to_string(channels) +
                                 " channels (expected 1 or 2)");
    }
    if (rate == 0) throw std::runtime_error("wav decode: zero sample rate in 'fmt ' chunk");

    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32) {
        throw std::runtime_error("wav decode: unsupported format: tag " + std::to_string(format) +
                                 ", " + std::to_string(bits) + " bits (expected PCM16 or float32)");
    }

    const std::size_t bytes_per = pcm16 ? 2 : 4;
    const std::size_t frame_bytes = bytes_per * channels;
    if (data_size % frame_bytes != 0) {
        throw std::runtime_error("wav decode: 'data' chunk size not a multiple of frame size");
    }
    const std::size_t n = data_size / frame_bytes;
    if (n == 0) throw std::runtime_error("wav decode: empty 'data' chunk");

    Waveform w;
    w.sample_rate = static_cast<int>(rate);
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const std::uint8_t* sp = data_ptr + (i * channels + ch) * bytes_per;
            acc += pcm16 ? read_s16le(sp) / 32768.0 : static_cast<double>(read_f32le(sp));
        }
        w.samples[i] = acc / channels;
    }
    for (double v : w.samples) {
        if (!std::isfinite(v)) throw std::runtime_error("wav decode: non-finite sample in 'data' chunk");
    }
    return w;
}

Waveform decode_wav_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("wav decode: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_wav(bytes);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " (" + path.string() + ")");
    }
}

std::vector<std::uint8_t> encode_wav16(const Waveform& w) {
    if (w.sample_rate <= 0) throw std::invalid_argument("wav encode: sample rate must be positive");
    const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
    const std::uint32_t data_size = n * 2;

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32le(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32le(out, 16);
    put_u16le(out, 1);  // PCM
    put_u16le(out, 1);  // mono
    put_u32le(out, static_cast<std::uint32_t>(w.sample_rate));
    put_u32le(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
    put_u16le(out, 2);
    put_u16le(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32le(out, data_size);
    for (double v : w.samples) {
        double q = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
        q = std::clamp(q, -32768.0, 32767.0);
        put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
    return out;
}

void encode_wav16_file(const std::filesystem::path& path, const Waveform& w) {
    auto bytes = encode_wav16(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("wav encode: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("wav encode: write failed for " + path.string());
}

}  // namespace nehd
