#include "tiltlab/sound/wav.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tiltlab::sound {

namespace {

void put_u32(std::ofstream& f, uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); }
void put_u16(std::ofstream& f, uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); }

uint32_t get_u32(std::ifstream& f) {
    uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
uint16_t get_u16(std::ifstream& f) {
    uint16_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 2);
    return v;
}

}  // namespace

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
    const uint16_t channels = static_cast<uint16_t>(audio.samples.size());
    const uint32_t frames = static_cast<uint32_t>(audio.frames());
    const uint32_t data_bytes = frames * channels * 4;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_wav: cannot open " + path.string());

    f.write("RIFF", 4);
    put_u32(f, 36 + data_bytes);
    f.write("WAVE", 4);

    f.write("fmt ", 4);
    put_u32(f, 16);
    put_u16(f, 3);  // IEEE float
    put_u16(f, channels);
    put_u32(f, static_cast<uint32_t>(audio.sample_rate));
    put_u32(f, static_cast<uint32_t>(audio.sample_rate) * channels * 4);
    put_u16(f, channels * 4);
    put_u16(f, 32);

    f.write("data", 4);
    put_u32(f, data_bytes);
    std::vector<float> interleaved(static_cast<size_t>(frames) * channels);
    for (uint32_t i = 0; i < frames; ++i)
        for (uint16_t c = 0; c < channels; ++c)
            interleaved[static_cast<size_t>(i) * channels + c] = audio.samples[c][i];
    f.write(reinterpret_cast<const char*>(interleaved.data()), data_bytes);
    if (!f) throw std::runtime_error("write_wav: write failed for " + path.string());
}

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_wav: cannot open " + path.string());

    char tag[5] = {};
    f.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("read_wav: not a RIFF file: " + path.string());
    get_u32(f);  // riff size
    f.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("read_wav: not a WAVE file: " + path.string());

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    bool have_fmt = false;
    AudioBuffer out;

    while (f.read(tag, 4)) {
        uint32_t chunk_size = get_u32(f);
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            format = get_u16(f);
            channels = get_u16(f);
            rate = get_u32(f);
            get_u32(f);  // byte rate
            get_u16(f);  // block align
            bits = get_u16(f);
            if (chunk_size > 16) f.seekg(chunk_size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::strncmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw std::runtime_error("read_wav: data chunk before fmt: " + path.string());
            if (channels == 0) throw std::runtime_error("read_wav: zero channels: " + path.string());
            if (!((format == 3 && bits == 32) || (format == 1 && bits == 16)))
                throw std::runtime_error("read_wav: unsupported format (want float32 or int16): " +
                                         path.string());
            uint32_t bytes_per_sample = bits / 8;
            uint32_t frame_count = chunk_size / (channels * bytes_per_sample);
            out.sample_rate = static_cast<int>(rate);
            out.channels = channels;
            out.samples.assign(channels, std::vector<float>(frame_count));
            if (format == 3) {
                std::vector<float> raw(static_cast<size_t>(frame_count) * channels);
                f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
                for (uint32_t i = 0; i < frame_count; ++i)
                    for (uint16_t c = 0; c < channels; ++c)
                        out.samples[c][i] = raw[static_cast<size_t>(i) * channels + c];
            } else {
                std::vector<int16_t> raw(static_cast<size_t>(frame_count) * channels);
                f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 2));
                for (uint32_t i = 0; i < frame_count; ++i)
                    for (uint16_t c = 0; c < channels; ++c)
                        out.samples[c][i] = static_cast<float>(raw[static_cast<size_t>(i) * channels + c]) / 32768.0f;
            }
            if (!f) throw std::runtime_error("read_wav: truncated data chunk: " + path.string());
            return out;
        } else {
            f.seekg(chunk_size + (chunk_size & 1), std::ios::cur);  // chunks are word-aligned
        }
    }
    throw std::runtime_error("read_wav: no data chunk: " + path.string());
}

}  // namespace tiltlab::sound
