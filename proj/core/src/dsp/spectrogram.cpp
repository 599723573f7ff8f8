#include "tiltlab/dsp/spectrogram.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tiltlab::dsp {

namespace {
constexpr char kMagic[8] = {'T', 'B', 'S', 'P', 'E', 'C', '0', '1'};
}

void write_spectrogram(const std::filesystem::path& path, const Spectrogram& spec) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_spectrogram: cannot open " + path.string());
    f.write(kMagic, 8);
    uint32_t dims[3] = {kSpecFrames, kSpecBins, kSpecChannels};
    f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    f.write(reinterpret_cast<const char*>(spec.data.data()),
            static_cast<std::streamsize>(spec.data.size() * sizeof(float)));
    if (!f) throw std::runtime_error("write_spectrogram: write failed for " + path.string());
}

Spectrogram read_spectrogram(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_spectrogram: cannot open " + path.string());
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("read_spectrogram: bad magic in " + path.string());
    uint32_t dims[3];
    f.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!f || dims[0] != kSpecFrames || dims[1] != kSpecBins || dims[2] != kSpecChannels)
        throw std::runtime_error("read_spectrogram: bad dimensions in " + path.string());
    Spectrogram spec;
    f.read(reinterpret_cast<char*>(spec.data.data()),
           static_cast<std::streamsize>(spec.data.size() * sizeof(float)));
    if (!f) throw std::runtime_error("read_spectrogram: truncated file " + path.string());
    return spec;
}

}  // namespace tiltlab::dsp
