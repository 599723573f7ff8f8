#pragma once

#include <filesystem>

#include "tiltlab/sound/synth.hpp"

namespace tiltlab::sound {

/// Write a RIFF/WAVE file, 32-bit float PCM, interleaved channels.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

/// Read a RIFF/WAVE file. Accepts 32-bit float (format 3) and 16-bit integer
/// (format 1) PCM; other formats are rejected. Unknown chunks are skipped.
AudioBuffer read_wav(const std::filesystem::path& path);

}  // namespace tiltlab::sound
