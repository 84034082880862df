// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_WAV_H_
#define MCSE_WAV_H_

#include <string>
#include <vector>

namespace mcse {

// Deinterleaved audio buffer: data[channel][sample].
struct AudioBuffer {
  std::vector<std::vector<double>> data;
  int sample_rate = 0;

  int num_channels() const { return static_cast<int>(data.size()); }
  long num_samples() const {
    return data.empty() ? 0 : static_cast<long>(data[0].size());
  }
};

// Reads a RIFF/WAVE file. Supports PCM16 and IEEE float32, any channel
// count. PCM16 samples are scaled to [-1, 1) by 1/32768.
AudioBuffer ReadWav(const std::string& path);

// Writes IEEE float32 WAV (format tag 3), deinterleaved input.
void WriteWavFloat32(const std::string& path, const AudioBuffer& audio);

// Writes PCM16 WAV, clipping to [-1, 1).
void WriteWavPcm16(const std::string& path, const AudioBuffer& audio);

}  // namespace mcse

#endif  // MCSE_WAV_H_
