// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/wav.h"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mcse/common.h"

namespace mcse {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string* out, uint32_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>((v >> 8) & 0xFF));
  out->push_back(static_cast<char>((v >> 16) & 0xFF));
  out->push_back(static_cast<char>((v >> 24) & 0xFF));
}

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>((v >> 8) & 0xFF));
}

void WriteWav(const std::string& path, const AudioBuffer& audio,
              uint16_t format_tag) {
  if (audio.data.empty()) throw InputError("wav: no channels to write");
  const int channels = audio.num_channels();
  const long samples = audio.num_samples();
  for (const auto& ch : audio.data) {
    if (static_cast<long>(ch.size()) != samples)
      throw ShapeError("wav: channel lengths differ");
  }
  const uint16_t bytes_per_sample = format_tag == kFormatFloat ? 4 : 2;
  const uint32_t data_bytes =
      static_cast<uint32_t>(samples) * channels * bytes_per_sample;

  std::string buf;
  buf.reserve(44 + data_bytes);
  buf.append("RIFF");
  PutU32(&buf, 36 + data_bytes);
  buf.append("WAVEfmt ");
  PutU32(&buf, 16);
  PutU16(&buf, format_tag);
  PutU16(&buf, static_cast<uint16_t>(channels));
  PutU32(&buf, static_cast<uint32_t>(audio.sample_rate));
  PutU32(&buf, static_cast<uint32_t>(audio.sample_rate) * channels *
                   bytes_per_sample);
  PutU16(&buf, static_cast<uint16_t>(channels * bytes_per_sample));
  PutU16(&buf, static_cast<uint16_t>(8 * bytes_per_sample));
  buf.append("data");
  PutU32(&buf, data_bytes);

  if (format_tag == kFormatFloat) {
    for (long i = 0; i < samples; ++i) {
      for (int c = 0; c < channels; ++c) {
        float v = static_cast<float>(audio.data[c][i]);
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        PutU32(&buf, bits);
      }
    }
  } else {
    for (long i = 0; i < samples; ++i) {
      for (int c = 0; c < channels; ++c) {
        double v = std::clamp(audio.data[c][i], -1.0, 32767.0 / 32768.0);
        auto q = static_cast<int16_t>(std::lrint(v * 32768.0));
        PutU16(&buf, static_cast<uint16_t>(q));
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("wav: cannot open for writing: " + path);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("wav: short write: " + path);
}

}  // namespace

AudioBuffer ReadWav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("wav: cannot open: " + path);
  std::vector<uint8_t> raw((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw FormatError("wav: not a RIFF/WAVE file: " + path);

  uint16_t format_tag = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_bytes = 0;

  size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const uint8_t* chunk = raw.data() + pos;
    uint32_t chunk_size = ReadU32(chunk + 4);
    const uint8_t* body = chunk + 8;
    if (pos + 8 + chunk_size > raw.size())
      chunk_size = static_cast<uint32_t>(raw.size() - pos - 8);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw FormatError("wav: truncated fmt chunk");
      format_tag = ReadU16(body);
      channels = ReadU16(body + 2);
      sample_rate = ReadU32(body + 4);
      bits = ReadU16(body + 14);
      if (format_tag == kFormatExtensible && chunk_size >= 40)
        format_tag = ReadU16(body + 24);  // first two bytes of the sub-GUID
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = body;
      data_bytes = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (channels == 0 || sample_rate == 0)
    throw FormatError("wav: missing fmt chunk: " + path);
  if (data == nullptr) throw FormatError("wav: missing data chunk: " + path);

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  audio.data.assign(channels, {});

  if (format_tag == kFormatPcm && bits == 16) {
    long frames = data_bytes / (2L * channels);
    for (auto& ch : audio.data) ch.resize(frames);
    for (long i = 0; i < frames; ++i)
      for (int c = 0; c < channels; ++c) {
        auto v = static_cast<int16_t>(ReadU16(data + (i * channels + c) * 2));
        audio.data[c][i] = v / 32768.0;
      }
  } else if (format_tag == kFormatFloat && bits == 32) {
    long frames = data_bytes / (4L * channels);
    for (auto& ch : audio.data) ch.resize(frames);
    for (long i = 0; i < frames; ++i)
      for (int c = 0; c < channels; ++c) {
        uint32_t b = ReadU32(data + (i * channels + c) * 4);
        float v;
        std::memcpy(&v, &b, 4);
        audio.data[c][i] = v;
      }
  } else {
    throw FormatError("wav: unsupported format (tag=" +
                      std::to_string(format_tag) +
                      ", bits=" + std::to_string(bits) + "): " + path);
  }
  return audio;
}

void WriteWavFloat32(const std::string& path, const AudioBuffer& audio) {
  WriteWav(path, audio, kFormatFloat);
}

void WriteWavPcm16(const std::string& path, const AudioBuffer& audio) {
  WriteWav(path, audio, kFormatPcm);
}

}  // namespace mcse
