// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/model.h"

#include <cstring>
#include <fstream>

namespace mcse {

namespace {

constexpr char kCkptMagic[4] = {'M', 'C', 'N', 'N'};
constexpr uint32_t kCkptVersion = 1;

struct CkptHeader {
  uint32_t fft_bins = 0, hidden = 0, layers = 0;
  double mask_bound = 0.0;
  uint64_t param_count = 0;
};

CkptHeader ReadHeader(std::ifstream& f, const std::string& path) {
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic: " + path);
  uint32_t version;
  f.read(reinterpret_cast<char*>(&version), 4);
  if (version != kCkptVersion)
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(version));
  CkptHeader h;
  f.read(reinterpret_cast<char*>(&h.fft_bins), 4);
  f.read(reinterpret_cast<char*>(&h.hidden), 4);
  f.read(reinterpret_cast<char*>(&h.layers), 4);
  f.read(reinterpret_cast<char*>(&h.mask_bound), 8);
  f.read(reinterpret_cast<char*>(&h.param_count), 8);
  if (!f) throw FormatError("checkpoint: truncated header: " + path);
  return h;
}

template <typename Scalar>
MaskNet<Scalar> LoadImpl(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("checkpoint: cannot open " + path);
  const CkptHeader h = ReadHeader(f, path);
  MaskNetConfig cfg;
  cfg.fft_bins = static_cast<int>(h.fft_bins);
  cfg.hidden = static_cast<int>(h.hidden);
  cfg.layers = static_cast<int>(h.layers);
  cfg.mask_bound = h.mask_bound;
  MaskNet<Scalar> net(cfg);
  if (static_cast<uint64_t>(net.num_parameters()) != h.param_count)
    throw FormatError("checkpoint: parameter count mismatch: " + path);
  std::vector<float> blob(h.param_count);
  f.read(reinterpret_cast<char*>(blob.data()),
         static_cast<std::streamsize>(blob.size() * sizeof(float)));
  if (!f) throw FormatError("checkpoint: truncated blob: " + path);
  size_t i = 0;
  net.VisitParams([&](Scalar& v) { v = static_cast<Scalar>(blob[i++]); });
  return net;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const MaskNet<double>& net,
                    const nlohmann::json& sidecar) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("checkpoint: cannot open for writing " + path);
  const MaskNetConfig& cfg = net.config();
  f.write(kCkptMagic, 4);
  auto put32 = [&](uint32_t v) { f.write(reinterpret_cast<char*>(&v), 4); };
  put32(kCkptVersion);
  put32(static_cast<uint32_t>(cfg.fft_bins));
  put32(static_cast<uint32_t>(cfg.hidden));
  put32(static_cast<uint32_t>(cfg.layers));
  f.write(reinterpret_cast<const char*>(&cfg.mask_bound), 8);
  const uint64_t count = static_cast<uint64_t>(net.num_parameters());
  f.write(reinterpret_cast<const char*>(&count), 8);
  std::vector<float> blob;
  blob.reserve(count);
  const_cast<MaskNet<double>&>(net).VisitParams(
      [&](double& v) { blob.push_back(static_cast<float>(v)); });
  f.write(reinterpret_cast<const char*>(blob.data()),
          static_cast<std::streamsize>(blob.size() * sizeof(float)));
  if (!f) throw IoError("checkpoint: write failed: " + path);

  if (!sidecar.is_null() && !sidecar.empty()) {
    std::ofstream side(path + ".json", std::ios::trunc);
    if (!side) throw IoError("checkpoint: cannot write sidecar for " + path);
    side << sidecar.dump(2) << "\n";
  }
}

MaskNetConfig PeekCheckpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("checkpoint: cannot open " + path);
  const CkptHeader h = ReadHeader(f, path);
  MaskNetConfig cfg;
  cfg.fft_bins = static_cast<int>(h.fft_bins);
  cfg.hidden = static_cast<int>(h.hidden);
  cfg.layers = static_cast<int>(h.layers);
  cfg.mask_bound = h.mask_bound;
  return cfg;
}

MaskNet<double> LoadCheckpoint(const std::string& path) {
  return LoadImpl<double>(path);
}

MaskNet<float> LoadCheckpointFloat(const std::string& path) {
  return LoadImpl<float>(path);
}

}  // namespace mcse
