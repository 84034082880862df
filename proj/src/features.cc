// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/features.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "mcse/common.h"

namespace mcse {

void PairSelection::Validate(int num_clip_channels) const {
  if (channel_subset.size() != 8)
    throw ConfigError("features: channel subset must have 8 entries");
  std::set<int> seen;
  for (int c : channel_subset) {
    if (c < 0 || c >= num_clip_channels)
      throw InputError("features: subset channel " + std::to_string(c) +
                       " missing from clip");
    if (!seen.insert(c).second)
      throw ConfigError("features: duplicate channel in subset");
  }
  for (const auto& [i, j] : pairs) {
    if (i == j) throw ConfigError("features: pair with identical channels");
    if (i < 0 || j < 0 || i >= 8 || j >= 8)
      throw ConfigError("features: pair index outside subset");
  }
}

PairSelection DefaultPairs(Topology topology) {
  PairSelection sel;
  sel.pairs = {{{0, 4}, {1, 5}, {2, 6}, {3, 7}}};
  switch (topology) {
    case Topology::kLinearUniform8:
    case Topology::kLinearNonuniform8:
      sel.channel_subset = {0, 1, 2, 3, 4, 5, 6, 7};
      break;
    case Topology::kDualLinear16:
      // First 8 channels = sub-array A; its channel 1 is the reference mic.
      sel.channel_subset = {0, 1, 2, 3, 4, 5, 6, 7};
      break;
    case Topology::kCircular16:
      // Every other channel; subset pairs (1,5)... map back to the original
      // channel pairs (1,9),(3,11),(5,13),(7,15) in 1-based numbering.
      sel.channel_subset = {0, 2, 4, 6, 8, 10, 12, 14};
      break;
    default:
      throw ConfigError("features: unsupported topology for default pairs");
  }
  return sel;
}

Eigen::MatrixXd Ipd(const Spectrogram& spec_i, const Spectrogram& spec_j) {
  if (spec_i.bins.rows() != spec_j.bins.rows() ||
      spec_i.bins.cols() != spec_j.bins.cols())
    throw ShapeError("ipd: spectrogram shapes differ");
  Eigen::MatrixXd out(spec_i.bins.rows(), spec_i.bins.cols());
  for (long t = 0; t < out.cols(); ++t)
    for (long k = 0; k < out.rows(); ++k) {
      double a = std::arg(spec_i.bins(k, t) * std::conj(spec_j.bins(k, t)));
      if (a <= -M_PI) a += 2.0 * M_PI;  // wrap to (-pi, pi]
      out(k, t) = a;
    }
  return out;
}

FeatureTensor AssembleFeatures(const std::vector<Spectrogram>& subset_spectra,
                               const PairSelection& selection,
                               const FeatureOptions& options) {
  if (subset_spectra.size() != selection.channel_subset.size())
    throw ShapeError("features: expected one spectrogram per subset channel");
  const Spectrogram& x0 = subset_spectra[0];
  const long F = x0.bins.rows(), T = x0.bins.cols();
  for (const Spectrogram& s : subset_spectra)
    if (s.bins.rows() != F || s.bins.cols() != T)
      throw ShapeError("features: spectrogram shapes differ across channels");

  FeatureTensor tensor;
  tensor.config = x0.config;
  tensor.fft_bins = static_cast<int>(F);
  tensor.values.resize(FeatureTensor::kBlockCount * F, T);
  tensor.values.block(0, 0, F, T) = x0.bins.real();
  tensor.values.block(F, 0, F, T) = x0.bins.imag();
  for (int p = 0; p < 4; ++p) {
    const auto& [i, j] = selection.pairs[p];
    Eigen::MatrixXd ipd = Ipd(subset_spectra[i], subset_spectra[j]);
    tensor.values.block((2 + p) * F, 0, F, T) =
        ipd.array().cos().matrix();
  }

  if (options.normalize_utterance) {
    // Only the Re/Im blocks; cosIPD keeps its natural range.
    auto block = tensor.values.block(0, 0, 2 * F, T);
    const double mean = block.mean();
    const double var = (block.array() - mean).square().mean();
    block = ((block.array() - mean) / std::sqrt(var + 1e-12)).matrix();
  }
  return tensor;
}

FeatureTensor AssembleFeatures(const std::vector<std::vector<double>>& channels,
                               const PairSelection& selection,
                               const StftConfig& stft_config,
                               const FeatureOptions& options) {
  selection.Validate(static_cast<int>(channels.size()));
  std::vector<Spectrogram> spectra;
  spectra.reserve(selection.channel_subset.size());
  for (int c : selection.channel_subset) {
    Spectrogram s = Stft(channels[c], stft_config);
    s.channel_id = c;
    spectra.push_back(std::move(s));
  }
  return AssembleFeatures(spectra, selection, options);
}

namespace {
constexpr char kFeatMagic[4] = {'M', 'C', 'F', 'T'};
}

void DumpFeatures(const std::string& path, const FeatureTensor& tensor) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("features dump: cannot open " + path);
  f.write(kFeatMagic, 4);
  uint32_t header[3] = {static_cast<uint32_t>(tensor.fft_bins),
                        static_cast<uint32_t>(tensor.values.cols()),
                        FeatureTensor::kBlockCount};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (long r = 0; r < tensor.values.rows(); ++r)
    for (long t = 0; t < tensor.values.cols(); ++t) {
      float v = static_cast<float>(tensor.values(r, t));
      f.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!f) throw IoError("features dump: write failed: " + path);
}

FeatureTensor LoadFeatures(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("features load: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kFeatMagic, 4) != 0)
    throw FormatError("features load: bad magic: " + path);
  uint32_t header[3];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!f || header[2] != FeatureTensor::kBlockCount)
    throw FormatError("features load: bad header: " + path);
  FeatureTensor tensor;
  tensor.fft_bins = static_cast<int>(header[0]);
  tensor.values.resize(static_cast<long>(header[2]) * header[0], header[1]);
  for (long r = 0; r < tensor.values.rows(); ++r)
    for (long t = 0; t < tensor.values.cols(); ++t) {
      float v;
      f.read(reinterpret_cast<char*>(&v), sizeof(v));
      tensor.values(r, t) = v;
    }
  if (!f) throw FormatError("features load: truncated file: " + path);
  return tensor;
}

}  // namespace mcse
