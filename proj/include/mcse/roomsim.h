// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_ROOMSIM_H_
#define MCSE_ROOMSIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcse/geometry.h"

namespace mcse {

// Rejection-sampler bounds for meeting-room scenarios. Defaults follow the
// recording-room constraint set: rooms 3x3x3 to 8x8x3 m, array height
// 1.0-1.5 m, source heights 1.2-1.9 m, source distance 0.5-5.0 m, pairwise
// source angle at the array wider than 20 degrees.
struct SamplerBounds {
  Vec3 room_min{3.0, 3.0, 3.0};
  Vec3 room_max{8.0, 8.0, 3.0};
  double array_height_min = 1.0;
  double array_height_max = 1.5;
  double source_height_min = 1.2;
  double source_height_max = 1.9;
  double source_dist_min = 0.5;
  double source_dist_max = 5.0;
  double min_source_angle_deg = 20.0;
  // Reverberation target; surface absorption is derived from it by Eyring
  // inversion (the decay law itself is a documented choice).
  double t60_min = 0.2;
  double t60_max = 1.0;
  int num_sources = 2;
  double wall_margin = 0.1;        // sources keep this far from walls
  double array_wall_margin = 0.35; // pose margin covering the array extent
  int max_attempts = 10000;

  void Validate() const;
};

struct RoomScenario {
  Vec3 room_dims;
  double target_t60 = 0.5;   // seconds
  double absorption = 0.3;   // uniform energy absorption in (0, 1]
  ArrayPose array_pose;
  std::vector<Vec3> source_positions;
  uint64_t seed = 0;
};

// Draws a scenario satisfying every bound; deterministic for a given seed.
// Throws SamplingError once max_attempts rejections are exhausted.
RoomScenario SampleScenario(uint64_t seed, const SamplerBounds& bounds = {});

// Uniform surface absorption that Eyring's formula maps to the target T60.
double EyringAbsorption(const Vec3& room_dims, double t60);
// Eyring T60 prediction for a uniform absorption coefficient.
double EyringT60(const Vec3& room_dims, double absorption);

// How wall absorption attenuates each image.
//  kDiffuse: energy follows the Eyring diffuse-field law along the image's
//    path length, so the rendered decay matches the Eyring T60 of the
//    absorption for any room (a purely specular shoebox otherwise decays
//    slower than Eyring, since energy survives in low-loss directions).
//  kSpecular: classic per-wall product, pressure factor sqrt(1 - absorption)
//    per reflection.
// Both keep the exact image geometry (delays, 1/(4 pi d) spreading).
enum class AbsorptionModel { kDiffuse, kSpecular };

struct RirConfig {
  // Reflection order cap; negative means "as far as the response length
  // reaches" (images beyond the tail cannot contribute).
  int max_order = -1;
  double speed_of_sound = 340.0;
  int sample_rate = 16000;
  double tail_seconds = 0.05;     // length = T60 + tail, capped below
  double max_rir_seconds = 2.0;
  int frac_delay_taps = 81;       // windowed-sinc fractional delay support
  AbsorptionModel absorption_model = AbsorptionModel::kDiffuse;
  // All image amplitudes are positive, which piles up a near-DC ramp in the
  // dense late field; the customary post-filter removes it. 0 disables.
  double highpass_hz = 100.0;

  void Validate() const;
};

struct Rir {
  std::vector<std::vector<double>> samples_per_mic;
  int sample_rate = 0;

  int num_mics() const { return static_cast<int>(samples_per_mic.size()); }
  long length() const {
    return samples_per_mic.empty()
               ? 0
               : static_cast<long>(samples_per_mic[0].size());
  }
};

// Shoebox image-method simulation for one source, one response per mic.
// Frequency-independent wall reflection, 1/(4*pi*d) spreading, fractional
// delays via an 81-tap Hann-windowed sinc.
Rir SimulateRir(const RoomScenario& scenario, const ArrayGeometry& geometry,
                int source_index, const RirConfig& config = {});

struct BatchItem {
  std::string file;        // WAV path relative to the manifest directory
  std::string rir_id;
  int scenario_id = 0;
  int source_index = 0;
  RoomScenario scenario;
};

struct BatchResult {
  std::vector<BatchItem> items;
  std::string manifest_path;
};

// Generates num_rirs responses (scenarios carry bounds.num_sources sources;
// one file per scenario/source) plus a JSON Lines manifest. Byte-for-byte
// reproducible for a given seed, independent of the worker count.
// `config_echo`, when non-null, is embedded in the manifest header.
BatchResult BatchGenerate(int num_rirs, const ArrayGeometry& geometry,
                          uint64_t seed, const std::string& out_dir,
                          const SamplerBounds& bounds = {},
                          const RirConfig& config = {}, int jobs = 1,
                          const nlohmann::json& config_echo = {});

}  // namespace mcse

#endif  // MCSE_ROOMSIM_H_
