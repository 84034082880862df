// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mcse/common.h"
#include "mcse/manifest.h"
#include "mcse/roomsim.h"
#include "mcse/wav.h"
#include "testing/oracles.h"

using namespace mcse;

namespace {

// Standalone constraint checker, independent of the sampler internals.
void CheckScenario(const RoomScenario& sc, const SamplerBounds& b) {
  REQUIRE(sc.room_dims.x >= b.room_min.x);
  REQUIRE(sc.room_dims.x <= b.room_max.x);
  REQUIRE(sc.room_dims.y >= b.room_min.y);
  REQUIRE(sc.room_dims.y <= b.room_max.y);
  REQUIRE(sc.room_dims.z >= b.room_min.z);
  REQUIRE(sc.room_dims.z <= b.room_max.z);
  REQUIRE(sc.array_pose.position.z >= b.array_height_min);
  REQUIRE(sc.array_pose.position.z <= b.array_height_max);
  REQUIRE(static_cast<int>(sc.source_positions.size()) == b.num_sources);
  for (const Vec3& s : sc.source_positions) {
    REQUIRE(s.z >= b.source_height_min);
    REQUIRE(s.z <= b.source_height_max);
    REQUIRE(s.x > 0.0);
    REQUIRE(s.x < sc.room_dims.x);
    REQUIRE(s.y > 0.0);
    REQUIRE(s.y < sc.room_dims.y);
    const double d = Distance(s, sc.array_pose.position);
    REQUIRE(d >= b.source_dist_min);
    REQUIRE(d <= b.source_dist_max);
  }
  for (size_t i = 0; i < sc.source_positions.size(); ++i)
    for (size_t j = i + 1; j < sc.source_positions.size(); ++j) {
      const Vec3 u = sc.source_positions[i] - sc.array_pose.position;
      const Vec3 v = sc.source_positions[j] - sc.array_pose.position;
      const double nu = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
      const double nv = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
      const double cosang = (u.x * v.x + u.y * v.y + u.z * v.z) / (nu * nv);
      REQUIRE(std::acos(std::min(1.0, std::max(-1.0, cosang))) * 180.0 / M_PI >
              b.min_source_angle_deg);
    }
  REQUIRE(sc.absorption > 0.0);
  REQUIRE(sc.absorption <= 1.0);
}

RoomScenario FixedScenario() {
  RoomScenario sc;
  sc.room_dims = {5.0, 4.0, 3.0};
  sc.target_t60 = 0.3;
  sc.absorption = EyringAbsorption(sc.room_dims, 0.3);
  sc.array_pose = {{2.0, 2.0, 1.2}, 0.0};
  sc.source_positions = {{3.0, 2.0, 1.5}, {2.0, 3.2, 1.6}};
  return sc;
}

}  // namespace

TEST_CASE("1000 sampled scenarios all pass the independent checker") {
  SamplerBounds bounds;
  for (uint64_t seed = 0; seed < 1000; ++seed)
    CheckScenario(SampleScenario(seed, bounds), bounds);
}

TEST_CASE("sampled quantities stay inside (and explore) their ranges") {
  SamplerBounds b;
  double t60_lo = 1e9, t60_hi = -1e9, dist_lo = 1e9, dist_hi = -1e9;
  for (uint64_t seed = 0; seed < 2000; ++seed) {
    const RoomScenario sc = SampleScenario(seed, b);
    t60_lo = std::min(t60_lo, sc.target_t60);
    t60_hi = std::max(t60_hi, sc.target_t60);
    for (const Vec3& s : sc.source_positions) {
      const double d = Distance(s, sc.array_pose.position);
      dist_lo = std::min(dist_lo, d);
      dist_hi = std::max(dist_hi, d);
    }
  }
  CHECK(t60_lo >= b.t60_min);
  CHECK(t60_hi <= b.t60_max);
  CHECK(t60_lo < b.t60_min + 0.1);  // the sampler actually covers the range
  CHECK(t60_hi > b.t60_max - 0.1);
  CHECK(dist_lo >= b.source_dist_min);
  CHECK(dist_hi <= b.source_dist_max);
}

TEST_CASE("sampler determinism and exhaustion") {
  const RoomScenario a = SampleScenario(42), b = SampleScenario(42);
  CHECK(a.room_dims.x == b.room_dims.x);
  CHECK(a.array_pose.yaw == b.array_pose.yaw);
  REQUIRE(a.source_positions.size() == b.source_positions.size());
  for (size_t i = 0; i < a.source_positions.size(); ++i)
    CHECK(a.source_positions[i].x == b.source_positions[i].x);

  SamplerBounds impossible;
  impossible.source_dist_min = 20.0;  // no room is that large
  impossible.source_dist_max = 30.0;
  impossible.max_attempts = 200;
  CHECK_THROWS_AS(SampleScenario(1, impossible), SamplingError);

  SamplerBounds inverted;
  inverted.t60_min = 1.0;
  inverted.t60_max = 0.2;
  CHECK_THROWS_AS(SampleScenario(1, inverted), ConfigError);
}

TEST_CASE("direct path only: delay, amplitude, and perfect absorption") {
  // Mic 1.0 m from the source on the x axis.
  RoomScenario sc = FixedScenario();
  sc.source_positions = {{3.0, 2.0, 1.2}};
  const ArrayGeometry mono{Topology::kLinearUniform8, {{0, 0, 0}}, 0, {}};

  RirConfig cfg;
  cfg.max_order = 0;
  const Rir rir = SimulateRir(sc, mono, 0, cfg);
  REQUIRE(rir.num_mics() == 1);

  const double expected_delay = 16000.0 * 1.0 / 340.0;  // 47.06 samples
  const long peak = testing::PeakIndex(rir.samples_per_mic[0]);
  CHECK(std::abs(peak - expected_delay) <= 1.0);
  // Amplitude of the windowed-sinc peak tracks 1/(4 pi d).
  CHECK(rir.samples_per_mic[0][peak] ==
        doctest::Approx(1.0 / (4.0 * M_PI * 1.0)).epsilon(0.02));

  // Perfect absorption leaves exactly the direct path.
  RoomScenario dead = sc;
  dead.absorption = 1.0;
  RirConfig full;
  full.max_order = -1;
  const Rir rir_dead = SimulateRir(dead, mono, 0, full);
  const Rir rir_direct = SimulateRir(dead, mono, 0, cfg);
  REQUIRE(rir_dead.length() == rir_direct.length());
  for (long i = 0; i < rir_dead.length(); ++i)
    CHECK(rir_dead.samples_per_mic[0][i] ==
          doctest::Approx(rir_direct.samples_per_mic[0][i]).epsilon(1e-12));
}

TEST_CASE("inter-mic delays match the geometry for every mic") {
  RoomScenario sc = FixedScenario();
  sc.source_positions = {{4.5, 3.5, 1.5}};
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  RirConfig cfg;
  cfg.max_order = 0;
  const Rir rir = SimulateRir(sc, g, 0, cfg);
  const auto mics = PlaceArray(g, sc.array_pose, sc.room_dims);
  for (int m = 0; m < rir.num_mics(); ++m) {
    const double d = Distance(mics[m], sc.source_positions[0]);
    const double expected = 16000.0 * d / 340.0;
    CHECK(std::abs(testing::PeakIndex(rir.samples_per_mic[m]) - expected) <=
          1.0);
  }
}

TEST_CASE("Schroeder T60 lands within 25% of the Eyring prediction") {
  RoomScenario sc;
  sc.room_dims = {4.0, 5.0, 3.0};
  sc.absorption = 0.3;
  sc.target_t60 = testing::EyringT60Oracle(4.0, 5.0, 3.0, 0.3);
  sc.array_pose = {{1.5, 2.0, 1.3}, 0.0};
  sc.source_positions = {{3.0, 3.5, 1.6}};
  const ArrayGeometry mono{Topology::kLinearUniform8, {{0, 0, 0}}, 0, {}};
  const Rir rir = SimulateRir(sc, mono, 0, {});
  const double est = testing::SchroederT60(rir.samples_per_mic[0], 16000);
  const double predicted = sc.target_t60;
  CHECK(est > 0.0);
  CHECK(std::abs(est - predicted) / predicted < 0.25);
}

TEST_CASE("Eyring inversion is self-consistent") {
  const Vec3 room{4.0, 5.0, 3.0};
  for (double t60 : {0.2, 0.5, 1.0}) {
    const double alpha = EyringAbsorption(room, t60);
    CHECK(EyringT60(room, alpha) == doctest::Approx(t60).epsilon(1e-12));
    CHECK(testing::EyringT60Oracle(4.0, 5.0, 3.0, alpha) ==
          doctest::Approx(t60).epsilon(1e-12));
  }
}

TEST_CASE("rir errors") {
  const RoomScenario sc = FixedScenario();
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  CHECK_THROWS_AS(SimulateRir(sc, g, 7, {}), ParamError);

  RoomScenario outside = sc;
  outside.array_pose.position.x = 99.0;
  CHECK_THROWS_AS(SimulateRir(outside, g, 0, {}), PlacementError);

  RoomScenario lossless = sc;
  lossless.absorption = 0.0;
  CHECK_THROWS_AS(SimulateRir(lossless, g, 0, {}), ConfigError);
}

TEST_CASE("batch generation: determinism, cardinality, delays") {
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  SamplerBounds bounds;
  bounds.t60_max = 0.4;  // keep the image lattice small for the test
  RirConfig cfg;
  cfg.max_order = 2;
  const auto tmp = std::filesystem::temp_directory_path();
  const std::string dir_a = (tmp / "mcse_batch_a").string();
  const std::string dir_b = (tmp / "mcse_batch_b").string();
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  const BatchResult a = BatchGenerate(10, g, 7, dir_a, bounds, cfg, 1);
  const BatchResult b = BatchGenerate(10, g, 7, dir_b, bounds, cfg, 2);
  REQUIRE(a.items.size() == 10);
  REQUIRE(b.items.size() == 10);

  const Manifest ma = ReadManifest(a.manifest_path);
  const Manifest mb = ReadManifest(b.manifest_path);
  REQUIRE(ma.rows.size() == 10);
  // Manifest rows identical, payload bytes identical across runs and jobs.
  for (size_t i = 0; i < ma.rows.size(); ++i)
    CHECK(ma.rows[i].dump() == mb.rows[i].dump());
  for (const BatchItem& item : a.items) {
    std::ifstream fa((std::filesystem::path(dir_a) / item.file).string(),
                     std::ios::binary);
    std::ifstream fb((std::filesystem::path(dir_b) / item.file).string(),
                     std::ios::binary);
    REQUIRE(fa.good());
    REQUIRE(fb.good());
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(bytes_a == bytes_b);
    CHECK(!bytes_a.empty());
  }

  // Direct-path delays across the whole batch against the analytic oracle.
  for (const BatchItem& item : a.items) {
    const AudioBuffer wav =
        ReadWav((std::filesystem::path(dir_a) / item.file).string());
    const auto mics =
        PlaceArray(g, item.scenario.array_pose, item.scenario.room_dims);
    const Vec3 src = item.scenario.source_positions[item.source_index];
    for (int m = 0; m < wav.num_channels(); ++m) {
      const double d = Distance(mics[m], src);
      const double expected = 16000.0 * d / 340.0;
      // Onset threshold at half peak rejects later reflections.
      const long onset = testing::OnsetIndex(wav.data[m], 0.5);
      CHECK(std::abs(onset - expected) <= 1.0);
    }
    // Energy is finite and strictly positive on every channel.
    for (const auto& ch : wav.data) {
      double e = 0.0;
      for (double v : ch) e += v * v;
      CHECK(e > 0.0);
      CHECK(std::isfinite(e));
    }
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}
