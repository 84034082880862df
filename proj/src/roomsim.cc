// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/roomsim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "json.hpp"
#include "mcse/common.h"
#include "mcse/manifest.h"
#include "mcse/wav.h"

namespace mcse {

using json = nlohmann::json;

void SamplerBounds::Validate() const {
  auto ordered = [](double lo, double hi) { return lo <= hi; };
  if (!ordered(room_min.x, room_max.x) || !ordered(room_min.y, room_max.y) ||
      !ordered(room_min.z, room_max.z))
    throw ConfigError("sampler: room bounds inverted");
  if (!ordered(array_height_min, array_height_max) ||
      !ordered(source_height_min, source_height_max) ||
      !ordered(source_dist_min, source_dist_max) || !ordered(t60_min, t60_max))
    throw ConfigError("sampler: min above max in bounds");
  if (num_sources < 1) throw ConfigError("sampler: need at least one source");
  if (max_attempts < 1) throw ConfigError("sampler: max_attempts must be >= 1");
}

double EyringAbsorption(const Vec3& room_dims, double t60) {
  if (t60 <= 0.0) throw ParamError("eyring: t60 must be > 0");
  const double volume = room_dims.x * room_dims.y * room_dims.z;
  const double surface = 2.0 * (room_dims.x * room_dims.y +
                                room_dims.x * room_dims.z +
                                room_dims.y * room_dims.z);
  return 1.0 - std::exp(-0.161 * volume / (surface * t60));
}

double EyringT60(const Vec3& room_dims, double absorption) {
  if (absorption <= 0.0 || absorption > 1.0)
    throw ParamError("eyring: absorption must be in (0, 1]");
  const double volume = room_dims.x * room_dims.y * room_dims.z;
  const double surface = 2.0 * (room_dims.x * room_dims.y +
                                room_dims.x * room_dims.z +
                                room_dims.y * room_dims.z);
  if (absorption == 1.0) return 0.0;
  return 0.161 * volume / (-surface * std::log(1.0 - absorption));
}

namespace {

double AngleBetweenDeg(const Vec3& a, const Vec3& b, const Vec3& apex) {
  const Vec3 u = a - apex, v = b - apex;
  const double nu = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  const double nv = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  double c = (u.x * v.x + u.y * v.y + u.z * v.z) / (nu * nv);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

}  // namespace

RoomScenario SampleScenario(uint64_t seed, const SamplerBounds& bounds) {
  bounds.Validate();
  Rng rng(seed);
  int attempts = 0;
  auto spend = [&]() {
    if (++attempts > bounds.max_attempts)
      throw SamplingError("sampler: constraints unsatisfiable after " +
                          std::to_string(bounds.max_attempts) + " attempts");
  };

  while (true) {
    spend();
    RoomScenario sc;
    sc.seed = seed;
    sc.room_dims = {rng.Uniform(bounds.room_min.x, bounds.room_max.x),
                    rng.Uniform(bounds.room_min.y, bounds.room_max.y),
                    rng.Uniform(bounds.room_min.z, bounds.room_max.z)};
    sc.target_t60 = rng.Uniform(bounds.t60_min, bounds.t60_max);
    sc.absorption = EyringAbsorption(sc.room_dims, sc.target_t60);

    const double am = bounds.array_wall_margin;
    if (sc.room_dims.x <= 2 * am || sc.room_dims.y <= 2 * am) continue;
    const double array_z_max =
        std::min(bounds.array_height_max, sc.room_dims.z - am);
    if (array_z_max < bounds.array_height_min) continue;
    sc.array_pose.position = {rng.Uniform(am, sc.room_dims.x - am),
                              rng.Uniform(am, sc.room_dims.y - am),
                              rng.Uniform(bounds.array_height_min, array_z_max)};
    sc.array_pose.yaw = rng.Uniform(0.0, 2.0 * M_PI);

    const double sm = bounds.wall_margin;
    bool ok = true;
    for (int s = 0; s < bounds.num_sources && ok; ++s) {
      bool placed = false;
      while (!placed) {
        if (attempts >= bounds.max_attempts) {
          ok = false;
          break;
        }
        spend();
        const double src_z_max =
            std::min(bounds.source_height_max, sc.room_dims.z - sm);
        if (src_z_max < bounds.source_height_min) {
          ok = false;
          break;
        }
        Vec3 p{rng.Uniform(sm, sc.room_dims.x - sm),
               rng.Uniform(sm, sc.room_dims.y - sm),
               rng.Uniform(bounds.source_height_min, src_z_max)};
        const double dist = Distance(p, sc.array_pose.position);
        if (dist < bounds.source_dist_min || dist > bounds.source_dist_max)
          continue;
        bool angle_ok = true;
        for (const Vec3& other : sc.source_positions)
          if (AngleBetweenDeg(p, other, sc.array_pose.position) <=
              bounds.min_source_angle_deg) {
            angle_ok = false;
            break;
          }
        if (!angle_ok) continue;
        sc.source_positions.push_back(p);
        placed = true;
      }
    }
    if (ok && static_cast<int>(sc.source_positions.size()) ==
                  bounds.num_sources)
      return sc;
  }
}

void RirConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("rir: sample_rate must be > 0");
  if (speed_of_sound <= 0.0) throw ConfigError("rir: speed of sound <= 0");
  if (tail_seconds < 0.0 || max_rir_seconds <= 0.0)
    throw ConfigError("rir: bad length bounds");
  if (frac_delay_taps < 3 || (frac_delay_taps & 1) == 0)
    throw ConfigError("rir: fractional-delay taps must be odd >= 3");
}

namespace {

struct AxisImage {
  double coord;
  double refl;
  int order;
};

// Per-axis image coordinates with accumulated reflection losses. Walls at 0
// and L share one coefficient (uniform absorption).
std::vector<AxisImage> AxisImages(double source, double room, double beta,
                                  int n_max, int order_cap) {
  std::vector<AxisImage> out;
  for (int m = -n_max; m <= n_max; ++m) {
    for (int q = 0; q <= 1; ++q) {
      const int order = std::abs(m - q) + std::abs(m);
      if (order_cap >= 0 && order > order_cap) continue;
      AxisImage img;
      img.coord = (1 - 2 * q) * source + 2.0 * m * room;
      img.refl = std::pow(beta, std::abs(m - q)) * std::pow(beta, std::abs(m));
      img.order = order;
      out.push_back(img);
    }
  }
  return out;
}

}  // namespace

Rir SimulateRir(const RoomScenario& scenario, const ArrayGeometry& geometry,
                int source_index, const RirConfig& config) {
  config.Validate();
  if (source_index < 0 ||
      source_index >= static_cast<int>(scenario.source_positions.size()))
    throw ParamError("rir: source index out of range");
  if (scenario.absorption <= 0.0 || scenario.absorption > 1.0)
    throw ConfigError("rir: absorption must be in (0, 1]");
  if (scenario.absorption < 1e-6 && config.max_order < 0)
    throw ConfigError("rir: zero absorption with unbounded order");

  const std::vector<Vec3> mics =
      PlaceArray(geometry, scenario.array_pose, scenario.room_dims);
  const Vec3 src = scenario.source_positions[source_index];
  if (src.x <= 0 || src.x >= scenario.room_dims.x || src.y <= 0 ||
      src.y >= scenario.room_dims.y || src.z <= 0 ||
      src.z >= scenario.room_dims.z)
    throw PlacementError("rir: source outside room");

  const double fs = config.sample_rate;
  const double c = config.speed_of_sound;
  const int half = (config.frac_delay_taps - 1) / 2;

  // Response long enough for the T60 tail (or the order cap) plus the
  // direct-path delay and the sinc support.
  double len_sec =
      std::min(config.max_rir_seconds, scenario.target_t60 + config.tail_seconds);
  double max_direct = 0.0;
  for (const Vec3& m : mics) max_direct = std::max(max_direct, Distance(m, src));
  len_sec = std::max(len_sec, max_direct / c + 2.0 * (half + 2) / fs +
                                  config.tail_seconds);
  long length = static_cast<long>(std::ceil(len_sec * fs));

  const bool diffuse =
      config.absorption_model == AbsorptionModel::kDiffuse;
  // Specular model: pressure reflection coefficient per wall hit. Diffuse
  // model: per-image pressure attenuation exp(k * d) with
  // k = ln(1 - absorption) * S / (8V), the Eyring decay along the path.
  const double beta =
      diffuse ? 1.0 : std::sqrt(1.0 - scenario.absorption);
  const double volume =
      scenario.room_dims.x * scenario.room_dims.y * scenario.room_dims.z;
  const double surface = 2.0 * (scenario.room_dims.x * scenario.room_dims.y +
                                scenario.room_dims.x * scenario.room_dims.z +
                                scenario.room_dims.y * scenario.room_dims.z);
  const double diffuse_k =
      std::log(1.0 - std::min(scenario.absorption, 1.0)) * surface /
      (8.0 * volume);  // -inf at full absorption; exp(-inf * d) == 0

  const double reach = c * (static_cast<double>(length) + half + 1) / fs;
  auto lattice_n = [&](double room_l) {
    return static_cast<int>(std::ceil(reach / (2.0 * room_l))) + 1;
  };
  const auto xs = AxisImages(src.x, scenario.room_dims.x, beta,
                             lattice_n(scenario.room_dims.x), config.max_order);
  const auto ys = AxisImages(src.y, scenario.room_dims.y, beta,
                             lattice_n(scenario.room_dims.y), config.max_order);
  const auto zs = AxisImages(src.z, scenario.room_dims.z, beta,
                             lattice_n(scenario.room_dims.z), config.max_order);

  Rir rir;
  rir.sample_rate = config.sample_rate;
  rir.samples_per_mic.assign(mics.size(), std::vector<double>(length, 0.0));

  const double max_reach2 = reach * reach;
  const double win_k = M_PI / (half + 1);
  for (const AxisImage& ix : xs) {
    for (const AxisImage& iy : ys) {
      const int oxy = ix.order + iy.order;
      if (config.max_order >= 0 && oxy > config.max_order) continue;
      for (const AxisImage& iz : zs) {
        const int order = oxy + iz.order;
        if (config.max_order >= 0 && order > config.max_order) continue;
        const double refl = ix.refl * iy.refl * iz.refl;
        if (refl == 0.0) continue;
        for (size_t mic = 0; mic < mics.size(); ++mic) {
          const double dx = ix.coord - mics[mic].x;
          const double dy = iy.coord - mics[mic].y;
          const double dz = iz.coord - mics[mic].z;
          const double d2 = dx * dx + dy * dy + dz * dz;
          if (d2 > max_reach2) continue;
          double dist = std::sqrt(d2);
          dist = std::max(dist, 1e-2);  // source essentially on the mic
          const double delay = dist * fs / c;
          double gain = refl;
          if (diffuse && order > 0) gain = std::exp(diffuse_k * dist);
          if (gain == 0.0) continue;
          const double amp = gain / (4.0 * M_PI * dist);

          const long t0 = std::lround(delay) - half;
          const double sin_frac = std::sin(M_PI * (t0 - delay));
          double* h = rir.samples_per_mic[mic].data();
          double sign = 1.0;
          for (int n = 0; n < config.frac_delay_taps; ++n, sign = -sign) {
            const long t = t0 + n;
            if (t < 0 || t >= length) continue;
            const double tau = static_cast<double>(t) - delay;
            double snc;
            if (std::abs(tau) < 1e-9) {
              snc = 1.0;
            } else {
              snc = sign * sin_frac / (M_PI * tau);
            }
            const double w = 0.5 * (1.0 + std::cos(win_k * tau));
            h[t] += amp * w * snc;
          }
        }
      }
    }
  }
  return rir;
}

namespace {

json Vec3ToJson(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 Vec3FromJson(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json ScenarioToJson(const RoomScenario& sc) {
  json j;
  j["room_dims"] = Vec3ToJson(sc.room_dims);
  j["target_t60"] = sc.target_t60;
  j["absorption"] = sc.absorption;
  j["array_position"] = Vec3ToJson(sc.array_pose.position);
  j["array_yaw"] = sc.array_pose.yaw;
  json sources = json::array();
  for (const Vec3& s : sc.source_positions) sources.push_back(Vec3ToJson(s));
  j["source_positions"] = sources;
  j["seed"] = sc.seed;
  return j;
}

}  // namespace

BatchResult BatchGenerate(int num_rirs, const ArrayGeometry& geometry,
                          uint64_t seed, const std::string& out_dir,
                          const SamplerBounds& bounds, const RirConfig& config,
                          int jobs, const nlohmann::json& config_echo) {
  if (num_rirs < 1) throw ParamError("batch: num_rirs must be >= 1");
  bounds.Validate();
  config.Validate();
  std::filesystem::create_directories(out_dir);

  const int per_scenario = bounds.num_sources;
  const int num_scenarios = (num_rirs + per_scenario - 1) / per_scenario;

  std::vector<BatchItem> items(num_rirs);
  std::vector<std::string> errors(num_scenarios);

  auto work = [&](int scenario_id) {
    try {
      // Per-item seeding keeps results independent of the worker schedule.
      Rng item_rng = Rng::ForItem(seed, static_cast<uint64_t>(scenario_id));
      const uint64_t scenario_seed = item_rng.NextU64();
      RoomScenario sc = SampleScenario(scenario_seed, bounds);
      for (int s = 0; s < per_scenario; ++s) {
        const int index = scenario_id * per_scenario + s;
        if (index >= num_rirs) break;
        Rir rir = SimulateRir(sc, geometry, s, config);
        char name[64];
        std::snprintf(name, sizeof(name), "rir_%06d.wav", index);
        AudioBuffer buf;
        buf.sample_rate = rir.sample_rate;
        buf.data = rir.samples_per_mic;
        WriteWavFloat32(
            (std::filesystem::path(out_dir) / name).string(), buf);
        BatchItem& item = items[index];
        item.file = name;
        char id[32];
        std::snprintf(id, sizeof(id), "rir_%06d", index);
        item.rir_id = id;
        item.scenario_id = scenario_id;
        item.source_index = s;
        item.scenario = sc;
      }
    } catch (const std::exception& e) {
      errors[scenario_id] = e.what();
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < num_scenarios; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < num_scenarios;
             i = next.fetch_add(1))
          work(i);
      });
    for (auto& t : pool) t.join();
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw IoError("batch: " + err);

  Manifest manifest;
  manifest.header = json{{"type", "header"},
                         {"tool", "gen-rirs"},
                         {"seed", seed},
                         {"num_rirs", num_rirs},
                         {"geometry", json::parse(GeometryToJson(geometry))},
                         {"sample_rate", config.sample_rate},
                         {"speed_of_sound", config.speed_of_sound},
                         {"max_order", config.max_order},
                         {"t60_range", {bounds.t60_min, bounds.t60_max}},
                         {"num_sources", bounds.num_sources}};
  if (!config_echo.is_null()) (*manifest.header)["config"] = config_echo;
  for (const BatchItem& item : items) {
    json row = ScenarioToJson(item.scenario);
    row["rir_id"] = item.rir_id;
    row["file"] = item.file;
    row["scenario_id"] = item.scenario_id;
    row["source_index"] = item.source_index;
    row["geometry"] = TopologyName(geometry.topology);
    manifest.rows.push_back(std::move(row));
  }
  BatchResult result;
  result.items = std::move(items);
  result.manifest_path =
      (std::filesystem::path(out_dir) / "manifest.jsonl").string();
  WriteManifest(result.manifest_path, manifest);
  return result;
}

}  // namespace mcse
