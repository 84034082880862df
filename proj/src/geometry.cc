// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/geometry.h"

#include <cmath>

#include "json.hpp"
#include "mcse/common.h"

namespace mcse {

using json = nlohmann::json;

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::string TopologyName(Topology t) {
  switch (t) {
    case Topology::kCircular16: return "circular16";
    case Topology::kLinearUniform8: return "linear-uniform8";
    case Topology::kLinearNonuniform8: return "linear-nonuniform8";
    case Topology::kDualLinear16: return "dual-linear16";
  }
  throw ParamError("geometry: unknown topology enum");
}

Topology TopologyFromName(const std::string& name) {
  if (name == "circular16") return Topology::kCircular16;
  if (name == "linear-uniform8") return Topology::kLinearUniform8;
  if (name == "linear-nonuniform8") return Topology::kLinearNonuniform8;
  if (name == "dual-linear16") return Topology::kDualLinear16;
  throw ParamError("geometry: unknown topology name: " + name);
}

namespace {

// Collinear mics along local x, centered on the array centroid.
std::vector<Vec3> CenteredLine(const std::vector<double>& coords) {
  double mean = 0.0;
  for (double c : coords) mean += c;
  mean /= static_cast<double>(coords.size());
  std::vector<Vec3> out;
  out.reserve(coords.size());
  for (double c : coords) out.push_back({c - mean, 0.0, 0.0});
  return out;
}

}  // namespace

ArrayGeometry BuildArray(Topology topology, const TopologyParams& params) {
  ArrayGeometry g;
  g.topology = topology;
  g.params = params;
  g.reference_mic = 0;

  switch (topology) {
    case Topology::kCircular16: {
      if (params.radius <= 0.0)
        throw ParamError("geometry: circular radius must be > 0");
      constexpr int kMics = 16;
      for (int k = 0; k < kMics; ++k) {
        const double angle = 2.0 * M_PI * k / kMics;  // mic 0 at angle 0
        g.mic_positions.push_back(
            {params.radius * std::cos(angle), params.radius * std::sin(angle),
             0.0});
      }
      break;
    }
    case Topology::kLinearUniform8: {
      if (params.spacing <= 0.0)
        throw ParamError("geometry: linear spacing must be > 0");
      std::vector<double> coords;
      for (int k = 0; k < 8; ++k) coords.push_back(k * params.spacing);
      g.mic_positions = CenteredLine(coords);
      break;
    }
    case Topology::kLinearNonuniform8: {
      if (params.gaps.size() != 7)
        throw ParamError("geometry: nonuniform array needs exactly 7 gaps");
      std::vector<double> coords = {0.0};
      for (double gap : params.gaps) {
        if (gap <= 0.0)
          throw ParamError("geometry: nonuniform gaps must be > 0");
        coords.push_back(coords.back() + gap);
      }
      g.mic_positions = CenteredLine(coords);
      break;
    }
    case Topology::kDualLinear16: {
      if (params.spacing <= 0.0 || params.dual_gap <= 0.0)
        throw ParamError("geometry: dual-linear spacing and gap must be > 0");
      // Sub-array A then sub-array B, collinear; channels 0..7 then 8..15.
      const double aperture = 7.0 * params.spacing;
      std::vector<double> coords;
      for (int k = 0; k < 8; ++k) coords.push_back(k * params.spacing);
      for (int k = 0; k < 8; ++k)
        coords.push_back(aperture + params.dual_gap + k * params.spacing);
      g.mic_positions = CenteredLine(coords);
      break;
    }
  }
  return g;
}

std::vector<Vec3> PlaceArray(const ArrayGeometry& geometry,
                             const ArrayPose& pose, const Vec3& room_dims) {
  const auto inside = [&](const Vec3& p) {
    return p.x > 0.0 && p.x < room_dims.x && p.y > 0.0 && p.y < room_dims.y &&
           p.z > 0.0 && p.z < room_dims.z;
  };
  if (!inside(pose.position))
    throw PlacementError("geometry: array pose outside room");

  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  std::vector<Vec3> out;
  out.reserve(geometry.mic_positions.size());
  for (const Vec3& m : geometry.mic_positions) {
    Vec3 p{c * m.x - s * m.y + pose.position.x,
           s * m.x + c * m.y + pose.position.y, m.z + pose.position.z};
    if (!inside(p))
      throw PlacementError("geometry: mic outside room after placement");
    out.push_back(p);
  }
  return out;
}

std::string GeometryToJson(const ArrayGeometry& geometry) {
  json j;
  j["topology"] = TopologyName(geometry.topology);
  j["reference_mic"] = geometry.reference_mic;
  j["params"] = {{"radius", geometry.params.radius},
                 {"spacing", geometry.params.spacing},
                 {"gaps", geometry.params.gaps},
                 {"dual_gap", geometry.params.dual_gap}};
  json mics = json::array();
  for (const Vec3& m : geometry.mic_positions)
    mics.push_back({m.x, m.y, m.z});
  j["mic_positions"] = mics;
  return j.dump();
}

ArrayGeometry GeometryFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("geometry: bad JSON: ") + e.what());
  }
  ArrayGeometry g;
  try {
    g.topology = TopologyFromName(j.at("topology").get<std::string>());
    g.reference_mic = j.at("reference_mic").get<int>();
    const json& p = j.at("params");
    g.params.radius = p.at("radius").get<double>();
    g.params.spacing = p.at("spacing").get<double>();
    g.params.gaps = p.at("gaps").get<std::vector<double>>();
    g.params.dual_gap = p.at("dual_gap").get<double>();
    for (const json& m : j.at("mic_positions"))
      g.mic_positions.push_back(
          {m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>()});
  } catch (const json::exception& e) {
    throw FormatError(std::string("geometry: missing field: ") + e.what());
  }
  return g;
}

}  // namespace mcse
