// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_GEOMETRY_H_
#define MCSE_GEOMETRY_H_

#include <string>
#include <vector>

namespace mcse {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
double Distance(const Vec3& a, const Vec3& b);

// The three array designs plus the stacked dual-linear device. Channel
// numbering is 0-based internally; reports and docs use 1-based.
enum class Topology {
  kCircular16,
  kLinearUniform8,
  kLinearNonuniform8,
  kDualLinear16,
};

std::string TopologyName(Topology t);
Topology TopologyFromName(const std::string& name);

struct TopologyParams {
  double radius = 0.05;    // circular: mic ring radius, meters
  double spacing = 0.011;  // uniform linear: consecutive mic interval
  // Nonuniform linear: 7 consecutive gaps. The symmetric default is a
  // documented configuration choice, not a device measurement.
  std::vector<double> gaps = {0.02, 0.03, 0.05, 0.08, 0.05, 0.03, 0.02};
  double dual_gap = 0.05;  // dual-linear: gap between the two sub-arrays
};

struct ArrayGeometry {
  Topology topology = Topology::kLinearUniform8;
  std::vector<Vec3> mic_positions;  // array-local frame, meters
  int reference_mic = 0;            // channel 1 in 1-based reports
  TopologyParams params;

  int num_mics() const { return static_cast<int>(mic_positions.size()); }
};

// Builds mic coordinates for a topology. Deterministic; throws ParamError on
// non-positive dimensions or a gap list that is not exactly 7 entries.
ArrayGeometry BuildArray(Topology topology, const TopologyParams& params = {});

struct ArrayPose {
  Vec3 position;     // room frame, meters
  double yaw = 0.0;  // radians about the vertical axis
};

// Rigid transform into the room frame: rotate by yaw about z, then translate.
// Throws PlacementError if the pose or any transformed mic leaves the room.
std::vector<Vec3> PlaceArray(const ArrayGeometry& geometry,
                             const ArrayPose& pose, const Vec3& room_dims);

// JSON document {topology, params, reference_mic, mic_positions}. Loading
// preserves channel order exactly.
std::string GeometryToJson(const ArrayGeometry& geometry);
ArrayGeometry GeometryFromJson(const std::string& text);

}  // namespace mcse

#endif  // MCSE_GEOMETRY_H_
