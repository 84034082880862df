// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mcse/common.h"
#include "mcse/geometry.h"

using namespace mcse;

TEST_CASE("circular array: 16 mics on a 5 cm ring, first at angle zero") {
  const ArrayGeometry g = BuildArray(Topology::kCircular16);
  REQUIRE(g.num_mics() == 16);
  CHECK(g.mic_positions[0].x == doctest::Approx(0.05));
  CHECK(g.mic_positions[0].y == doctest::Approx(0.0));
  Vec3 centroid;
  for (const Vec3& m : g.mic_positions) centroid = centroid + m;
  CHECK(std::abs(centroid.x / 16) < 1e-12);
  CHECK(std::abs(centroid.y / 16) < 1e-12);
  CHECK(std::abs(centroid.z / 16) < 1e-12);
  for (const Vec3& m : g.mic_positions)
    CHECK(Distance(m, {0, 0, 0}) == doctest::Approx(0.05).epsilon(1e-12));
  // Equal angular spacing: consecutive chord lengths all agree.
  const double chord = Distance(g.mic_positions[0], g.mic_positions[1]);
  for (int k = 0; k < 16; ++k)
    CHECK(Distance(g.mic_positions[k], g.mic_positions[(k + 1) % 16]) ==
          doctest::Approx(chord).epsilon(1e-12));
  // Diametrically opposite mics sit 0.10 m apart.
  for (int k = 0; k < 8; ++k)
    CHECK(Distance(g.mic_positions[k], g.mic_positions[k + 8]) ==
          doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("uniform linear array: aperture 7 x 1.1 cm") {
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  REQUIRE(g.num_mics() == 8);
  CHECK(Distance(g.mic_positions.front(), g.mic_positions.back()) ==
        doctest::Approx(0.077).epsilon(1e-12));
  for (int k = 0; k + 1 < 8; ++k)
    CHECK(g.mic_positions[k + 1].x - g.mic_positions[k].x ==
          doctest::Approx(0.011).epsilon(1e-12));
}

TEST_CASE("nonuniform linear array: strictly increasing along one axis") {
  const ArrayGeometry g = BuildArray(Topology::kLinearNonuniform8);
  REQUIRE(g.num_mics() == 8);
  for (int k = 0; k + 1 < 8; ++k) {
    CHECK(g.mic_positions[k + 1].x > g.mic_positions[k].x);
    CHECK(g.mic_positions[k].y == 0.0);
    CHECK(g.mic_positions[k].z == 0.0);
  }
}

TEST_CASE("dual linear array: two sub-arrays with a gap") {
  TopologyParams params;
  params.dual_gap = 0.05;
  const ArrayGeometry g = BuildArray(Topology::kDualLinear16, params);
  REQUIRE(g.num_mics() == 16);
  // Sub-array A spacing, the configurable gap, then sub-array B spacing.
  for (int k = 0; k < 7; ++k)
    CHECK(g.mic_positions[k + 1].x - g.mic_positions[k].x ==
          doctest::Approx(0.011));
  CHECK(g.mic_positions[8].x - g.mic_positions[7].x == doctest::Approx(0.05));
  for (int k = 8; k < 15; ++k)
    CHECK(g.mic_positions[k + 1].x - g.mic_positions[k].x ==
          doctest::Approx(0.011));
}

TEST_CASE("parameter validation") {
  TopologyParams p;
  p.radius = -1.0;
  CHECK_THROWS_AS(BuildArray(Topology::kCircular16, p), ParamError);
  p = {};
  p.spacing = 0.0;
  CHECK_THROWS_AS(BuildArray(Topology::kLinearUniform8, p), ParamError);
  p = {};
  p.gaps = {0.1, 0.2};
  CHECK_THROWS_AS(BuildArray(Topology::kLinearNonuniform8, p), ParamError);
  p = {};
  p.gaps[3] = -0.01;
  CHECK_THROWS_AS(BuildArray(Topology::kLinearNonuniform8, p), ParamError);
}

TEST_CASE("placement: identity pose keeps local coordinates") {
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  const Vec3 room{5, 4, 3};
  const ArrayPose pose{{2.0, 2.0, 1.2}, 0.0};
  const auto placed = PlaceArray(g, pose, room);
  for (int k = 0; k < 8; ++k) {
    CHECK(placed[k].x == doctest::Approx(g.mic_positions[k].x + 2.0));
    CHECK(placed[k].y == doctest::Approx(2.0));
    CHECK(placed[k].z == doctest::Approx(1.2));
  }
}

TEST_CASE("placement: yaw of pi mirrors a linear array") {
  const ArrayGeometry g = BuildArray(Topology::kLinearUniform8);
  const auto placed = PlaceArray(g, {{2.0, 2.0, 1.2}, M_PI}, {5, 4, 3});
  for (int k = 0; k < 8; ++k)
    CHECK(placed[k].x ==
          doctest::Approx(2.0 - g.mic_positions[k].x).epsilon(1e-12));
}

TEST_CASE("placement preserves all pairwise distances") {
  Rng rng(3);
  for (Topology topo : {Topology::kCircular16, Topology::kLinearUniform8,
                        Topology::kLinearNonuniform8, Topology::kDualLinear16}) {
    const ArrayGeometry g = BuildArray(topo);
    for (int trial = 0; trial < 20; ++trial) {
      const ArrayPose pose{{rng.Uniform(1.0, 4.0), rng.Uniform(1.0, 3.0),
                            rng.Uniform(1.0, 1.5)},
                           rng.Uniform(0.0, 2.0 * M_PI)};
      const auto placed = PlaceArray(g, pose, {5, 4, 3});
      // Brute-force all-pairs check against the array-local distances.
      for (int a = 0; a < g.num_mics(); ++a)
        for (int b = a + 1; b < g.num_mics(); ++b) {
          const double local = Distance(g.mic_positions[a], g.mic_positions[b]);
          const double placed_d = Distance(placed[a], placed[b]);
          CHECK(std::abs(local - placed_d) < 1e-12);
        }
    }
  }
}

TEST_CASE("placement errors") {
  const ArrayGeometry g = BuildArray(Topology::kCircular16);
  CHECK_THROWS_AS(PlaceArray(g, {{9.0, 1.0, 1.0}, 0.0}, {5, 4, 3}),
                  PlacementError);
  // Pose inside but a mic pokes through the wall.
  CHECK_THROWS_AS(PlaceArray(g, {{0.01, 1.0, 1.0}, 0.0}, {5, 4, 3}),
                  PlacementError);
}

TEST_CASE("json serialization preserves channel order exactly") {
  for (Topology topo : {Topology::kCircular16, Topology::kLinearUniform8,
                        Topology::kLinearNonuniform8, Topology::kDualLinear16}) {
    const ArrayGeometry g = BuildArray(topo);
    const ArrayGeometry back = GeometryFromJson(GeometryToJson(g));
    REQUIRE(back.num_mics() == g.num_mics());
    CHECK(back.topology == g.topology);
    CHECK(back.reference_mic == g.reference_mic);
    for (int k = 0; k < g.num_mics(); ++k) {
      CHECK(back.mic_positions[k].x == g.mic_positions[k].x);
      CHECK(back.mic_positions[k].y == g.mic_positions[k].y);
      CHECK(back.mic_positions[k].z == g.mic_positions[k].z);
    }
  }
  CHECK_THROWS_AS(GeometryFromJson("not json"), FormatError);
  CHECK_THROWS_AS(GeometryFromJson("{}"), FormatError);
}
