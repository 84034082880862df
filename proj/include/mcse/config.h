// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_CONFIG_H_
#define MCSE_CONFIG_H_

#include <string>

#include "json.hpp"
#include "mcse/enhance.h"
#include "mcse/evaluate.h"
#include "mcse/features.h"
#include "mcse/mixer.h"
#include "mcse/model.h"
#include "mcse/roomsim.h"
#include "mcse/spectral.h"
#include "mcse/train.h"

namespace mcse {

// Declarative configuration document with one section per pipeline stage.
// Every module default is overridable; unknown keys are rejected so typos
// fail loudly. The effective document is echoed into output manifests.
struct PipelineConfig {
  Topology topology = Topology::kLinearUniform8;
  TopologyParams geometry;
  SamplerBounds roomsim;
  RirConfig rir;
  SynthesisOptions mixer;
  StftConfig stft;
  FeatureOptions features;
  MaskNetConfig model;
  TrainConfig train;
  std::optional<std::string> pesq_executable;

  static PipelineConfig FromJson(const nlohmann::json& doc);
  static PipelineConfig FromFile(const std::string& path);
  nlohmann::json ToJson() const;
};

}  // namespace mcse

#endif  // MCSE_CONFIG_H_
