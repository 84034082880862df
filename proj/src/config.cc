// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/config.h"

#include <set>

#include "mcse/common.h"
#include "mcse/manifest.h"

namespace mcse {

using json = nlohmann::json;

namespace {

// Applies `fn(key, value)` to each member of a section and rejects keys no
// handler claimed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {}

  template <typename T>
  void Get(const char* key, T* out) {
    known_.insert(key);
    if (j_.contains(key)) {
      try {
        *out = j_.at(key).get<T>();
      } catch (const json::exception& e) {
        throw ConfigError("config: bad value for " + name_ + "." + key + ": " +
                          e.what());
      }
    }
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items())
      if (known_.find(key) == known_.end())
        throw ConfigError("config: unknown key '" + key + "' in section '" +
                          name_ + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> known_;
};

}  // namespace

PipelineConfig PipelineConfig::FromJson(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  PipelineConfig cfg;
  static const std::set<std::string> kSections = {
      "geometry", "roomsim", "mixer", "stft",
      "features", "model",   "train", "evaluate"};
  for (const auto& [key, value] : doc.items())
    if (kSections.find(key) == kSections.end())
      throw ConfigError("config: unknown section '" + key + "'");

  if (doc.contains("geometry")) {
    Section s(doc["geometry"], "geometry");
    std::string topo = TopologyName(cfg.topology);
    s.Get("topology", &topo);
    cfg.topology = TopologyFromName(topo);
    s.Get("radius", &cfg.geometry.radius);
    s.Get("spacing", &cfg.geometry.spacing);
    s.Get("gaps", &cfg.geometry.gaps);
    s.Get("dual_gap", &cfg.geometry.dual_gap);
    s.Finish();
  }
  if (doc.contains("roomsim")) {
    Section s(doc["roomsim"], "roomsim");
    std::vector<double> rmin = {cfg.roomsim.room_min.x, cfg.roomsim.room_min.y,
                                cfg.roomsim.room_min.z};
    std::vector<double> rmax = {cfg.roomsim.room_max.x, cfg.roomsim.room_max.y,
                                cfg.roomsim.room_max.z};
    s.Get("room_min", &rmin);
    s.Get("room_max", &rmax);
    if (rmin.size() != 3 || rmax.size() != 3)
      throw ConfigError("config: roomsim.room_min/max need 3 entries");
    cfg.roomsim.room_min = {rmin[0], rmin[1], rmin[2]};
    cfg.roomsim.room_max = {rmax[0], rmax[1], rmax[2]};
    s.Get("array_height_min", &cfg.roomsim.array_height_min);
    s.Get("array_height_max", &cfg.roomsim.array_height_max);
    s.Get("source_height_min", &cfg.roomsim.source_height_min);
    s.Get("source_height_max", &cfg.roomsim.source_height_max);
    s.Get("source_dist_min", &cfg.roomsim.source_dist_min);
    s.Get("source_dist_max", &cfg.roomsim.source_dist_max);
    s.Get("min_source_angle_deg", &cfg.roomsim.min_source_angle_deg);
    s.Get("t60_min", &cfg.roomsim.t60_min);
    s.Get("t60_max", &cfg.roomsim.t60_max);
    s.Get("num_sources", &cfg.roomsim.num_sources);
    s.Get("wall_margin", &cfg.roomsim.wall_margin);
    s.Get("array_wall_margin", &cfg.roomsim.array_wall_margin);
    s.Get("max_attempts", &cfg.roomsim.max_attempts);
    s.Get("max_order", &cfg.rir.max_order);
    s.Get("speed_of_sound", &cfg.rir.speed_of_sound);
    s.Get("sample_rate", &cfg.rir.sample_rate);
    s.Get("tail_seconds", &cfg.rir.tail_seconds);
    s.Get("max_rir_seconds", &cfg.rir.max_rir_seconds);
    s.Get("frac_delay_taps", &cfg.rir.frac_delay_taps);
    std::string model = cfg.rir.absorption_model == AbsorptionModel::kDiffuse
                            ? "diffuse"
                            : "specular";
    s.Get("absorption_model", &model);
    if (model == "diffuse")
      cfg.rir.absorption_model = AbsorptionModel::kDiffuse;
    else if (model == "specular")
      cfg.rir.absorption_model = AbsorptionModel::kSpecular;
    else
      throw ConfigError("config: absorption_model must be diffuse or specular");
    s.Finish();
  }
  if (doc.contains("mixer")) {
    Section s(doc["mixer"], "mixer");
    s.Get("sample_rate", &cfg.mixer.sample_rate);
    s.Get("ref_channel", &cfg.mixer.ref_channel);
    s.Get("normalize_peak", &cfg.mixer.normalize_peak);
    double gate = -1.0;
    s.Get("speech_gate_min_snr_db", &gate);
    if (gate >= 0.0) cfg.mixer.speech_gate_min_snr_db = gate;
    s.Get("snr_min_db", &cfg.mixer.snr_min_db);
    s.Get("snr_max_db", &cfg.mixer.snr_max_db);
    s.Get("jobs", &cfg.mixer.jobs);
    s.Finish();
  }
  if (doc.contains("stft")) {
    Section s(doc["stft"], "stft");
    s.Get("frame_ms", &cfg.stft.frame_ms);
    s.Get("hop_ms", &cfg.stft.hop_ms);
    s.Get("fft_size", &cfg.stft.fft_size);
    s.Get("sample_rate", &cfg.stft.sample_rate);
    std::string window = cfg.stft.window == Window::kSqrtHann ? "sqrt-hann"
                                                              : "hann";
    s.Get("window", &window);
    if (window == "sqrt-hann")
      cfg.stft.window = Window::kSqrtHann;
    else if (window == "hann")
      cfg.stft.window = Window::kHann;
    else
      throw ConfigError("config: stft.window must be hann or sqrt-hann");
    s.Get("centered", &cfg.stft.centered);
    s.Finish();
  }
  if (doc.contains("features")) {
    Section s(doc["features"], "features");
    s.Get("normalize_utterance", &cfg.features.normalize_utterance);
    s.Finish();
  }
  if (doc.contains("model")) {
    Section s(doc["model"], "model");
    s.Get("fft_bins", &cfg.model.fft_bins);
    s.Get("hidden", &cfg.model.hidden);
    s.Get("layers", &cfg.model.layers);
    s.Get("mask_bound", &cfg.model.mask_bound);
    s.Finish();
  }
  if (doc.contains("train")) {
    Section s(doc["train"], "train");
    std::string loss = LossName(cfg.train.loss);
    s.Get("loss", &loss);
    cfg.train.loss = LossFromName(loss);
    s.Get("lr", &cfg.train.lr);
    s.Get("lr_patience", &cfg.train.lr_patience);
    s.Get("epochs", &cfg.train.epochs);
    s.Get("batch_clips", &cfg.train.batch_clips);
    uint64_t seed = cfg.train.seed;
    s.Get("seed", &seed);
    cfg.train.seed = seed;
    s.Get("adam_beta1", &cfg.train.adam_beta1);
    s.Get("adam_beta2", &cfg.train.adam_beta2);
    s.Get("adam_eps", &cfg.train.adam_eps);
    s.Get("grad_clip_norm", &cfg.train.grad_clip_norm);
    s.Finish();
  }
  if (doc.contains("evaluate")) {
    Section s(doc["evaluate"], "evaluate");
    std::string pesq;
    s.Get("pesq_executable", &pesq);
    if (!pesq.empty()) cfg.pesq_executable = pesq;
    s.Finish();
  }
  return cfg;
}

PipelineConfig PipelineConfig::FromFile(const std::string& path) {
  return FromJson(ReadJsonFile(path));
}

json PipelineConfig::ToJson() const {
  json j;
  j["geometry"] = {{"topology", TopologyName(topology)},
                   {"radius", geometry.radius},
                   {"spacing", geometry.spacing},
                   {"gaps", geometry.gaps},
                   {"dual_gap", geometry.dual_gap}};
  j["roomsim"] = {
      {"room_min", {roomsim.room_min.x, roomsim.room_min.y, roomsim.room_min.z}},
      {"room_max", {roomsim.room_max.x, roomsim.room_max.y, roomsim.room_max.z}},
      {"array_height_min", roomsim.array_height_min},
      {"array_height_max", roomsim.array_height_max},
      {"source_height_min", roomsim.source_height_min},
      {"source_height_max", roomsim.source_height_max},
      {"source_dist_min", roomsim.source_dist_min},
      {"source_dist_max", roomsim.source_dist_max},
      {"min_source_angle_deg", roomsim.min_source_angle_deg},
      {"t60_min", roomsim.t60_min},
      {"t60_max", roomsim.t60_max},
      {"num_sources", roomsim.num_sources},
      {"wall_margin", roomsim.wall_margin},
      {"array_wall_margin", roomsim.array_wall_margin},
      {"max_attempts", roomsim.max_attempts},
      {"max_order", rir.max_order},
      {"speed_of_sound", rir.speed_of_sound},
      {"sample_rate", rir.sample_rate},
      {"tail_seconds", rir.tail_seconds},
      {"max_rir_seconds", rir.max_rir_seconds},
      {"frac_delay_taps", rir.frac_delay_taps},
      {"absorption_model",
       rir.absorption_model == AbsorptionModel::kDiffuse ? "diffuse"
                                                         : "specular"}};
  j["mixer"] = {{"sample_rate", mixer.sample_rate},
                {"ref_channel", mixer.ref_channel},
                {"normalize_peak", mixer.normalize_peak},
                {"snr_min_db", mixer.snr_min_db},
                {"snr_max_db", mixer.snr_max_db},
                {"jobs", mixer.jobs}};
  if (mixer.speech_gate_min_snr_db)
    j["mixer"]["speech_gate_min_snr_db"] = *mixer.speech_gate_min_snr_db;
  j["stft"] = {{"frame_ms", stft.frame_ms},
               {"hop_ms", stft.hop_ms},
               {"fft_size", stft.fft_size},
               {"sample_rate", stft.sample_rate},
               {"window",
                stft.window == Window::kSqrtHann ? "sqrt-hann" : "hann"},
               {"centered", stft.centered}};
  j["features"] = {{"normalize_utterance", features.normalize_utterance}};
  j["model"] = {{"fft_bins", model.fft_bins},
                {"hidden", model.hidden},
                {"layers", model.layers},
                {"mask_bound", model.mask_bound}};
  j["train"] = train.ToJson();
  if (pesq_executable) j["evaluate"] = {{"pesq_executable", *pesq_executable}};
  return j;
}

}  // namespace mcse
