// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end for the multichannel speech-enhancement pipeline:
//   gen-rirs   simulate room impulse responses for an array topology
//   synth      build noisy multichannel mixtures from specs + RIRs
//   train      fit the mask estimator on a synthesized dataset
//   enhance    run enhancement on a multichannel WAV (offline or streaming)
//   eval       score enhanced clips against a dataset manifest
//   rtf        measure the real-time factor of the streaming path
//   mos        aggregate subjective ratings

#include <filesystem>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcse/config.h"
#include "mcse/enhance.h"
#include "mcse/evaluate.h"
#include "mcse/manifest.h"
#include "mcse/mos.h"
#include "mcse/rtf.h"
#include "mcse/wav.h"

namespace {

using json = nlohmann::json;
using namespace mcse;

PipelineConfig LoadConfigOr(const std::string& path) {
  if (!path.empty()) return PipelineConfig::FromFile(path);
  const char* env = std::getenv("MCSE_CONFIG");
  if (env != nullptr && *env != '\0') return PipelineConfig::FromFile(env);
  return {};
}

PairSelection SelectionFor(const std::string& topology_flag, int channels) {
  if (!topology_flag.empty())
    return DefaultPairs(TopologyFromName(topology_flag));
  if (channels == 8) return DefaultPairs(Topology::kLinearUniform8);
  throw ConfigError(
      "cannot infer the pair selection from " + std::to_string(channels) +
      " channels; pass --topology (circular16 or dual-linear16 are ambiguous)");
}

StftConfig StftForModel(const PipelineConfig& cfg, const MaskNetConfig& model,
                        bool causal) {
  StftConfig stft = cfg.stft;
  stft.fft_size = 2 * (model.fft_bins - 1);
  stft.centered = !causal;
  stft.Validate();
  return stft;
}

int RunGenRirs(const std::string& config_path, const std::string& topology,
               int count, uint64_t seed, const std::string& out, int jobs,
               int sources, int max_order) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  if (!topology.empty()) cfg.topology = TopologyFromName(topology);
  if (sources > 0) cfg.roomsim.num_sources = sources;
  if (max_order >= -1) cfg.rir.max_order = max_order;
  const ArrayGeometry geometry = BuildArray(cfg.topology, cfg.geometry);
  BatchResult result =
      BatchGenerate(count, geometry, seed, out, cfg.roomsim, cfg.rir, jobs,
                    cfg.ToJson());
  std::cout << "wrote " << result.items.size() << " RIRs and "
            << result.manifest_path << "\n";
  return 0;
}

int RunSynth(const std::string& config_path, const std::string& specs_path,
             const std::string& rirs_path, const std::string& out, int jobs) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  Manifest specs_manifest = ReadManifest(specs_path);
  std::vector<MixtureSpec> specs;
  for (const json& row : specs_manifest.rows) {
    MixtureSpec spec;
    spec.speech_path = row.at("speech_path").get<std::string>();
    spec.noise_path = row.at("noise_path").get<std::string>();
    spec.speech_rir_id = row.at("speech_rir_id").get<std::string>();
    spec.noise_rir_id = row.at("noise_rir_id").get<std::string>();
    spec.snr_db = row.at("snr_db").get<double>();
    spec.clip_seconds = row.value("clip_seconds", 6.0);
    spec.seed = row.value("seed", 0ULL);
    specs.push_back(std::move(spec));
  }
  SynthesisOptions options = cfg.mixer;
  if (jobs > 0) options.jobs = jobs;
  options.config_echo = cfg.ToJson();
  SynthesisResult result = SynthesizeDataset(specs, rirs_path, out, options);
  std::cout << "wrote " << result.num_written << " clips ("
            << result.num_skipped << " gated) and " << result.manifest_path
            << "\n";
  return 0;
}

int RunTrain(const std::string& config_path, const std::string& train_path,
             const std::string& dev_path, const std::string& out,
             int epochs_override, double lr_override,
             const std::string& loss_override, int64_t seed_override) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  if (epochs_override > 0) cfg.train.epochs = epochs_override;
  if (lr_override > 0.0) cfg.train.lr = lr_override;
  if (!loss_override.empty()) cfg.train.loss = LossFromName(loss_override);
  if (seed_override >= 0) cfg.train.seed = static_cast<uint64_t>(seed_override);
  cfg.model.fft_bins = cfg.stft.num_bins();

  MaskNet<double> net(cfg.model);
  net.InitRandom(cfg.train.seed);
  StftConfig stft = cfg.stft;
  stft.Validate();
  TrainResult result =
      Train(&net, train_path, dev_path, cfg.train, stft, out + ".log.jsonl");
  json sidecar = cfg.train.ToJson();
  sidecar["stft"] = cfg.ToJson()["stft"];
  sidecar["best_dev_loss"] = result.best_dev_loss;
  sidecar["best_epoch"] = result.best_epoch;
  SaveCheckpoint(out, net, sidecar);
  std::cout << "best dev loss " << result.best_dev_loss << " at epoch "
            << result.best_epoch << "; checkpoint " << out << "\n";
  return 0;
}

int RunEnhance(const std::string& config_path, const std::string& model_path,
               const std::string& in, const std::string& out, bool streaming,
               const std::string& topology) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  const AudioBuffer input = ReadWav(in);
  const MaskNetConfig model_cfg = PeekCheckpoint(model_path);
  const StftConfig stft = StftForModel(cfg, model_cfg, streaming);
  const PairSelection selection =
      SelectionFor(topology, input.num_channels());

  MultichannelClip clip;
  clip.audio = input;
  std::vector<double> enhanced;
  if (streaming) {
    auto model = std::make_shared<MaskNet<float>>(LoadCheckpointFloat(model_path));
    enhanced = EnhanceClipStreaming(clip, model, selection, stft);
  } else {
    const MaskNet<double> model = LoadCheckpoint(model_path);
    enhanced = EnhanceClip(clip, model, selection, stft);
  }
  AudioBuffer out_buf;
  out_buf.sample_rate = input.sample_rate;
  out_buf.data = {enhanced};
  WriteWavFloat32(out, out_buf);
  std::cout << "wrote " << out << " (" << enhanced.size() << " samples)\n";
  return 0;
}

int RunEval(const std::string& config_path, const std::string& manifest,
            const std::string& enhanced_dir, const std::string& out,
            const std::string& pesq) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  EvaluateOptions options;
  options.sample_rate = cfg.stft.sample_rate;
  if (!pesq.empty())
    options.pesq_executable = pesq;
  else if (cfg.pesq_executable)
    options.pesq_executable = cfg.pesq_executable;
  MetricsReport report = EvaluateDataset(manifest, enhanced_dir, options);
  json doc = report.ToJson();
  doc["config"] = cfg.ToJson();
  if (out.empty())
    std::cout << doc.dump(2) << "\n";
  else
    WriteJsonFile(out, doc);
  const ClipMetrics agg = report.Aggregate();
  std::cout << "clips " << report.rows.size() << ", mean Si-SNR "
            << agg.sisnr_noisy << " -> " << agg.sisnr_enhanced
            << " dB, mean STOI " << agg.stoi_noisy << " -> "
            << agg.stoi_enhanced << "\n";
  if (!report.missing.empty()) {
    std::cerr << "missing clips:";
    for (const std::string& id : report.missing) std::cerr << " " << id;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

int RunRtf(const std::string& config_path, const std::string& model_path,
           const std::string& in, int reps, const std::string& topology,
           const std::string& out) {
  PipelineConfig cfg = LoadConfigOr(config_path);
  const AudioBuffer input = ReadWav(in);
  const MaskNetConfig model_cfg = PeekCheckpoint(model_path);
  const StftConfig stft = StftForModel(cfg, model_cfg, /*causal=*/true);
  const PairSelection selection =
      SelectionFor(topology, input.num_channels());
  auto model = std::make_shared<MaskNet<float>>(LoadCheckpointFloat(model_path));

  MultichannelClip clip;
  clip.audio = input;
  auto processor = [&](const MultichannelClip& c) {
    EnhanceClipStreaming(c, model, selection, stft);
  };
  RtfReport report = MeasureRtf(processor, clip, reps);
  json doc{{"processing_seconds", report.processing_seconds},
           {"audio_seconds", report.audio_seconds},
           {"rtf", report.rtf},
           {"repetitions", report.repetitions},
           {"machine", report.machine}};
  if (!out.empty()) WriteJsonFile(out, doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int RunMos(const std::string& ratings_path, const std::string& baseline_path,
           const std::string& out) {
  const std::vector<RatingRecord> ratings = ReadRatingsCsv(ratings_path);
  std::optional<std::vector<RatingRecord>> baseline;
  if (!baseline_path.empty()) baseline = ReadRatingsCsv(baseline_path);
  const MosSummary summary = AggregateMos(ratings, baseline);
  const json doc = summary.ToJson();
  if (!out.empty()) WriteJsonFile(out, doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multichannel far-field speech enhancement toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "pipeline configuration JSON (or $MCSE_CONFIG)");

  // gen-rirs
  auto* gen = app.add_subcommand("gen-rirs", "simulate room impulse responses");
  std::string gen_topology;
  int gen_count = 10;
  uint64_t gen_seed = 0;
  std::string gen_out;
  int gen_jobs = 1, gen_sources = 0, gen_max_order = -2;
  gen->add_option("--topology", gen_topology,
                  "circular16|linear-uniform8|linear-nonuniform8|dual-linear16");
  gen->add_option("--count", gen_count, "number of RIR files")->required();
  gen->add_option("--seed", gen_seed, "batch seed");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--jobs", gen_jobs, "worker threads");
  gen->add_option("--sources", gen_sources, "sources per scenario");
  gen->add_option("--max-order", gen_max_order, "image reflection order cap");

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize noisy mixtures");
  std::string synth_specs, synth_rirs, synth_out;
  int synth_jobs = 0;
  synth->add_option("--specs", synth_specs, "mixture specs JSONL")->required();
  synth->add_option("--rirs", synth_rirs, "RIR manifest JSONL")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--jobs", synth_jobs, "worker threads");

  // train
  auto* train = app.add_subcommand("train", "train the mask estimator");
  std::string train_train, train_dev, train_out, train_loss;
  int train_epochs = 0;
  double train_lr = 0.0;
  int64_t train_seed = -1;
  train->add_option("--train", train_train, "training manifest")->required();
  train->add_option("--dev", train_dev, "development manifest")->required();
  train->add_option("--out", train_out, "checkpoint path")->required();
  train->add_option("--epochs", train_epochs, "override epochs");
  train->add_option("--lr", train_lr, "override initial learning rate");
  train->add_option("--loss", train_loss, "neg_sisnr|mask_mse");
  train->add_option("--seed", train_seed, "override seed");

  // enhance
  auto* enh = app.add_subcommand("enhance", "enhance a multichannel WAV");
  std::string enh_model, enh_in, enh_out, enh_topology;
  bool enh_streaming = false;
  enh->add_option("--model", enh_model, "checkpoint")->required();
  enh->add_option("--in", enh_in, "input multichannel WAV")->required();
  enh->add_option("--out", enh_out, "output mono WAV")->required();
  enh->add_flag("--streaming", enh_streaming, "causal streaming path");
  enh->add_option("--topology", enh_topology, "array topology of the input");

  // eval
  auto* ev = app.add_subcommand("eval", "score enhanced clips");
  std::string eval_manifest, eval_dir, eval_out, eval_pesq;
  ev->add_option("--manifest", eval_manifest, "dataset manifest")->required();
  ev->add_option("--enhanced", eval_dir, "directory of enhanced WAVs")
      ->required();
  ev->add_option("--out", eval_out, "report JSON path");
  ev->add_option("--pesq", eval_pesq, "external scorer executable");

  // rtf
  auto* rtf = app.add_subcommand("rtf", "measure the real-time factor");
  std::string rtf_model, rtf_in, rtf_topology, rtf_out;
  int rtf_reps = 3;
  rtf->add_option("--model", rtf_model, "checkpoint")->required();
  rtf->add_option("--in", rtf_in, "input multichannel WAV")->required();
  rtf->add_option("--reps", rtf_reps, "repetitions (median taken)");
  rtf->add_option("--topology", rtf_topology, "array topology of the input");
  rtf->add_option("--out", rtf_out, "report JSON path");

  // mos
  auto* mos = app.add_subcommand("mos", "aggregate subjective ratings");
  std::string mos_ratings, mos_baseline, mos_out;
  mos->add_option("--ratings", mos_ratings, "ratings CSV")->required();
  mos->add_option("--baseline", mos_baseline, "noisy-baseline ratings CSV");
  mos->add_option("--out", mos_out, "summary JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed())
      return RunGenRirs(config_path, gen_topology, gen_count, gen_seed,
                        gen_out, gen_jobs, gen_sources, gen_max_order);
    if (synth->parsed())
      return RunSynth(config_path, synth_specs, synth_rirs, synth_out,
                      synth_jobs);
    if (train->parsed())
      return RunTrain(config_path, train_train, train_dev, train_out,
                      train_epochs, train_lr, train_loss, train_seed);
    if (enh->parsed())
      return RunEnhance(config_path, enh_model, enh_in, enh_out, enh_streaming,
                        enh_topology);
    if (ev->parsed())
      return RunEval(config_path, eval_manifest, eval_dir, eval_out, eval_pesq);
    if (rtf->parsed())
      return RunRtf(config_path, rtf_model, rtf_in, rtf_reps, rtf_topology,
                    rtf_out);
    if (mos->parsed()) return RunMos(mos_ratings, mos_baseline, mos_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
