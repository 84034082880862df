// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/mixer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <thread>

#include "json.hpp"
#include "mcse/common.h"
#include "mcse/fft.h"
#include "mcse/manifest.h"

namespace mcse {

using json = nlohmann::json;

void MixtureSpec::Validate(double snr_min, double snr_max) const {
  if (!std::isfinite(snr_db))
    throw ParamError("mixture: snr_db must be finite");
  if (snr_db < snr_min || snr_db > snr_max)
    throw ParamError("mixture: snr_db " + std::to_string(snr_db) +
                     " outside [" + std::to_string(snr_min) + ", " +
                     std::to_string(snr_max) + "]");
  if (clip_seconds <= 0.0)
    throw ParamError("mixture: clip_seconds must be > 0");
}

MultichannelClip ConvolveMultichannel(const std::vector<double>& dry,
                                      int dry_sample_rate, const Rir& rir,
                                      long trim_len) {
  if (dry.empty()) throw InputError("convolve: empty dry signal");
  if (rir.num_mics() == 0) throw InputError("convolve: empty RIR");
  if (dry_sample_rate != rir.sample_rate)
    throw FormatError("convolve: sample rate mismatch (" +
                      std::to_string(dry_sample_rate) + " vs " +
                      std::to_string(rir.sample_rate) + ")");
  const long full = static_cast<long>(dry.size()) + rir.length() - 1;
  const long out_len = trim_len > 0 ? std::min(trim_len, full) : full;

  MultichannelClip clip;
  clip.audio.sample_rate = rir.sample_rate;
  clip.audio.data.resize(rir.num_mics());
  for (int ch = 0; ch < rir.num_mics(); ++ch) {
    std::vector<double> y = FftConvolve(dry, rir.samples_per_mic[ch]);
    y.resize(out_len);
    clip.audio.data[ch] = std::move(y);
  }
  return clip;
}

namespace {

double ChannelEnergy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

MultichannelClip MixAtSnr(const MultichannelClip& speech,
                          const MultichannelClip& noise, double snr_db,
                          int ref_channel) {
  if (!std::isfinite(snr_db))
    throw ParamError("mix: snr_db must be finite");
  if (speech.num_channels() != noise.num_channels() ||
      speech.num_samples() != noise.num_samples())
    throw ShapeError("mix: speech and noise shapes differ");
  if (speech.audio.sample_rate != noise.audio.sample_rate)
    throw FormatError("mix: sample rates differ");
  if (ref_channel < 0 || ref_channel >= speech.num_channels())
    throw ParamError("mix: bad reference channel");

  const double es = ChannelEnergy(speech.audio.data[ref_channel]);
  const double en = ChannelEnergy(noise.audio.data[ref_channel]);
  if (es <= 0.0 || en <= 0.0)
    throw InputError("mix: zero-energy reference channel");

  // One scalar for every noise channel; SNR is defined on the reference.
  const double scale = std::sqrt(es / (en * std::pow(10.0, snr_db / 10.0)));

  MultichannelClip out;
  out.audio.sample_rate = speech.audio.sample_rate;
  out.geometry_ref = speech.geometry_ref;
  out.provenance = speech.provenance;
  out.provenance.snr_db = snr_db;
  out.audio.data.resize(speech.num_channels());
  for (int ch = 0; ch < speech.num_channels(); ++ch) {
    const auto& s = speech.audio.data[ch];
    const auto& n = noise.audio.data[ch];
    std::vector<double> y(s.size());
    for (size_t i = 0; i < s.size(); ++i) y[i] = s[i] + scale * n[i];
    out.audio.data[ch] = std::move(y);
  }
  return out;
}

double EstimateSpeechSnrDb(const std::vector<double>& signal,
                           int sample_rate) {
  if (signal.empty()) throw InputError("vad: empty signal");
  const long frame = sample_rate / 40;  // 25 ms
  const long hop = sample_rate / 100;   // 10 ms
  std::vector<double> energies;
  for (long i = 0; i + frame <= static_cast<long>(signal.size()); i += hop) {
    double e = 0.0;
    for (long n = i; n < i + frame; ++n) e += signal[n] * signal[n];
    energies.push_back(e / frame);
  }
  if (energies.empty()) {
    double e = ChannelEnergy(signal) / signal.size();
    energies.push_back(e);
  }
  const double peak = *std::max_element(energies.begin(), energies.end());
  if (peak <= 0.0) return -std::numeric_limits<double>::infinity();
  // Frames within 15 dB of the peak count as speech, the rest as background.
  const double thresh = peak * std::pow(10.0, -1.5);
  double active = 0.0, background = 0.0;
  long na = 0, nb = 0;
  for (double e : energies) {
    if (e >= thresh) {
      active += e;
      ++na;
    } else {
      background += e;
      ++nb;
    }
  }
  if (na == 0) return -std::numeric_limits<double>::infinity();
  if (nb == 0 || background <= 0.0)
    return std::numeric_limits<double>::infinity();
  return Db((active / na) / (background / nb));
}

namespace {

struct RirEntry {
  std::string file;
  std::string geometry;
  int scenario_id = 0;
};

std::vector<double> PrepareSource(const std::vector<double>& src,
                                  long target_len, bool tile, Rng* rng) {
  const long len = static_cast<long>(src.size());
  if (len == target_len) return src;
  if (len > target_len) {
    const long offset = rng->UniformInt(0, static_cast<int>(len - target_len));
    return {src.begin() + offset, src.begin() + offset + target_len};
  }
  std::vector<double> out(target_len, 0.0);
  if (tile) {
    // Loop the material, then rotate by a random phase.
    const long phase = rng->UniformInt(0, static_cast<int>(len - 1));
    for (long i = 0; i < target_len; ++i) out[i] = src[(phase + i) % len];
  } else {
    const long offset = rng->UniformInt(0, static_cast<int>(target_len - len));
    std::copy(src.begin(), src.end(), out.begin() + offset);
  }
  return out;
}

std::vector<double> LoadMono(const std::string& path, int expected_rate) {
  AudioBuffer buf = ReadWav(path);
  if (buf.num_channels() != 1)
    throw FormatError("mixer: source must be mono: " + path);
  if (buf.sample_rate != expected_rate)
    throw FormatError("mixer: source rate " +
                      std::to_string(buf.sample_rate) + " != " +
                      std::to_string(expected_rate) + ": " + path);
  return buf.data[0];
}

}  // namespace

SynthesisResult SynthesizeDataset(const std::vector<MixtureSpec>& specs,
                                  const std::string& rir_manifest_path,
                                  const std::string& out_dir,
                                  const SynthesisOptions& options) {
  Manifest rir_manifest = ReadManifest(rir_manifest_path);
  const auto rir_dir = std::filesystem::path(rir_manifest_path).parent_path();
  std::map<std::string, RirEntry> rirs;
  for (const json& row : rir_manifest.rows) {
    RirEntry e;
    e.file = (rir_dir / row.at("file").get<std::string>()).string();
    e.geometry = row.value("geometry", "");
    e.scenario_id = row.value("scenario_id", 0);
    rirs[row.at("rir_id").get<std::string>()] = e;
  }

  // Check every referenced asset up front and report all misses at once.
  std::vector<std::string> missing;
  for (const MixtureSpec& spec : specs) {
    spec.Validate(options.snr_min_db, options.snr_max_db);
    if (!std::filesystem::exists(spec.speech_path))
      missing.push_back("speech:" + spec.speech_path);
    if (!std::filesystem::exists(spec.noise_path))
      missing.push_back("noise:" + spec.noise_path);
    for (const std::string& id : {spec.speech_rir_id, spec.noise_rir_id})
      if (rirs.find(id) == rirs.end()) missing.push_back("rir:" + id);
  }
  if (!missing.empty()) {
    std::string joined;
    for (const std::string& m : missing) joined += " " + m;
    throw ManifestError("synthesize: missing assets:" + joined);
  }

  std::filesystem::create_directories(out_dir);
  const int n = static_cast<int>(specs.size());
  std::vector<json> rows(n);
  std::vector<std::string> errors(n);
  std::atomic<int> skipped{0};

  auto work = [&](int i) {
    try {
      const MixtureSpec& spec = specs[i];
      Rng rng(spec.seed);
      char clip_id[32];
      std::snprintf(clip_id, sizeof(clip_id), "clip_%06d", i);

      const std::vector<double> speech_raw =
          LoadMono(spec.speech_path, options.sample_rate);
      json row{{"clip_id", clip_id},
               {"snr_db", spec.snr_db},
               {"clip_seconds", spec.clip_seconds},
               {"seed", spec.seed},
               {"speech", spec.speech_path},
               {"noise", spec.noise_path},
               {"speech_rir", spec.speech_rir_id},
               {"noise_rir", spec.noise_rir_id}};

      if (options.speech_gate_min_snr_db) {
        const double est =
            EstimateSpeechSnrDb(speech_raw, options.sample_rate);
        if (est <= *options.speech_gate_min_snr_db) {
          row["status"] = "gated";
          row["estimated_speech_snr_db"] = est;
          rows[i] = std::move(row);
          skipped.fetch_add(1);
          return;
        }
      }

      const std::vector<double> noise_raw =
          LoadMono(spec.noise_path, options.sample_rate);
      const long target =
          static_cast<long>(std::lround(spec.clip_seconds * options.sample_rate));
      const std::vector<double> speech =
          PrepareSource(speech_raw, target, /*tile=*/false, &rng);
      const std::vector<double> noise =
          PrepareSource(noise_raw, target, /*tile=*/true, &rng);

      const RirEntry& se = rirs.at(spec.speech_rir_id);
      const RirEntry& ne = rirs.at(spec.noise_rir_id);
      AudioBuffer swav = ReadWav(se.file);
      AudioBuffer nwav = ReadWav(ne.file);
      Rir speech_rir{swav.data, swav.sample_rate};
      Rir noise_rir{nwav.data, nwav.sample_rate};
      if (speech_rir.num_mics() != noise_rir.num_mics())
        throw ManifestError("synthesize: RIR channel counts differ for " +
                            std::string(clip_id));

      MultichannelClip rev_speech =
          ConvolveMultichannel(speech, options.sample_rate, speech_rir, target);
      MultichannelClip rev_noise =
          ConvolveMultichannel(noise, options.sample_rate, noise_rir, target);
      rev_speech.geometry_ref = se.geometry;

      MultichannelClip mixture =
          MixAtSnr(rev_speech, rev_noise, spec.snr_db, options.ref_channel);

      // Clipping policy: one common gain for mixture and reference.
      double peak = 0.0;
      for (const auto& ch : mixture.audio.data)
        for (double v : ch) peak = std::max(peak, std::abs(v));
      double norm = 1.0;
      if (options.normalize_peak && peak > 1.0) norm = 1.0 / peak;
      if (norm != 1.0) {
        for (auto& ch : mixture.audio.data)
          for (double& v : ch) v *= norm;
        for (auto& ch : rev_speech.audio.data)
          for (double& v : ch) v *= norm;
      }

      const double es = ChannelEnergy(rev_speech.audio.data[options.ref_channel]);
      double eres = 0.0;
      {
        const auto& mix = mixture.audio.data[options.ref_channel];
        const auto& ref = rev_speech.audio.data[options.ref_channel];
        for (size_t k = 0; k < mix.size(); ++k) {
          const double r = mix[k] - ref[k];
          eres += r * r;
        }
      }
      const double measured_snr = Db(es / eres);

      const std::string mix_name = std::string(clip_id) + ".wav";
      const std::string ref_name = std::string(clip_id) + "_ref.wav";
      WriteWavFloat32((std::filesystem::path(out_dir) / mix_name).string(),
                      mixture.audio);
      AudioBuffer ref_buf;
      ref_buf.sample_rate = options.sample_rate;
      ref_buf.data = {rev_speech.audio.data[options.ref_channel]};
      WriteWavFloat32((std::filesystem::path(out_dir) / ref_name).string(),
                      ref_buf);

      row["status"] = "ok";
      row["mixture"] = mix_name;
      row["reference"] = ref_name;
      row["geometry"] = se.geometry;
      row["channels"] = mixture.num_channels();
      row["sample_rate"] = options.sample_rate;
      row["measured_snr_db"] = measured_snr;
      row["normalization_scale"] = norm;
      rows[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
      });
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw Error("synthesize: clip " + std::to_string(i) + ": " + errors[i]);

  Manifest out;
  out.header = json{{"type", "header"},
                    {"tool", "synth"},
                    {"rir_manifest", rir_manifest_path},
                    {"sample_rate", options.sample_rate},
                    {"ref_channel", options.ref_channel},
                    {"normalize_peak", options.normalize_peak},
                    {"snr_range", {options.snr_min_db, options.snr_max_db}},
                    {"num_specs", n}};
  if (!options.config_echo.is_null())
    (*out.header)["config"] = options.config_echo;
  out.rows.assign(rows.begin(), rows.end());
  SynthesisResult result;
  result.manifest_path =
      (std::filesystem::path(out_dir) / "manifest.jsonl").string();
  result.num_written = n - skipped.load();
  result.num_skipped = skipped.load();
  WriteManifest(result.manifest_path, out);
  return result;
}

}  // namespace mcse
