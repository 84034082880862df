// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/evaluate.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "mcse/common.h"
#include "mcse/manifest.h"
#include "mcse/metrics.h"
#include "mcse/wav.h"

namespace mcse {

using json = nlohmann::json;

ClipMetrics MetricsReport::Aggregate() const {
  ClipMetrics agg;
  agg.clip_id = "mean";
  if (rows.empty()) return agg;
  double pesq_n = 0.0, pesq_e = 0.0;
  int pesq_count = 0;
  for (const ClipMetrics& r : rows) {
    agg.sisnr_noisy += r.sisnr_noisy;
    agg.sisnr_enhanced += r.sisnr_enhanced;
    agg.stoi_noisy += r.stoi_noisy;
    agg.stoi_enhanced += r.stoi_enhanced;
    agg.estoi_noisy += r.estoi_noisy;
    agg.estoi_enhanced += r.estoi_enhanced;
    if (r.pesq_noisy && r.pesq_enhanced) {
      pesq_n += *r.pesq_noisy;
      pesq_e += *r.pesq_enhanced;
      ++pesq_count;
    }
  }
  const double n = static_cast<double>(rows.size());
  agg.sisnr_noisy /= n;
  agg.sisnr_enhanced /= n;
  agg.stoi_noisy /= n;
  agg.stoi_enhanced /= n;
  agg.estoi_noisy /= n;
  agg.estoi_enhanced /= n;
  if (pesq_count > 0) {
    agg.pesq_noisy = pesq_n / pesq_count;
    agg.pesq_enhanced = pesq_e / pesq_count;
  }
  return agg;
}

namespace {

json RowToJson(const ClipMetrics& r) {
  json j{{"clip_id", r.clip_id},
         {"sisnr_noisy", r.sisnr_noisy},
         {"sisnr_enhanced", r.sisnr_enhanced},
         {"stoi_noisy", r.stoi_noisy},
         {"stoi_enhanced", r.stoi_enhanced},
         {"estoi_noisy", r.estoi_noisy},
         {"estoi_enhanced", r.estoi_enhanced}};
  j["pesq_noisy"] = r.pesq_noisy ? json(*r.pesq_noisy) : json(nullptr);
  j["pesq_enhanced"] = r.pesq_enhanced ? json(*r.pesq_enhanced) : json(nullptr);
  return j;
}

}  // namespace

json MetricsReport::ToJson() const {
  json j;
  j["clips"] = json::array();
  for (const ClipMetrics& r : rows) j["clips"].push_back(RowToJson(r));
  j["aggregate"] = RowToJson(Aggregate());
  j["missing"] = missing;
  return j;
}

std::optional<double> RunExternalPesq(const std::string& executable,
                                      const std::string& reference_wav,
                                      const std::string& degraded_wav) {
  const std::string cmd =
      executable + " '" + reference_wav + "' '" + degraded_wav + "' 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return std::nullopt;
  std::string output;
  char buf[256];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) output += buf;
  const int status = pclose(pipe);
  if (status != 0) return std::nullopt;
  // The contract: the tool prints the score as the last token.
  double value = 0.0;
  const char* p = output.c_str();
  const char* last = nullptr;
  char* end = nullptr;
  for (const char* q = p; *q != '\0'; ++q) {
    if ((*q >= '0' && *q <= '9') || *q == '-' || *q == '+') {
      const double v = std::strtod(q, &end);
      if (end != q) {
        value = v;
        last = q;
        q = end - 1;
      }
    }
  }
  if (last == nullptr) return std::nullopt;
  return value;
}

MetricsReport EvaluateDataset(const std::string& manifest_path,
                              const std::string& enhanced_dir,
                              const EvaluateOptions& options) {
  const Manifest manifest = ReadManifest(manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();
  MetricsReport report;

  for (const json& row : manifest.rows) {
    if (row.value("status", "ok") != "ok") continue;
    const std::string clip_id = row.at("clip_id").get<std::string>();
    const auto mixture_path = base / row.at("mixture").get<std::string>();
    const auto reference_path = base / row.at("reference").get<std::string>();
    const auto enhanced_path =
        std::filesystem::path(enhanced_dir) / (clip_id + ".wav");

    if (!std::filesystem::exists(mixture_path) ||
        !std::filesystem::exists(reference_path) ||
        !std::filesystem::exists(enhanced_path)) {
      report.missing.push_back(clip_id);
      continue;
    }

    const AudioBuffer mixture = ReadWav(mixture_path.string());
    const AudioBuffer reference = ReadWav(reference_path.string());
    const AudioBuffer enhanced = ReadWav(enhanced_path.string());
    if (reference.num_channels() != 1 || enhanced.num_channels() != 1) {
      report.missing.push_back(clip_id);
      continue;
    }

    const std::vector<double>& ref = reference.data[0];
    const std::vector<double>& noisy = mixture.data[0];
    std::vector<double> enh = enhanced.data[0];
    if (enh.size() != ref.size() || noisy.size() != ref.size()) {
      report.missing.push_back(clip_id);
      continue;
    }

    ClipMetrics m;
    m.clip_id = clip_id;
    m.sisnr_noisy = SiSnrDb(noisy, ref);
    m.sisnr_enhanced = SiSnrDb(enh, ref);
    m.stoi_noisy = Stoi(noisy, ref, options.sample_rate, false);
    m.stoi_enhanced = Stoi(enh, ref, options.sample_rate, false);
    m.estoi_noisy = Stoi(noisy, ref, options.sample_rate, true);
    m.estoi_enhanced = Stoi(enh, ref, options.sample_rate, true);
    if (options.pesq_executable) {
      m.pesq_noisy = RunExternalPesq(*options.pesq_executable,
                                     reference_path.string(),
                                     mixture_path.string());
      m.pesq_enhanced = RunExternalPesq(*options.pesq_executable,
                                        reference_path.string(),
                                        enhanced_path.string());
    }
    report.rows.push_back(std::move(m));
  }
  return report;
}

}  // namespace mcse
