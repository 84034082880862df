// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_EVALUATE_H_
#define MCSE_EVALUATE_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcse {

struct ClipMetrics {
  std::string clip_id;
  double sisnr_noisy = 0.0, sisnr_enhanced = 0.0;
  double stoi_noisy = 0.0, stoi_enhanced = 0.0;
  double estoi_noisy = 0.0, estoi_enhanced = 0.0;
  std::optional<double> pesq_noisy, pesq_enhanced;  // external tool only
};

struct MetricsReport {
  std::vector<ClipMetrics> rows;
  std::vector<std::string> missing;  // clip ids excluded from aggregates

  // Aggregate = arithmetic mean of the per-clip rows.
  ClipMetrics Aggregate() const;
  nlohmann::json ToJson() const;
};

struct EvaluateOptions {
  // External estimator hook: an executable invoked as `exe ref.wav deg.wav`
  // that prints a score; unset leaves the field blank.
  std::optional<std::string> pesq_executable;
  int sample_rate = 16000;
};

// Scores every manifest clip (noisy mixture and enhanced file against the
// clean reference). Enhanced files are looked up as
// <enhanced_dir>/<clip_id>.wav. Missing files land in `missing`.
MetricsReport EvaluateDataset(const std::string& manifest_path,
                              const std::string& enhanced_dir,
                              const EvaluateOptions& options = {});

// Subprocess adapter for the external quality estimator.
std::optional<double> RunExternalPesq(const std::string& executable,
                                      const std::string& reference_wav,
                                      const std::string& degraded_wav);

}  // namespace mcse

#endif  // MCSE_EVALUATE_H_
