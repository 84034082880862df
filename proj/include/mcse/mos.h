// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_MOS_H_
#define MCSE_MOS_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcse {

// One rater's category judgments for one clip: overall quality, speech
// distortion, background-noise intrusiveness, each 1..5.
struct RatingRecord {
  std::string clip_id;
  std::string rater_id;
  int mos = 0;
  int smos = 0;
  int nmos = 0;
};

// CSV with header clip_id,rater_id,mos,smos,nmos.
std::vector<RatingRecord> ReadRatingsCsv(const std::string& path);

struct MosSummary {
  double mos = 0.0, smos = 0.0, nmos = 0.0;  // per-clip mean, then corpus mean
  double ci_halfwidth = 0.0;  // 95% two-sided t-interval on pooled MOS ratings
  std::optional<double> dmos, dsmos, dnmos;  // vs a noisy baseline
  int num_clips = 0;
  int num_ratings = 0;

  nlohmann::json ToJson() const;
};

// Aggregates ratings (validating every score; a bad record is named in the
// error). The optional baseline is aggregated the same way and subtracted
// for the delta scores. CI needs at least two ratings.
MosSummary AggregateMos(const std::vector<RatingRecord>& ratings,
                        const std::optional<std::vector<RatingRecord>>&
                            noisy_baseline = std::nullopt);

}  // namespace mcse

#endif  // MCSE_MOS_H_
