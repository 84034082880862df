// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_RTF_H_
#define MCSE_RTF_H_

#include <functional>
#include <string>

#include "mcse/mixer.h"

namespace mcse {

struct RtfReport {
  double processing_seconds = 0.0;  // T_p, median wall clock
  double audio_seconds = 0.0;       // T_t
  double rtf = 0.0;                 // T_p / T_t
  int repetitions = 0;
  std::string machine;

  // The ratio arithmetic alone, for constructed (T_p, T_t) pairs.
  static RtfReport FromTimes(double processing_seconds, double audio_seconds);
};

// Runs the processor over the clip `repetitions` times in the calling thread
// (the harness spawns no workers of its own; keep the machine quiet for
// meaningful numbers) and reports the median wall-clock time against the
// clip duration.
RtfReport MeasureRtf(const std::function<void(const MultichannelClip&)>& processor,
                     const MultichannelClip& clip, int repetitions);

std::string MachineDescriptor();

}  // namespace mcse

#endif  // MCSE_RTF_H_
