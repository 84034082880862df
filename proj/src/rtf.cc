// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/rtf.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>
#include <vector>

#include "mcse/common.h"

namespace mcse {

RtfReport RtfReport::FromTimes(double processing_seconds,
                               double audio_seconds) {
  if (audio_seconds <= 0.0) throw ParamError("rtf: audio duration must be > 0");
  if (processing_seconds < 0.0)
    throw ParamError("rtf: processing time must be >= 0");
  RtfReport r;
  r.processing_seconds = processing_seconds;
  r.audio_seconds = audio_seconds;
  r.rtf = processing_seconds / audio_seconds;
  return r;
}

std::string MachineDescriptor() {
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    const auto pos = line.find("model name");
    if (pos != std::string::npos) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string name = line.substr(colon + 1);
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        return name + " (" + std::to_string(std::thread::hardware_concurrency()) +
               " hw threads)";
      }
    }
  }
  return "unknown cpu";
}

RtfReport MeasureRtf(
    const std::function<void(const MultichannelClip&)>& processor,
    const MultichannelClip& clip, int repetitions) {
  if (repetitions < 1) throw ParamError("rtf: repetitions must be >= 1");
  if (clip.num_samples() == 0 || clip.audio.sample_rate <= 0)
    throw InputError("rtf: empty clip");

  std::vector<double> times(repetitions);
  std::string failure;
  int completed = 0;
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      processor(clip);
    } catch (const std::exception& e) {
      failure = e.what();
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    times[r] = std::chrono::duration<double>(t1 - t0).count();
    ++completed;
  }
  if (completed == 0) throw Error("rtf: processor failed: " + failure);

  times.resize(completed);
  std::sort(times.begin(), times.end());
  const double median = completed % 2 == 1
                            ? times[completed / 2]
                            : 0.5 * (times[completed / 2 - 1] +
                                     times[completed / 2]);
  RtfReport report = RtfReport::FromTimes(
      median, static_cast<double>(clip.num_samples()) / clip.audio.sample_rate);
  report.repetitions = completed;
  report.machine = MachineDescriptor();
  if (!failure.empty())
    throw Error("rtf: processor failed after " + std::to_string(completed) +
                " runs (partial median " + std::to_string(report.rtf) +
                "): " + failure);
  return report;
}

}  // namespace mcse
