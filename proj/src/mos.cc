// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/mos.h"

#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mcse/common.h"

namespace mcse {

using json = nlohmann::json;

std::vector<RatingRecord> ReadRatingsCsv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("ratings: cannot open " + path);
  std::string line;
  if (!std::getline(f, line))
    throw FormatError("ratings: empty file: " + path);
  // Tolerate a UTF-8 BOM and whitespace in the header.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(), ::isspace),
               header.end());
  if (header != "clip_id,rater_id,mos,smos,nmos")
    throw FormatError("ratings: unexpected header '" + line + "'");

  std::vector<RatingRecord> out;
  long line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    RatingRecord rec;
    std::string field;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ','))
        throw FormatError("ratings: missing " + std::string(what) + " at " +
                          path + ":" + std::to_string(line_no));
      return field;
    };
    rec.clip_id = next("clip_id");
    rec.rater_id = next("rater_id");
    try {
      rec.mos = std::stoi(next("mos"));
      rec.smos = std::stoi(next("smos"));
      rec.nmos = std::stoi(next("nmos"));
    } catch (const std::exception&) {
      throw FormatError("ratings: non-integer score at " + path + ":" +
                        std::to_string(line_no));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

struct Corpus {
  double mos = 0.0, smos = 0.0, nmos = 0.0;
  int num_clips = 0, num_ratings = 0;
  std::vector<double> pooled_mos;
};

Corpus Summarize(const std::vector<RatingRecord>& ratings) {
  if (ratings.empty()) throw InputError("mos: no ratings");
  for (const RatingRecord& r : ratings) {
    auto check = [&](int v, const char* what) {
      if (v < 1 || v > 5)
        throw ParamError("mos: " + std::string(what) + "=" +
                         std::to_string(v) + " outside [1,5] for clip '" +
                         r.clip_id + "' rater '" + r.rater_id + "'");
    };
    check(r.mos, "mos");
    check(r.smos, "smos");
    check(r.nmos, "nmos");
  }

  std::map<std::string, std::array<double, 4>> per_clip;  // sums + count
  Corpus c;
  for (const RatingRecord& r : ratings) {
    auto& acc = per_clip[r.clip_id];
    acc[0] += r.mos;
    acc[1] += r.smos;
    acc[2] += r.nmos;
    acc[3] += 1.0;
    c.pooled_mos.push_back(r.mos);
  }
  for (const auto& [id, acc] : per_clip) {
    c.mos += acc[0] / acc[3];
    c.smos += acc[1] / acc[3];
    c.nmos += acc[2] / acc[3];
  }
  c.num_clips = static_cast<int>(per_clip.size());
  c.num_ratings = static_cast<int>(ratings.size());
  c.mos /= c.num_clips;
  c.smos /= c.num_clips;
  c.nmos /= c.num_clips;
  return c;
}

}  // namespace

MosSummary AggregateMos(
    const std::vector<RatingRecord>& ratings,
    const std::optional<std::vector<RatingRecord>>& noisy_baseline) {
  const Corpus c = Summarize(ratings);
  MosSummary s;
  s.mos = c.mos;
  s.smos = c.smos;
  s.nmos = c.nmos;
  s.num_clips = c.num_clips;
  s.num_ratings = c.num_ratings;

  if (c.num_ratings < 2)
    throw InputError("mos: confidence interval needs at least 2 ratings");
  // 95% two-sided t-interval over the pooled per-rating MOS scores.
  const long n = static_cast<long>(c.pooled_mos.size());
  double mean = 0.0;
  for (double v : c.pooled_mos) mean += v;
  mean /= n;
  double ssq = 0.0;
  for (double v : c.pooled_mos) ssq += (v - mean) * (v - mean);
  const double sd = std::sqrt(ssq / (n - 1));
  boost::math::students_t_distribution<double> dist(n - 1);
  const double t = boost::math::quantile(dist, 0.975);
  s.ci_halfwidth = t * sd / std::sqrt(static_cast<double>(n));

  if (noisy_baseline) {
    const Corpus b = Summarize(*noisy_baseline);
    s.dmos = c.mos - b.mos;
    s.dsmos = c.smos - b.smos;
    s.dnmos = c.nmos - b.nmos;
  }
  return s;
}

json MosSummary::ToJson() const {
  json j{{"mos", mos},
         {"smos", smos},
         {"nmos", nmos},
         {"ci_halfwidth", ci_halfwidth},
         {"num_clips", num_clips},
         {"num_ratings", num_ratings}};
  if (dmos) j["dmos"] = *dmos;
  if (dsmos) j["dsmos"] = *dsmos;
  if (dnmos) j["dnmos"] = *dnmos;
  return j;
}

}  // namespace mcse
