// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_RESAMPLE_H_
#define MCSE_RESAMPLE_H_

#include <vector>

namespace mcse {

// Kaiser-windowed lowpass prototype (beta 5.0, 10*max(up,down) taps per
// side), unity DC gain before the `up` factor. Matches the conventional
// polyphase design used by scientific toolkits, so fixture scores generated
// with one are directly comparable.
std::vector<double> DesignResampleFilter(int up, int down);

// Rational-rate polyphase resampling: output length ceil(n * up / down),
// aligned so y[m] sits at input time m * down / up.
std::vector<double> ResamplePoly(const std::vector<double>& x, int up,
                                 int down);

}  // namespace mcse

#endif  // MCSE_RESAMPLE_H_
