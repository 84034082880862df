// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/enhance.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcse/common.h"
#include "mcse/fft.h"

namespace mcse {

double EstimatedSnr(const std::vector<double>& noisy,
                    const std::vector<double>& enhanced) {
  if (noisy.empty() || enhanced.size() != noisy.size())
    throw InputError("estimated snr: empty or mismatched signals");
  double ey = 0.0, er = 0.0;
  for (size_t i = 0; i < noisy.size(); ++i) {
    ey += enhanced[i] * enhanced[i];
    const double r = enhanced[i] - noisy[i];
    er += r * r;
  }
  const double rms_y = std::sqrt(ey / noisy.size());
  const double rms_r = std::sqrt(er / noisy.size());
  if (rms_r == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(rms_y / rms_r);
}

SelectionResult SelectArray(const std::vector<ArrayCandidate>& candidates) {
  if (candidates.empty()) throw InputError("select: no candidates");
  SelectionResult best;
  best.score_db = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (const ArrayCandidate& cand : candidates) {
    const double score = EstimatedSnr(cand.noisy, cand.enhanced);
    const bool wins =
        first || score > best.score_db ||
        (score == best.score_db && cand.array_id < best.array_id);
    if (wins) {
      best.array_id = cand.array_id;
      best.score_db = score;
      best.enhanced = &cand.enhanced;
      first = false;
    }
  }
  return best;
}

std::vector<double> EnhanceClip(const MultichannelClip& clip,
                                const MaskNet<double>& model,
                                const PairSelection& selection,
                                const StftConfig& stft_config) {
  selection.Validate(clip.num_channels());
  std::vector<Spectrogram> spectra;
  spectra.reserve(selection.channel_subset.size());
  for (int c : selection.channel_subset)
    spectra.push_back(Stft(clip.audio.data[c], stft_config));
  const FeatureTensor features = AssembleFeatures(spectra, selection);
  const ComplexMask mask = model.EstimateMask(features.values);
  const Spectrogram enhanced = ApplyMask(mask, spectra[0]);
  return Istft(enhanced);
}

// ---------------------------------------------------------------------------
// Streaming path
// ---------------------------------------------------------------------------

struct StreamingEnhancer::Impl {
  std::shared_ptr<const MaskNet<float>> model;
  PairSelection selection;
  StftConfig cfg;
  int frame = 0, hop = 0, nbins = 0;
  long pad_left = 0;

  std::vector<double> window;
  std::unique_ptr<RealFft> fft;

  // Per subset channel: FIFO of pending input (head index avoids erases).
  std::vector<std::vector<double>> fifo;
  size_t fifo_head = 0;

  // Overlap-add accumulators indexed in padded coordinates minus `base`.
  std::vector<double> acc, den;
  long base = 0;         // padded index of acc[0]
  long frames_done = 0;  // next frame index to process
  long emitted = 0;      // signal samples already emitted
  long total_fed = 0;

  MaskNet<float>::State state;
  std::vector<std::vector<std::complex<double>>> spectra;  // per channel, F
  VecX<float> feat_col, mask_col;
  std::vector<double> time_buf;
  std::vector<std::complex<double>> synth_col;

  void ProcessReadyFrames(long frame_limit, std::vector<double>* output);
  void EmitFinal(std::vector<double>* output, long frame_count);
};

StreamingEnhancer::StreamingEnhancer(
    std::shared_ptr<const MaskNet<float>> model,
    const PairSelection& selection, const StftConfig& stft_config)
    : impl_(new Impl) {
  stft_config.Validate();
  if (stft_config.centered)
    throw ConfigError(
        "streaming: centered padding needs future samples; use a causal "
        "configuration");
  if (!model) throw ParamError("streaming: null model");
  if (model->config().fft_bins != stft_config.num_bins())
    throw ShapeError("streaming: model bins != stft bins");

  impl_->model = std::move(model);
  impl_->selection = selection;
  impl_->cfg = stft_config;
  impl_->frame = stft_config.frame_samples();
  impl_->hop = stft_config.hop_samples();
  impl_->nbins = stft_config.num_bins();
  impl_->pad_left = impl_->frame - impl_->hop;
  impl_->window = MakeWindow(stft_config.window, impl_->frame);
  impl_->fft = std::make_unique<RealFft>(stft_config.fft_size);

  const size_t nch = selection.channel_subset.size();
  impl_->fifo.assign(nch, std::vector<double>(impl_->pad_left, 0.0));
  impl_->state = impl_->model->MakeState();
  impl_->spectra.assign(nch,
                        std::vector<std::complex<double>>(impl_->nbins));
  impl_->feat_col.resize(impl_->model->config().input_dim());
  impl_->mask_col.resize(impl_->model->config().output_dim());
  impl_->time_buf.resize(stft_config.fft_size);
  impl_->synth_col.resize(impl_->nbins);
}

StreamingEnhancer::~StreamingEnhancer() = default;

int StreamingEnhancer::num_input_channels() const {
  int max_ch = 0;
  for (int c : impl_->selection.channel_subset) max_ch = std::max(max_ch, c);
  return max_ch + 1;
}

void StreamingEnhancer::Impl::ProcessReadyFrames(long frame_limit,
                                                 std::vector<double>* output) {
  const int F = nbins;
  const size_t nch = fifo.size();
  while (frames_done < frame_limit) {
    // The fifo consumes `hop` entries per frame, so the current frame always
    // lives at buffer offset fifo_head.
    const long start = frames_done * hop;  // padded coordinates
    const long avail = static_cast<long>(fifo[0].size() - fifo_head);
    if (avail < frame) break;

    // Analysis per subset channel.
    std::vector<double>& tb = time_buf;
    for (size_t c = 0; c < nch; ++c) {
      const double* src = fifo[c].data() + fifo_head;
      for (int i = 0; i < frame; ++i) tb[i] = src[i] * window[i];
      std::fill(tb.begin() + frame, tb.end(), 0.0);
      fft->Forward(tb.data(), spectra[c].data());
    }

    // Feature column: Re/Im of channel 0, then cosIPD per pair.
    for (int k = 0; k < F; ++k) {
      feat_col(k) = static_cast<float>(spectra[0][k].real());
      feat_col(F + k) = static_cast<float>(spectra[0][k].imag());
    }
    for (int p = 0; p < 4; ++p) {
      const auto& [i, j] = selection.pairs[p];
      for (int k = 0; k < F; ++k) {
        const std::complex<double> prod =
            spectra[i][k] * std::conj(spectra[j][k]);
        feat_col((2 + p) * F + k) =
            static_cast<float>(std::cos(std::arg(prod)));
      }
    }

    model->Step(feat_col, &state, &mask_col);

    // Apply the mask to the reference-channel spectrum and resynthesize.
    for (int k = 0; k < F; ++k) {
      const double mr = mask_col(k), mi = mask_col(F + k);
      const std::complex<double>& x = spectra[0][k];
      synth_col[k] = {mr * x.real() - mi * x.imag(),
                      mr * x.imag() + mi * x.real()};
    }
    fft->Inverse(synth_col.data(), tb.data());

    const long off = start - base;
    if (off + frame > static_cast<long>(acc.size())) {
      acc.resize(off + frame, 0.0);
      den.resize(off + frame, 0.0);
    }
    for (int i = 0; i < frame; ++i) {
      acc[off + i] += window[i] * tb[i];
      den[off + i] += window[i] * window[i];
    }

    ++frames_done;
    fifo_head += hop;

    // Emit samples no future frame can touch: padded j < frames_done * hop.
    EmitFinal(output, frames_done);
  }

  // Compact consumed FIFO prefixes now and then.
  if (fifo_head > 1u << 15) {
    for (auto& f : fifo) f.erase(f.begin(), f.begin() + fifo_head);
    fifo_head = 0;
  }
}

void StreamingEnhancer::Impl::EmitFinal(std::vector<double>* output,
                                        long frame_count) {
  const long final_padded = frame_count * hop;  // exclusive
  long n = emitted;  // signal index
  while (n + pad_left < final_padded && n < total_fed) {
    const long j = n + pad_left - base;
    if (j < 0 || j >= static_cast<long>(acc.size())) break;
    output->push_back(den[j] > 0.0 ? acc[j] / den[j] : 0.0);
    ++n;
  }
  emitted = n;
  // Drop fully emitted accumulator prefix.
  const long keep_from = emitted + pad_left - base;
  if (keep_from > 1 << 15) {
    acc.erase(acc.begin(), acc.begin() + keep_from);
    den.erase(den.begin(), den.begin() + keep_from);
    base += keep_from;
  }
}

void StreamingEnhancer::Feed(const std::vector<const double*>& channels,
                             long count, std::vector<double>* output) {
  Impl& im = *impl_;
  const size_t nch = im.selection.channel_subset.size();
  for (size_t c = 0; c < nch; ++c) {
    const int src = im.selection.channel_subset[c];
    if (src >= static_cast<int>(channels.size()) || channels[src] == nullptr)
      throw InputError("streaming: missing channel " + std::to_string(src));
    im.fifo[c].insert(im.fifo[c].end(), channels[src], channels[src] + count);
  }
  im.total_fed += count;
  // Frames fully determined by input so far.
  const long have = im.pad_left + im.total_fed;
  const long frames_avail =
      have >= im.frame ? (have - im.frame) / im.hop + 1 : 0;
  im.ProcessReadyFrames(frames_avail, output);
}

void StreamingEnhancer::Flush(std::vector<double>* output) {
  Impl& im = *impl_;
  // Same frame set as the offline causal transform: ceil(len / hop).
  const long total_frames = (im.total_fed + im.hop - 1) / im.hop;
  const long missing =
      total_frames > 0
          ? std::max<long>(0, (total_frames - 1) * im.hop + im.frame -
                                  (im.pad_left + im.total_fed))
          : 0;
  for (auto& f : im.fifo) f.insert(f.end(), missing, 0.0);
  im.ProcessReadyFrames(total_frames, output);
  // Emit whatever remains (tail samples covered only by processed frames).
  long n = im.emitted;
  while (n < im.total_fed) {
    const long j = n + im.pad_left - im.base;
    if (j < 0 || j >= static_cast<long>(im.acc.size())) {
      output->push_back(0.0);
    } else {
      output->push_back(im.den[j] > 0.0 ? im.acc[j] / im.den[j] : 0.0);
    }
    ++n;
  }
  im.emitted = n;
}

std::vector<double> EnhanceClipStreaming(
    const MultichannelClip& clip, std::shared_ptr<const MaskNet<float>> model,
    const PairSelection& selection, const StftConfig& stft_config) {
  selection.Validate(clip.num_channels());
  StreamingEnhancer enhancer(std::move(model), selection, stft_config);
  std::vector<double> out;
  out.reserve(clip.num_samples());
  std::vector<const double*> ptrs(clip.num_channels());
  const long chunk = 1024;
  for (long pos = 0; pos < clip.num_samples(); pos += chunk) {
    const long n = std::min(chunk, clip.num_samples() - pos);
    for (int c = 0; c < clip.num_channels(); ++c)
      ptrs[c] = clip.audio.data[c].data() + pos;
    enhancer.Feed(ptrs, n, &out);
  }
  enhancer.Flush(&out);
  return out;
}

}  // namespace mcse
