#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vsidiag/signal_model.hpp"
#include "vsidiag/stft.hpp"

namespace vsidiag {

// Frames with a vanishing fundamental report this cap instead of a ratio.
inline constexpr double kFundamentalFloor = 1e-6;   // A
inline constexpr double kDistortionCap = 10.0;
inline constexpr unsigned kDefaultMaxHarmonic = 50;
// Within a detected fault interval, summary means are taken over the frames
// whose distortion reaches this fraction of the interval peak, so they track
// the plateau rather than the window-smeared transitions.
inline constexpr double kCoreTwdFraction = 0.9;

namespace detail {

// Time-domain statistics run inside a slice. When a fundamental is given,
// the run covers the smallest whole number of cycles that also spans a whole
// number of samples (largest whole-cycle count as fallback), centered in the
// slice. Whole cycles keep the statistics free of partial-cycle bias.
struct SliceStat {
    std::size_t offset = 0;
    std::size_t length = 0;
};

inline SliceStat stat_run(const WindowSpec& window, double sample_rate, double fundamental) {
    SliceStat run{0, window.length};
    if (!(fundamental > 0.0)) return run;
    const double per_cycle = sample_rate / fundamental;
    const auto max_cycles = static_cast<unsigned>(std::floor(window.length / per_cycle));
    std::size_t len = 0;
    for (unsigned c = 1; c <= max_cycles; ++c) {
        const double span = per_cycle * c;
        if (std::abs(span - std::round(span)) < 1e-6) {
            len = static_cast<std::size_t>(std::llround(span));
            break;
        }
    }
    if (len == 0 && max_cycles >= 1)
        len = static_cast<std::size_t>(std::llround(per_cycle * max_cycles));
    if (len >= 1 && len <= window.length) {
        run.length = len;
        run.offset = (window.length - len) / 2;
    }
    return run;
}

}  // namespace detail

// Root-mean-square of each raw windowed slice. With a positive `fundamental`
// the statistic is taken over whole fundamental cycles within the slice.
inline std::vector<double> inst_rms(std::span<const double> signal, const WindowSpec& window,
                                    double sample_rate = 0.0, double fundamental = 0.0) {
    window.validate();
    if (signal.size() < window.length)
        throw std::invalid_argument("inst_rms: signal shorter than one window");
    const auto run = detail::stat_run(window, sample_rate, fundamental);
    const std::size_t n_frames = (signal.size() - window.length) / window.hop + 1;
    std::vector<double> out(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t off = k * window.hop + run.offset;
        double acc = 0.0;
        for (std::size_t i = 0; i < run.length; ++i) acc += signal[off + i] * signal[off + i];
        out[k] = std::sqrt(acc / static_cast<double>(run.length));
    }
    return out;
}

// Arithmetic mean of each raw windowed slice, cycle-trimmed as above.
inline std::vector<double> inst_average(std::span<const double> signal, const WindowSpec& window,
                                        double sample_rate = 0.0, double fundamental = 0.0) {
    window.validate();
    if (signal.size() < window.length)
        throw std::invalid_argument("inst_average: signal shorter than one window");
    const auto run = detail::stat_run(window, sample_rate, fundamental);
    const std::size_t n_frames = (signal.size() - window.length) / window.hop + 1;
    std::vector<double> out(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t off = k * window.hop + run.offset;
        double acc = 0.0;
        for (std::size_t i = 0; i < run.length; ++i) acc += signal[off + i];
        out[k] = acc / static_cast<double>(run.length);
    }
    return out;
}

// RMS fundamental current per frame.
inline std::vector<double> inst_fundamental(const TimeFrequencyMap& tfr, double f0) {
    return harmonic_track(tfr, f0, 1);
}

struct DistortionTracks {
    std::vector<double> thd, tnhd, twd;
    std::vector<std::uint8_t> saturated;  // fundamental below floor; caps reported
};

// Fundamental RMS per frame from a quadrature projection over the same
// cycle-trimmed slice as inst_rms. Sharing the slice with the RMS makes the
// noise cross-terms cancel in rms^2 - i1^2, which keeps the distortion
// ratios stable under broadband noise.
inline std::vector<double> quadrature_fundamental(std::span<const double> signal,
                                                  const WindowSpec& window, double sample_rate,
                                                  double f0) {
    window.validate();
    if (!(f0 > 0.0) || !(sample_rate > 0.0))
        throw std::invalid_argument("quadrature_fundamental: need positive f0 and sample_rate");
    if (signal.size() < window.length)
        throw std::invalid_argument("quadrature_fundamental: signal shorter than one window");
    const auto run = detail::stat_run(window, sample_rate, f0);
    const double w0 = 2.0 * std::numbers::pi * f0 / sample_rate;
    std::vector<double> cs(signal.size()), sn(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        cs[i] = std::cos(w0 * static_cast<double>(i));
        sn[i] = std::sin(w0 * static_cast<double>(i));
    }
    const std::size_t n_frames = (signal.size() - window.length) / window.hop + 1;
    std::vector<double> out(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t off = k * window.hop + run.offset;
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < run.length; ++i) {
            a += signal[off + i] * cs[off + i];
            b += signal[off + i] * sn[off + i];
        }
        const double scale = 2.0 / static_cast<double>(run.length);
        out[k] = std::hypot(a * scale, b * scale) / std::numbers::sqrt2;
    }
    return out;
}

// THD / TnHD / TWD per frame. THD collects harmonics 2..h_max relative to the
// fundamental RMS; TWD is total non-fundamental content from the raw slice
// RMS; TnHD is the remainder, so DC and interharmonics land there and
// twd^2 = thd^2 + tnhd^2 holds at every non-saturated frame.
inline DistortionTracks inst_distortions(const TimeFrequencyMap& tfr,
                                         std::span<const double> signal, double f0,
                                         unsigned h_max = kDefaultMaxHarmonic) {
    if (!(f0 > 0.0)) throw std::invalid_argument("inst_distortions: f0 must be positive");
    const double nyquist = tfr.sample_rate / 2.0;
    unsigned h_eff = h_max;
    while (h_eff > 1 && static_cast<double>(h_eff) * f0 >= nyquist) --h_eff;
    if (static_cast<double>(h_eff) * f0 >= nyquist)
        throw std::out_of_range("inst_distortions: fundamental above Nyquist");

    detail::HarmonicExtractor ex(tfr, f0, h_eff);
    const auto rms = inst_rms(signal, tfr.window, tfr.sample_rate, f0);
    const auto fund = quadrature_fundamental(signal, tfr.window, tfr.sample_rate, f0);
    const std::size_t n = tfr.frame_count();

    DistortionTracks t;
    t.thd.resize(n);
    t.tnhd.resize(n);
    t.twd.resize(n);
    t.saturated.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const double i1 = fund[k];
        if (i1 < kFundamentalFloor) {
            t.thd[k] = t.tnhd[k] = t.twd[k] = kDistortionCap;
            t.saturated[k] = 1;
            continue;
        }
        double harm_sq = 0.0;
        for (unsigned h = 2; h <= h_eff; ++h) {
            const double ih = ex.amplitude_rms(k, h);
            harm_sq += ih * ih;
        }
        const double twd = std::sqrt(std::max(rms[k] * rms[k] - i1 * i1, 0.0)) / i1;
        // Harmonic content cannot exceed the total non-fundamental content;
        // the clamp absorbs leakage overshoot in the per-band peaks.
        const double thd = std::min(std::sqrt(harm_sq) / i1, twd);
        t.twd[k] = twd;
        t.thd[k] = thd;
        t.tnhd[k] = std::sqrt(std::max(twd * twd - thd * thd, 0.0));
    }
    return t;
}

struct FaultInterval {
    double t_on = 0.0;
    double t_off = 0.0;
};

struct FaultDuration {
    double td_fault = 0.0;  // s
    std::optional<FaultInterval> interval;
};

// Accumulated frame time with twd at or above the threshold; the interval
// spans first to last crossing plus one frame period.
inline FaultDuration fault_duration(std::span<const double> twd_track,
                                    std::span<const double> frame_times, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("fault_duration: threshold must be > 0");
    if (twd_track.size() != frame_times.size())
        throw std::invalid_argument("fault_duration: track/time size mismatch");
    FaultDuration out;
    if (twd_track.empty()) return out;
    const double period = frame_times.size() > 1 ? frame_times[1] - frame_times[0] : 0.0;
    std::size_t count = 0;
    std::ptrdiff_t first = -1, last = -1;
    for (std::size_t k = 0; k < twd_track.size(); ++k) {
        if (twd_track[k] >= threshold) {
            ++count;
            if (first < 0) first = static_cast<std::ptrdiff_t>(k);
            last = static_cast<std::ptrdiff_t>(k);
        }
    }
    if (count == 0 || period <= 0.0) return out;  // interval present iff td_fault > 0
    out.td_fault = static_cast<double>(count) * period;
    out.interval = FaultInterval{frame_times[static_cast<std::size_t>(first)],
                                 frame_times[static_cast<std::size_t>(last)] + period};
    return out;
}

struct PhaseTracks {
    std::vector<double> i_rms, i_fund, i_ave, thd, tnhd, twd;
    std::vector<std::uint8_t> saturated;
};

struct FeatureTracks {
    std::array<PhaseTracks, 3> phase;
    std::vector<double> frame_times;
    WindowSpec window;
    double sample_rate = 0.0;
    double fundamental = 0.0;
};

struct FeatureSummary {
    double td_fault = 0.0;  // s
    std::optional<FaultInterval> fault_interval;
    double thd_mean = 0.0;
    double tnhd_mean = 0.0;
    double twd_mean = 0.0;
    double i_rms_mean = 0.0;      // A
    double i_ave_mean = 0.0;      // A
    double i_rms_baseline = 0.0;  // A, median RMS clear of the fault window
};

inline FeatureTracks compute_feature_tracks(const ThreePhaseRecord& record,
                                            const WindowSpec& window = {},
                                            unsigned h_max = kDefaultMaxHarmonic) {
    record.validate();
    const double f0 = record.config.fundamental;
    FeatureTracks tracks;
    tracks.window = window;
    tracks.sample_rate = record.sample_rate;
    tracks.fundamental = f0;
    for (int p = 0; p < 3; ++p) {
        const auto& sig = record.samples[p];
        const auto tfr = stft(sig, record.sample_rate, window);
        if (p == 0) tracks.frame_times = tfr.frame_times;
        auto& out = tracks.phase[p];
        out.i_rms = inst_rms(sig, window, record.sample_rate, f0);
        out.i_ave = inst_average(sig, window, record.sample_rate, f0);
        out.i_fund = inst_fundamental(tfr, f0);
        // The spectral fundamental and the cycle-trimmed RMS weigh a fault
        // transition differently; the stored fundamental never exceeds the
        // total.
        for (std::size_t k = 0; k < out.i_fund.size(); ++k)
            out.i_fund[k] = std::min(out.i_fund[k], out.i_rms[k]);
        auto dist = inst_distortions(tfr, sig, f0, h_max);
        out.thd = std::move(dist.thd);
        out.tnhd = std::move(dist.tnhd);
        out.twd = std::move(dist.twd);
        out.saturated = std::move(dist.saturated);
    }
    return tracks;
}

namespace detail {

// Frames used for the summary means: inside the detected interval, only
// those whose twd reaches kCoreTwdFraction of the interval peak.
inline std::vector<std::size_t> summary_frames(const PhaseTracks& ph,
                                               std::span<const double> frame_times,
                                               const std::optional<FaultInterval>& interval) {
    std::vector<std::size_t> idx;
    if (!interval) {
        idx.resize(frame_times.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        return idx;
    }
    double peak = 0.0;
    for (std::size_t k = 0; k < frame_times.size(); ++k)
        if (frame_times[k] >= interval->t_on && frame_times[k] <= interval->t_off)
            peak = std::max(peak, ph.twd[k]);
    const double gate = kCoreTwdFraction * peak;
    for (std::size_t k = 0; k < frame_times.size(); ++k)
        if (frame_times[k] >= interval->t_on && frame_times[k] <= interval->t_off &&
            ph.twd[k] >= gate)
            idx.push_back(k);
    return idx;
}

inline double mean_at(std::span<const double> track, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t k : idx) acc += track[k];
    return acc / static_cast<double>(idx.size());
}

// Median RMS over frames whose window does not touch the detected interval;
// the healthy operating level of the phase. Zero when no such frame exists.
inline double rms_baseline(const PhaseTracks& ph, std::span<const double> frame_times,
                           const std::optional<FaultInterval>& interval, double half_window_s) {
    std::vector<double> clear;
    for (std::size_t k = 0; k < frame_times.size(); ++k) {
        if (interval && frame_times[k] >= interval->t_on - half_window_s &&
            frame_times[k] <= interval->t_off + half_window_s)
            continue;
        clear.push_back(ph.i_rms[k]);
    }
    if (clear.empty()) return 0.0;
    std::nth_element(clear.begin(), clear.begin() + clear.size() / 2, clear.end());
    return clear[clear.size() / 2];
}

}  // namespace detail

inline std::array<FeatureSummary, 3> summarize(const FeatureTracks& tracks, double threshold) {
    std::array<FeatureSummary, 3> out;
    for (int p = 0; p < 3; ++p) {
        const auto& ph = tracks.phase[p];
        auto& s = out[p];
        const auto fd = fault_duration(ph.twd, tracks.frame_times, threshold);
        s.td_fault = fd.td_fault;
        s.fault_interval = fd.interval;
        const auto idx = detail::summary_frames(ph, tracks.frame_times, fd.interval);
        s.thd_mean = detail::mean_at(ph.thd, idx);
        s.tnhd_mean = detail::mean_at(ph.tnhd, idx);
        s.twd_mean = detail::mean_at(ph.twd, idx);
        s.i_rms_mean = detail::mean_at(ph.i_rms, idx);
        s.i_ave_mean = detail::mean_at(ph.i_ave, idx);
        const double half_window_s =
            0.5 * static_cast<double>(tracks.window.length) /
            (tracks.sample_rate > 0.0 ? tracks.sample_rate : 1.0);
        s.i_rms_baseline = detail::rms_baseline(ph, tracks.frame_times, fd.interval, half_window_s);
    }
    return out;
}

}  // namespace vsidiag
