#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace vsidiag {

enum class WindowShape { hann, rectangular };

struct WindowSpec {
    WindowShape shape = WindowShape::hann;
    std::size_t length = 512;    // samples
    std::size_t hop = 10;        // samples
    std::size_t dft_size = 2048; // zero-padded transform size

    void validate() const {
        if (hop < 1 || hop > length || length > dft_size)
            throw std::invalid_argument("WindowSpec: require 1 <= hop <= length <= dft_size");
    }

    double length_seconds(double sample_rate) const {
        return static_cast<double>(length) / sample_rate;
    }
};

inline std::vector<double> make_window(const WindowSpec& spec) {
    spec.validate();
    std::vector<double> w(spec.length, 1.0);
    if (spec.shape == WindowShape::hann) {
        // Periodic Hann; coefficient sum is exactly length/2.
        const double step = 2.0 * std::numbers::pi / static_cast<double>(spec.length);
        for (std::size_t n = 0; n < spec.length; ++n)
            w[n] = 0.5 * (1.0 - std::cos(step * static_cast<double>(n)));
    }
    return w;
}

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. Size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Direct DFT fallback for non-power-of-two sizes.
inline void dft_naive(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            if (a[m] == std::complex<double>(0.0, 0.0)) continue;
            const double ang = step * static_cast<double>(k) * static_cast<double>(m);
            acc += a[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    a = std::move(out);
}

}  // namespace detail

// Complex spectra over (time, frequency). frames[k][b] holds the two-sided
// coefficient of frame k at bin b, scaled by 1/sum(window) so a unit
// sinusoid at a bin center has magnitude 0.5 (single-sided amplitude 1).
struct TimeFrequencyMap {
    std::vector<std::vector<std::complex<double>>> frames;
    std::vector<double> frame_times;  // s, window centers
    double bin_spacing = 0.0;         // Hz
    double sample_rate = 0.0;         // Hz
    WindowSpec window;
    double window_sum = 0.0;     // sum of window coefficients
    double window_sq_sum = 0.0;  // sum of squared coefficients

    std::size_t frame_count() const { return frames.size(); }
    std::size_t bin_count() const { return window.dft_size / 2 + 1; }
    double frame_period() const {
        return static_cast<double>(window.hop) / sample_rate;
    }

    double single_sided_amplitude(std::size_t frame, std::size_t bin) const {
        const double mag = std::abs(frames[frame][bin]);
        const bool edge = bin == 0 || (window.dft_size % 2 == 0 && bin == window.dft_size / 2);
        return edge ? mag : 2.0 * mag;
    }
};

inline TimeFrequencyMap stft(std::span<const double> signal, double sample_rate,
                             const WindowSpec& spec = {}) {
    spec.validate();
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("stft: sample_rate must be positive");
    if (signal.size() < spec.length)
        throw std::invalid_argument("stft: signal shorter than one window");
    for (double v : signal)
        if (!std::isfinite(v)) throw std::domain_error("stft: non-finite sample");

    const auto w = make_window(spec);
    double sumw = 0.0, sumw2 = 0.0;
    for (double v : w) {
        sumw += v;
        sumw2 += v * v;
    }

    TimeFrequencyMap map;
    map.window = spec;
    map.sample_rate = sample_rate;
    map.bin_spacing = sample_rate / static_cast<double>(spec.dft_size);
    map.window_sum = sumw;
    map.window_sq_sum = sumw2;

    const std::size_t n_frames = (signal.size() - spec.length) / spec.hop + 1;
    const std::size_t n_bins = spec.dft_size / 2 + 1;
    map.frames.resize(n_frames);
    map.frame_times.resize(n_frames);

    const bool pow2 = detail::is_power_of_two(spec.dft_size);
    std::vector<std::complex<double>> buf(spec.dft_size);
    const double inv_gain = 1.0 / sumw;
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t off = k * spec.hop;
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t n = 0; n < spec.length; ++n)
            buf[n] = std::complex<double>(w[n] * signal[off + n], 0.0);
        if (pow2)
            detail::fft_radix2(buf);
        else
            detail::dft_naive(buf);
        auto& row = map.frames[k];
        row.resize(n_bins);
        for (std::size_t b = 0; b < n_bins; ++b) row[b] = buf[b] * inv_gain;
        map.frame_times[k] =
            (static_cast<double>(off) + 0.5 * static_cast<double>(spec.length)) / sample_rate;
    }
    return map;
}

namespace detail {

// DTFT of the analysis window at a fractional bin offset (in padded-bin
// units), normalized so the value at offset 0 is 1.
inline std::complex<double> window_kernel(const std::vector<double>& w, double window_sum,
                                          std::size_t dft_size, double offset_bins) {
    const double step = -2.0 * std::numbers::pi * offset_bins / static_cast<double>(dft_size);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t n = 0; n < w.size(); ++n) {
        const double ang = step * static_cast<double>(n);
        acc += w[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc / window_sum;
}

// Per-frame harmonic amplitude readout. The fundamental is estimated from
// its peak bin with the window-kernel scalloping removed and the
// negative-frequency image iterated out; its predicted spectrum (both
// lobes) is subtracted from the higher-harmonic bands before their peaks
// are read.
class HarmonicExtractor {
  public:
    HarmonicExtractor(const TimeFrequencyMap& tfr, double f0, unsigned h_max)
        : tfr_(tfr), f0_(f0), h_max_(h_max) {
        if (!(f0 > 0.0)) throw std::invalid_argument("harmonic extraction: f0 must be positive");
        if (h_max < 1) throw std::invalid_argument("harmonic extraction: h_max must be >= 1");
        if (static_cast<double>(h_max) * f0 >= tfr.sample_rate / 2.0)
            throw std::out_of_range("harmonic extraction: harmonic above Nyquist");

        win_ = make_window(tfr.window);
        pos1_ = f0 / tfr.bin_spacing;  // fundamental position, padded bins
        const std::size_t n_bins = tfr.bin_count();

        bands_.resize(h_max);
        for (unsigned h = 1; h <= h_max; ++h) {
            const double center = pos1_ * h;
            auto lo = static_cast<long long>(std::ceil(center - pos1_ / 2.0));
            auto hi = static_cast<long long>(std::floor(center + pos1_ / 2.0));
            lo = std::max(lo, 0ll);
            hi = std::min(hi, static_cast<long long>(n_bins) - 1);
            if (lo > hi) lo = hi = std::llround(std::clamp(center, 0.0, double(n_bins - 1)));
            bands_[h - 1] = {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
        }

        // Kernel tables over every band bin: fundamental lobe, its image,
        // and the scalloping magnitude of the band's own harmonic.
        const auto [lo1, hi1] = bands_[0];
        fund_read_.resize(hi1 - lo1 + 1);
        fund_img_at_read_.resize(hi1 - lo1 + 1);
        for (std::size_t k = lo1; k <= hi1; ++k) {
            fund_read_[k - lo1] = kernel(static_cast<double>(k) - pos1_);
            fund_img_at_read_[k - lo1] = kernel(static_cast<double>(k) + pos1_);
        }
        if (h_max > 1) {
            lobe_.resize(h_max - 1);
            image_.resize(h_max - 1);
            scallop_.resize(h_max - 1);
            for (unsigned h = 2; h <= h_max; ++h) {
                const auto [lo, hi] = bands_[h - 1];
                auto& lob = lobe_[h - 2];
                auto& img = image_[h - 2];
                auto& sc = scallop_[h - 2];
                lob.resize(hi - lo + 1);
                img.resize(hi - lo + 1);
                sc.resize(hi - lo + 1);
                for (std::size_t k = lo; k <= hi; ++k) {
                    lob[k - lo] = kernel(static_cast<double>(k) - pos1_);
                    img[k - lo] = kernel(static_cast<double>(k) + pos1_);
                    sc[k - lo] = std::abs(kernel(static_cast<double>(k) - pos1_ * h));
                }
            }
        }
    }

    // Two-sided complex coefficient of the fundamental for one frame.
    std::complex<double> fundamental_coefficient(std::size_t frame) const {
        const auto& row = tfr_.frames[frame];
        const auto [lo, hi] = bands_[0];
        std::size_t kpk = lo;
        for (std::size_t k = lo + 1; k <= hi; ++k)
            if (std::abs(row[k]) > std::abs(row[kpk])) kpk = k;
        const auto read = fund_read_[kpk - lo];
        if (std::abs(read) < 1e-12) return {0.0, 0.0};
        std::complex<double> c = row[kpk] / read;
        // Two fixed-point steps remove the image's contribution at the read bin.
        for (int it = 0; it < 2; ++it)
            c = (row[kpk] - std::conj(c) * fund_img_at_read_[kpk - lo]) / read;
        return c;
    }

    // Single-sided RMS amplitude of harmonic h at one frame.
    double amplitude_rms(std::size_t frame, unsigned h) const {
        const auto& row = tfr_.frames[frame];
        if (h == 1)
            return 2.0 * std::abs(fundamental_coefficient(frame)) / std::numbers::sqrt2;

        const std::complex<double> c1 = fundamental_coefficient(frame);
        const auto [lo, hi] = bands_[h - 1];
        const auto& lob = lobe_[h - 2];
        const auto& img = image_[h - 2];
        const auto& sc = scallop_[h - 2];
        double best = 0.0;
        std::size_t bestk = lo;
        for (std::size_t k = lo; k <= hi; ++k) {
            const auto resid = row[k] - c1 * lob[k - lo] - std::conj(c1) * img[k - lo];
            const double m = std::abs(resid);
            if (m > best) {
                best = m;
                bestk = k;
            }
        }
        // Scalloping correction, applied only near the nominal harmonic bin
        // where the kernel model holds.
        const double corr = sc[bestk - lo];
        if (std::abs(static_cast<double>(bestk) - pos1_ * h) <= 0.75 && corr > 0.5)
            best /= corr;
        return 2.0 * best / std::numbers::sqrt2;
    }

    unsigned h_max() const { return h_max_; }
    std::size_t frame_count() const { return tfr_.frame_count(); }

  private:
    std::complex<double> kernel(double offset_bins) const {
        return window_kernel(win_, tfr_.window_sum, tfr_.window.dft_size, offset_bins);
    }

    const TimeFrequencyMap& tfr_;
    double f0_;
    unsigned h_max_;
    std::vector<double> win_;
    double pos1_ = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> bands_;
    std::vector<std::complex<double>> fund_read_, fund_img_at_read_;
    std::vector<std::vector<std::complex<double>>> lobe_, image_;
    std::vector<std::vector<double>> scallop_;
};

}  // namespace detail

// RMS amplitude of harmonic h of f0 per frame.
inline std::vector<double> harmonic_track(const TimeFrequencyMap& tfr, double f0, unsigned h) {
    detail::HarmonicExtractor ex(tfr, f0, h);
    std::vector<double> out(tfr.frame_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = ex.amplitude_rms(k, h);
    return out;
}

// Total single-sided power of one frame (A^2), window-weighted mean square
// of the slice by Parseval.
inline double band_energy(const TimeFrequencyMap& tfr, std::size_t frame) {
    const auto& row = tfr.frames[frame];
    const std::size_t last = row.size() - 1;
    const bool even = tfr.window.dft_size % 2 == 0;
    double acc = std::norm(row[0]);
    if (even) acc += std::norm(row[last]);
    const std::size_t interior_end = even ? last : last + 1;
    for (std::size_t b = 1; b < interior_end; ++b) acc += 2.0 * std::norm(row[b]);
    const double g = tfr.window_sum * tfr.window_sum /
                     (static_cast<double>(tfr.window.dft_size) * tfr.window_sq_sum);
    return acc * g;
}

}  // namespace vsidiag
