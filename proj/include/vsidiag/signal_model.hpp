#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsidiag {

enum class FaultKind { none, open_circuit, short_circuit };

// Leg-major switch numbering: S1/S2 drive leg A (upper/lower), S3/S4 leg B,
// S5/S6 leg C.
enum class SwitchId { s1, s2, s3, s4, s5, s6 };

enum class PhaseId { a, b, c };

constexpr PhaseId switch_phase(SwitchId s) {
    return static_cast<PhaseId>(static_cast<int>(s) / 2);
}

constexpr bool switch_is_upper(SwitchId s) {
    return static_cast<int>(s) % 2 == 0;
}

constexpr SwitchId switch_from(PhaseId p, bool upper) {
    return static_cast<SwitchId>(static_cast<int>(p) * 2 + (upper ? 0 : 1));
}

// Rotate one leg forward: A -> B -> C -> A.
constexpr PhaseId rotate_phase(PhaseId p) {
    return static_cast<PhaseId>((static_cast<int>(p) + 1) % 3);
}

constexpr SwitchId rotate_switch(SwitchId s) {
    return switch_from(rotate_phase(switch_phase(s)), switch_is_upper(s));
}

inline const char* to_string(PhaseId p) {
    switch (p) {
        case PhaseId::a: return "a";
        case PhaseId::b: return "b";
        default: return "c";
    }
}

inline const char* to_string(SwitchId s) {
    static const char* names[] = {"S1", "S2", "S3", "S4", "S5", "S6"};
    return names[static_cast<int>(s)];
}

inline const char* to_string(FaultKind k) {
    switch (k) {
        case FaultKind::none: return "none";
        case FaultKind::open_circuit: return "open";
        default: return "short";
    }
}

struct SignalConfig {
    double sample_rate = 10000.0;       // Hz
    double fundamental = 60.0;          // Hz
    double duration = 0.4;              // s
    double fundamental_peak = 1.65;     // A
    double baseline_distortion = 0.02;  // ratio, split over the 5th/7th harmonics

    std::size_t sample_count() const {
        return static_cast<std::size_t>(std::llround(duration * sample_rate));
    }

    void validate() const {
        if (!(sample_rate > 0.0) || !(duration > 0.0))
            throw std::invalid_argument("SignalConfig: sample_rate and duration must be positive");
        if (!(fundamental > 0.0))
            throw std::invalid_argument("SignalConfig: fundamental must be positive");
        if (baseline_distortion < 0.0)
            throw std::invalid_argument("SignalConfig: baseline_distortion must be >= 0");
        // 7th harmonic is the highest synthesized component.
        if (sample_rate <= 2.0 * 7.0 * fundamental)
            throw std::invalid_argument("SignalConfig: sample_rate below Nyquist for the 7th harmonic");
        const double n = duration * sample_rate;
        if (std::abs(n - std::round(n)) > 1e-6 || std::llround(n) < 1)
            throw std::invalid_argument("SignalConfig: duration * sample_rate must be a positive integer");
    }
};

struct FaultSpec {
    FaultKind kind = FaultKind::none;
    SwitchId switch_id = SwitchId::s1;
    double start = 0.195;     // s
    double duration = 0.060;  // s

    // Severity parameters of the behavioral waveform model.
    double open_residual = 0.05;          // A, clamp level on the suppressed half
    double open_compensation = 1.15;      // gain on the conducting half
    double short_dc_offset = 1.1;         // A
    double short_fundamental_scale = 0.64;
};

struct ThreePhaseRecord {
    std::array<std::vector<double>, 3> samples;  // A, phases a/b/c
    double sample_rate = 0.0;                    // Hz
    SignalConfig config;
    FaultSpec label;

    std::size_t size() const { return samples[0].size(); }
    double duration() const { return static_cast<double>(size()) / sample_rate; }

    void validate() const {
        if (samples[0].size() != samples[1].size() || samples[0].size() != samples[2].size())
            throw std::invalid_argument("ThreePhaseRecord: phases differ in length");
        if (samples[0].empty())
            throw std::invalid_argument("ThreePhaseRecord: empty record");
        if (!(sample_rate > 0.0))
            throw std::invalid_argument("ThreePhaseRecord: sample_rate must be positive");
        for (const auto& ph : samples)
            for (double v : ph)
                if (!std::isfinite(v))
                    throw std::invalid_argument("ThreePhaseRecord: non-finite sample");
    }
};

namespace detail {

// Deterministic, platform-independent PRNG (splitmix64).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Uniform in (0, 1].
    double next_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 rng(a ^ (b * 0x9e3779b97f4a7c15ull + 0x5851f42d4c957f2dull));
    return rng.next();
}

// Standard normal via Box-Muller on splitmix streams.
struct GaussianStream {
    SplitMix64 rng;
    double spare = 0.0;
    bool has_spare = false;
    explicit GaussianStream(std::uint64_t seed) : rng(seed) {}
    double next() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double u1 = rng.next_unit();
        const double u2 = rng.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(t);
        has_spare = true;
        return r * std::cos(t);
    }
};

}  // namespace detail

// Balanced three-phase currents at the fundamental, plus a 5th/7th harmonic
// pair (equal RMS split) sized so the healthy total waveform distortion
// equals config.baseline_distortion.
inline ThreePhaseRecord synth_healthy(const SignalConfig& config) {
    config.validate();
    const std::size_t n = config.sample_count();
    const double w0 = 2.0 * std::numbers::pi * config.fundamental;
    const double ts = 1.0 / config.sample_rate;
    // Per-harmonic amplitude ratio: d/sqrt(2) each for the 5th and 7th keeps
    // the combined harmonic RMS at d times the fundamental RMS.
    const double hr = config.baseline_distortion / std::numbers::sqrt2;

    ThreePhaseRecord rec;
    rec.sample_rate = config.sample_rate;
    rec.config = config;
    for (int p = 0; p < 3; ++p) {
        auto& out = rec.samples[p];
        out.resize(n);
        const double shift = -p * 2.0 * std::numbers::pi / 3.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = w0 * (static_cast<double>(i) * ts) + shift;
            const double shape = std::sin(arg) + hr * (std::sin(5.0 * arg) + std::sin(7.0 * arg));
            out[i] = config.fundamental_peak * shape;
        }
    }
    return rec;
}

// Applies the fault signature of `fault` to the labeled record window.
// Samples outside [start, start+duration) and non-faulty phases are
// untouched.
inline ThreePhaseRecord inject_fault(ThreePhaseRecord record, const FaultSpec& fault) {
    record.validate();
    record.label = fault;
    if (fault.kind == FaultKind::none) return record;

    const double fs = record.sample_rate;
    if (fault.start < 0.0 || fault.duration < 0.0 ||
        fault.start + fault.duration > record.duration() + 0.5 / fs)
        throw std::out_of_range("inject_fault: fault window outside record");
    if (fault.open_residual < 0.0)
        throw std::invalid_argument("inject_fault: open_residual must be >= 0");

    const auto i0 = static_cast<std::size_t>(std::llround(fault.start * fs));
    const auto i1 = std::min(record.size(),
                             static_cast<std::size_t>(std::llround((fault.start + fault.duration) * fs)));
    auto& ph = record.samples[static_cast<int>(switch_phase(fault.switch_id))];
    const bool upper = switch_is_upper(fault.switch_id);

    if (fault.kind == FaultKind::open_circuit) {
        const double r = fault.open_residual;
        const double c = fault.open_compensation;
        for (std::size_t i = i0; i < i1; ++i) {
            const double y = ph[i];
            if (upper)
                ph[i] = y > 0.0 ? std::min(y, r) : c * y;
            else
                ph[i] = y < 0.0 ? std::max(y, -r) : c * y;
        }
    } else {
        const double dc = upper ? fault.short_dc_offset : -fault.short_dc_offset;
        const double s = fault.short_fundamental_scale;
        for (std::size_t i = i0; i < i1; ++i) ph[i] = s * ph[i] + dc;
    }
    return record;
}

// Adds zero-mean Gaussian noise per phase at `snr_db` relative to the healthy
// fundamental power of the record's config. +inf is the no-noise sentinel.
inline ThreePhaseRecord add_noise(ThreePhaseRecord record, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return record;
    if (std::isnan(snr_db))
        throw std::invalid_argument("add_noise: snr_db must not be NaN");
    const double fund_rms = record.config.fundamental_peak / std::numbers::sqrt2;
    const double noise_rms = fund_rms * std::pow(10.0, -snr_db / 20.0);
    for (int p = 0; p < 3; ++p) {
        detail::GaussianStream g(detail::mix_seed(seed, static_cast<std::uint64_t>(p) + 1));
        for (double& v : record.samples[p]) v += noise_rms * g.next();
    }
    return record;
}

// Relabel phases one leg forward: the waveform of a becomes b, b becomes c,
// c becomes a.
inline ThreePhaseRecord rotate_phases(ThreePhaseRecord record) {
    auto tmp = std::move(record.samples[2]);
    record.samples[2] = std::move(record.samples[1]);
    record.samples[1] = std::move(record.samples[0]);
    record.samples[0] = std::move(tmp);
    record.label.switch_id = rotate_switch(record.label.switch_id);
    return record;
}

}  // namespace vsidiag
