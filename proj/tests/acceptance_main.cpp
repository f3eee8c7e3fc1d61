// Acceptance suite: runs the end-to-end checks the toolkit must satisfy and
// prints one verdict line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vsidiag/vsidiag.hpp"

using namespace vsidiag;

namespace {

int g_failures = 0;
std::vector<std::string> g_details;

void detail_fail(const std::string& msg) { g_details.push_back(msg); }

void verdict(int index, const char* name, bool ok) {
    std::printf("[%s] %d. %s\n", ok ? "PASS" : "FAIL", index, name);
    for (const auto& d : g_details) std::printf("       - %s\n", d.c_str());
    g_details.clear();
    if (!ok) ++g_failures;
}

bool in_range(const char* what, double value, double lo, double hi) {
    if (value >= lo && value <= hi) return true;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s = %.4f outside [%.4f, %.4f]", what, value, lo, hi);
    detail_fail(buf);
    return false;
}

ThreePhaseRecord faulted_record(FaultKind kind, SwitchId sw) {
    FaultSpec f;
    f.kind = kind;
    f.switch_id = sw;
    return inject_fault(synth_healthy(SignalConfig{}), f);
}

constexpr double kFs = 10000.0;
constexpr double kWindowSeconds = 512.0 / kFs;

// 1. Default 60-signal corpus: overall and per-class accuracy, the noiseless
//    nominal subset, and the runtime budget.
bool criterion_accuracy() {
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();

    CorpusSpec spec;  // seed 42
    const auto corpus = gen_corpus(spec);
    const auto report = evaluate(corpus, WindowSpec{}, Thresholds{}, spec.seed);

    const auto nominal = gen_corpus(nominal_corpus_spec());
    const auto nominal_report = evaluate(nominal, WindowSpec{}, Thresholds{}, 42);

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (report.total != 60) {
        detail_fail("corpus size " + std::to_string(report.total) + " != 60");
        ok = false;
    }
    if (report.correct < 58) {
        detail_fail("overall " + std::to_string(report.correct) + "/60 below 58");
        ok = false;
    }
    for (const auto& c : report.per_class)
        if (c.correct < 4) {
            detail_fail("class " + to_string(c.truth) + " " + std::to_string(c.correct) + "/5");
            ok = false;
        }
    if (nominal_report.correct != nominal_report.total) {
        detail_fail("noiseless nominal subset not perfect");
        ok = false;
    }
    if (elapsed >= 30.0) {
        detail_fail("runtime " + std::to_string(elapsed) + " s exceeds 30 s");
        ok = false;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "overall %.1f%% (%d/%d), nominal %d/%d, %.1f s",
                  report.overall_percent, report.correct, report.total, nominal_report.correct,
                  nominal_report.total, elapsed);
    g_details.insert(g_details.begin(), buf);
    return ok;
}

// 2. Open-fault signature levels on the upper C switch.
bool criterion_open_signature() {
    bool ok = true;
    const auto rec = faulted_record(FaultKind::open_circuit, SwitchId::s5);
    const auto sums = summarize(compute_feature_tracks(rec), Thresholds{}.twd_fault);
    const auto& s = sums[2];
    ok &= in_range("i_rms_mean", s.i_rms_mean, 0.75, 1.05);
    ok &= in_range("i_ave_mean", s.i_ave_mean, -0.90, -0.40);
    if (s.thd_mean < 0.15) {
        detail_fail("thd_mean " + std::to_string(s.thd_mean) + " below 0.15");
        ok = false;
    }
    if (s.tnhd_mean < 0.25) {
        detail_fail("tnhd_mean " + std::to_string(s.tnhd_mean) + " below 0.25");
        ok = false;
    }
    const auto d = diagnose(rec);
    if (d.label != DiagnosisLabel::open_s5) {
        detail_fail("diagnosis " + to_string(d.label) + " != Open:S5");
        ok = false;
    }
    return ok;
}

// 3. Short-fault signature levels on the lower A switch.
bool criterion_short_signature() {
    bool ok = true;
    const auto rec = faulted_record(FaultKind::short_circuit, SwitchId::s2);
    const auto tracks = compute_feature_tracks(rec);
    const auto sums = summarize(tracks, Thresholds{}.twd_fault);
    const auto& s = sums[0];
    ok &= in_range("i_rms_mean", s.i_rms_mean, 1.20, 1.50);
    ok &= in_range("i_ave_mean", s.i_ave_mean, -1.30, -0.90);
    if (s.thd_mean > 0.10) {
        detail_fail("thd_mean " + std::to_string(s.thd_mean) + " above 0.10");
        ok = false;
    }
    // Fundamental plateau at the fault center.
    std::size_t kc = 0;
    for (std::size_t k = 0; k < tracks.frame_times.size(); ++k)
        if (std::abs(tracks.frame_times[k] - 0.225) < std::abs(tracks.frame_times[kc] - 0.225))
            kc = k;
    ok &= in_range("i_fund plateau", tracks.phase[0].i_fund[kc], 0.60, 0.90);
    const auto d = diagnose(rec);
    if (d.label != DiagnosisLabel::short_s2) {
        detail_fail("diagnosis " + to_string(d.label) + " != Short:S2");
        ok = false;
    }
    return ok;
}

// 4. Duration estimator: fault-plus-window bound at the 5% threshold,
//    healthy records report zero.
bool criterion_duration() {
    bool ok = true;
    for (FaultKind kind : {FaultKind::open_circuit, FaultKind::short_circuit}) {
        const auto rec = faulted_record(kind, kind == FaultKind::open_circuit ? SwitchId::s5
                                                                              : SwitchId::s2);
        const int p = static_cast<int>(switch_phase(rec.label.switch_id));
        const auto tracks = compute_feature_tracks(rec);
        const auto fd = fault_duration(tracks.phase[p].twd, tracks.frame_times, 0.05);
        char what[64];
        std::snprintf(what, sizeof(what), "%s td_fault",
                      kind == FaultKind::open_circuit ? "open" : "short");
        ok &= in_range(what, fd.td_fault, 0.060, 0.060 + kWindowSeconds);
    }
    const auto healthy = synth_healthy(SignalConfig{});
    for (double snr : {std::numeric_limits<double>::infinity(), 40.0, 30.0}) {
        const auto rec = add_noise(healthy, snr, 17);
        const auto sums = summarize(compute_feature_tracks(rec), 0.05);
        for (const auto& s : sums)
            if (s.td_fault != 0.0) {
                detail_fail("healthy td_fault " + std::to_string(s.td_fault) + " != 0");
                ok = false;
            }
    }
    return ok;
}

// 5. Spectral correctness: calibration, distortion identity, Parseval,
//    two-tone resolution.
bool criterion_spectral() {
    bool ok = true;

    std::vector<double> x(4000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = 1.65 * std::sin(2.0 * std::numbers::pi * 60.0 * i / kFs);
    const auto tfr = stft(x, kFs);
    const auto fund = harmonic_track(tfr, 60.0, 1);
    const double want = 1.65 / std::numbers::sqrt2;
    for (double v : fund)
        if (std::abs(v - want) > 0.01 * want) {
            detail_fail("fundamental RMS " + std::to_string(v) + " off 1.167 by >1%");
            ok = false;
            break;
        }

    for (auto rec : {synth_healthy(SignalConfig{}),
                     faulted_record(FaultKind::open_circuit, SwitchId::s5),
                     faulted_record(FaultKind::short_circuit, SwitchId::s2)}) {
        const auto tracks = compute_feature_tracks(rec);
        for (int p = 0; p < 3; ++p) {
            const auto& ph = tracks.phase[p];
            for (std::size_t k = 0; k < ph.twd.size(); ++k) {
                if (ph.saturated[k]) continue;
                const double gap =
                    ph.twd[k] * ph.twd[k] - ph.thd[k] * ph.thd[k] - ph.tnhd[k] * ph.tnhd[k];
                if (std::abs(gap) > 1e-9) {
                    detail_fail("distortion identity gap " + std::to_string(gap));
                    ok = false;
                    k = ph.twd.size();
                }
            }
        }
    }

    WindowSpec rect;
    rect.shape = WindowShape::rectangular;
    const auto rtfr = stft(x, kFs, rect);
    for (std::size_t k = 0; k < rtfr.frame_count(); k += 7) {
        const auto slice = std::span<const double>(x).subspan(k * rect.hop, rect.length);
        const double ms = oracle::rms(slice) * oracle::rms(slice);
        if (std::abs(band_energy(rtfr, k) - ms) > 1e-6 * ms) {
            detail_fail("rectangular Parseval off at frame " + std::to_string(k));
            ok = false;
            break;
        }
    }

    std::vector<double> duo(2000);
    for (std::size_t i = 0; i < duo.size(); ++i)
        duo[i] = std::sin(2.0 * std::numbers::pi * 60.0 * i / kFs) +
                 std::sin(2.0 * std::numbers::pi * 120.0 * i / kFs + 0.7);
    const auto dtfr = stft(duo, kFs);
    const auto b60 = static_cast<std::size_t>(std::llround(60.0 / dtfr.bin_spacing));
    const auto b120 = static_cast<std::size_t>(std::llround(120.0 / dtfr.bin_spacing));
    for (std::size_t k = 0; k < dtfr.frame_count(); k += 25) {
        auto has_peak = [&](std::size_t center) {
            for (std::size_t b = center - 4; b <= center + 4; ++b)
                if (std::abs(dtfr.frames[k][b]) > std::abs(dtfr.frames[k][b - 1]) &&
                    std::abs(dtfr.frames[k][b]) > std::abs(dtfr.frames[k][b + 1]))
                    return true;
            return false;
        };
        if (!has_peak(b60) || !has_peak(b120)) {
            detail_fail("60/120 Hz tones not resolved at frame " + std::to_string(k));
            ok = false;
            break;
        }
    }
    return ok;
}

// 6. Symmetry: rotation equivariance for all twelve classes, common-scale
//    invariance of the code's detection bits, byte-identical reports.
bool criterion_symmetry() {
    bool ok = true;
    for (int s = 0; s < 6; ++s) {
        for (FaultKind kind : {FaultKind::open_circuit, FaultKind::short_circuit}) {
            const auto rec = faulted_record(kind, static_cast<SwitchId>(s));
            const auto base = diagnose(rec);
            const auto rotated = diagnose(rotate_phases(rec));
            if (rotated.label != rotate_label(base.label)) {
                detail_fail("rotation mismatch for " + to_string(base.label));
                ok = false;
            }
        }
    }

    auto rec = faulted_record(FaultKind::short_circuit, SwitchId::s4);
    const auto base = diagnose(rec);
    for (auto& ph : rec.samples)
        for (auto& v : ph) v *= 2.0;
    const auto scaled = diagnose(rec);
    if (scaled.code.fault_present != base.code.fault_present ||
        scaled.code.harmonic_signature != base.code.harmonic_signature ||
        scaled.code.phase != base.code.phase) {
        detail_fail("common scaling changed b0/b2/phase bits");
        ok = false;
    }

    auto spec = nominal_corpus_spec();
    const auto r1 = evaluate(gen_corpus(spec), WindowSpec{}, Thresholds{}, spec.seed);
    const auto r2 = evaluate(gen_corpus(spec), WindowSpec{}, Thresholds{}, spec.seed);
    if (nlohmann::json(r1).dump() != nlohmann::json(r2).dump()) {
        detail_fail("report bytes differ between identical runs");
        ok = false;
    }
    return ok;
}

// 7. Pipeline levels match the half-wave analytic values, cross-checked by a
//    one-sample-hop brute-force scan.
bool criterion_halfwave_oracle() {
    bool ok = true;
    const double A = 1.65;
    SignalConfig cfg;
    cfg.baseline_distortion = 0.0;
    FaultSpec f;
    f.kind = FaultKind::open_circuit;
    f.switch_id = SwitchId::s1;
    f.start = 0.0;
    f.duration = cfg.duration;  // whole record suppressed
    f.open_residual = 0.0;
    f.open_compensation = 1.0;
    const auto rec = inject_fault(synth_healthy(cfg), f);

    const auto tracks = compute_feature_tracks(rec);
    const auto& ph = tracks.phase[0];
    const double mean_rms = oracle::mean(ph.i_rms);
    const double mean_ave = oracle::mean(ph.i_ave);
    const double mean_fund = oracle::mean(ph.i_fund);

    auto close = [&ok](const char* what, double got, double want) {
        if (std::abs(got - want) <= 0.03 * std::abs(want)) return;
        char buf[120];
        std::snprintf(buf, sizeof(buf), "%s = %.4f vs analytic %.4f (3%%)", what, got, want);
        detail_fail(buf);
        ok = false;
    };
    close("pipeline RMS", mean_rms, A / 2.0);
    close("pipeline average", mean_ave, -A / std::numbers::pi);
    close("pipeline fundamental", mean_fund, (A / 2.0) / std::numbers::sqrt2);

    // Brute-force one-hop scan over the raw waveform.
    std::vector<double> rms_scan, ave_scan, fund_scan;
    const auto& x = rec.samples[0];
    for (std::size_t i = 0; i + 500 <= x.size(); i += 1) {
        const auto run = std::span<const double>(x).subspan(i, 500);
        rms_scan.push_back(oracle::rms(run));
        ave_scan.push_back(oracle::mean(run));
        fund_scan.push_back(oracle::projected_amplitude(run, kFs, 60.0) / std::numbers::sqrt2);
    }
    close("oracle RMS", oracle::mean(rms_scan), A / 2.0);
    close("oracle average", oracle::mean(ave_scan), -A / std::numbers::pi);
    close("oracle fundamental", oracle::mean(fund_scan), (A / 2.0) / std::numbers::sqrt2);
    return ok;
}

}  // namespace

int main() {
    std::printf("vsidiag acceptance suite\n");
    verdict(1, "end-to-end accuracy on the default corpus", criterion_accuracy());
    verdict(2, "open-circuit signature levels (S5)", criterion_open_signature());
    verdict(3, "short-circuit signature levels (S2)", criterion_short_signature());
    verdict(4, "fault-duration estimator bounds", criterion_duration());
    verdict(5, "spectral correctness", criterion_spectral());
    verdict(6, "symmetry and determinism", criterion_symmetry());
    verdict(7, "half-wave analytic oracle equivalence", criterion_halfwave_oracle());
    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
