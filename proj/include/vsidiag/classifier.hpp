#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "vsidiag/features.hpp"
#include "vsidiag/signal_model.hpp"

namespace vsidiag {

struct Thresholds {
    double twd_fault = 0.05;   // distortion ratio flagging a fault frame
    double td_min = 0.020;     // s, minimum duration counted as a fault
    double rms_rise = 0.05;    // relative RMS rise marking a short signature
    double thd_open = 0.18;    // THD level marking an open signature
    double ave_shift = 0.20;   // A, DC shift selecting the switch position
    double nominal_rms = 1.167;  // A, fallback healthy per-phase RMS reference
    double tnhd_short = 0.95;  // TnHD level marking a DC-rich (short) signature

    void validate() const {
        if (!(twd_fault > 0.0) || twd_fault >= 1.0)
            throw std::invalid_argument("Thresholds: twd_fault must be in (0, 1)");
        if (!(td_min > 0.0) || !(rms_rise > 0.0) || !(thd_open > 0.0) || !(ave_shift > 0.0) ||
            !(nominal_rms > 0.0) || !(tnhd_short > 0.0))
            throw std::invalid_argument("Thresholds: all thresholds must be positive");
    }
};

// Thresholded feature bits driving the decision table. Rendered as six bits
// in the order b0 b1 b2 b3 p1 p0.
struct RuleCode {
    bool fault_present = false;      // b0
    bool rms_increased = false;      // b1
    bool harmonic_signature = false; // b2
    bool negative_shift = false;     // b3
    PhaseId phase = PhaseId::a;      // b4b5: 00=A 01=B 10=C

    std::string bits() const {
        std::string s;
        s += fault_present ? '1' : '0';
        s += rms_increased ? '1' : '0';
        s += harmonic_signature ? '1' : '0';
        s += negative_shift ? '1' : '0';
        const int p = static_cast<int>(phase);
        s += (p >> 1) ? '1' : '0';
        s += (p & 1) ? '1' : '0';
        return s;
    }

    bool operator==(const RuleCode&) const = default;
};

enum class DiagnosisLabel {
    healthy,
    open_s1, open_s2, open_s3, open_s4, open_s5, open_s6,
    short_s1, short_s2, short_s3, short_s4, short_s5, short_s6,
    unknown,
};

inline constexpr int kLabelCount = 14;

inline DiagnosisLabel label_from(FaultKind kind, SwitchId sw) {
    switch (kind) {
        case FaultKind::none: return DiagnosisLabel::healthy;
        case FaultKind::open_circuit:
            return static_cast<DiagnosisLabel>(1 + static_cast<int>(sw));
        default:
            return static_cast<DiagnosisLabel>(7 + static_cast<int>(sw));
    }
}

inline std::string to_string(DiagnosisLabel label) {
    const int v = static_cast<int>(label);
    if (label == DiagnosisLabel::healthy) return "Healthy";
    if (label == DiagnosisLabel::unknown) return "Unknown";
    if (v <= 6) return std::string("Open:") + to_string(static_cast<SwitchId>(v - 1));
    return std::string("Short:") + to_string(static_cast<SwitchId>(v - 7));
}

inline std::optional<SwitchId> label_switch(DiagnosisLabel label) {
    const int v = static_cast<int>(label);
    if (v >= 1 && v <= 6) return static_cast<SwitchId>(v - 1);
    if (v >= 7 && v <= 12) return static_cast<SwitchId>(v - 7);
    return std::nullopt;
}

// Rotate a fault label one leg forward (A -> B -> C).
inline DiagnosisLabel rotate_label(DiagnosisLabel label) {
    const auto sw = label_switch(label);
    if (!sw) return label;
    const int v = static_cast<int>(label);
    const int base = v <= 6 ? 1 : 7;
    return static_cast<DiagnosisLabel>(base + static_cast<int>(rotate_switch(*sw)));
}

struct Diagnosis {
    DiagnosisLabel label = DiagnosisLabel::healthy;
    RuleCode code;
    std::optional<PhaseId> faulty_phase;
    double td_fault = 0.0;  // s
};

// Builds the rule code from the per-phase summaries. The faulty phase is the
// one with the longest detected fault; its summary supplies the feature bits.
inline RuleCode encode(std::span<const FeatureSummary> summaries, const Thresholds& thr) {
    thr.validate();
    if (summaries.size() != 3) throw std::invalid_argument("encode: expected three phase summaries");
    int fp = 0;
    for (int p = 1; p < 3; ++p)
        if (summaries[p].td_fault > summaries[fp].td_fault) fp = p;

    RuleCode code;
    const auto& s = summaries[fp];
    if (s.td_fault < thr.td_min) return code;  // all-zero, phase A
    code.fault_present = true;
    code.phase = static_cast<PhaseId>(fp);
    // The record's own pre/post-fault RMS is the reference when available,
    // so amplitude variation between records does not skew the rise test.
    // Faults shorter than the analysis window can hide the rise behind the
    // DC-fundamental cross term; dominant non-harmonic distortion is the
    // equivalent DC-rail signature and counts as the same evidence.
    const double reference = s.i_rms_baseline > 0.0 ? s.i_rms_baseline : thr.nominal_rms;
    code.rms_increased = s.i_rms_mean > (1.0 + thr.rms_rise) * reference ||
                         s.tnhd_mean >= thr.tnhd_short;
    code.harmonic_signature = s.thd_mean >= thr.thd_open;
    code.negative_shift = s.i_ave_mean <= -thr.ave_shift;
    return code;
}

// Fixed decision table. Open faults show a harmonic-rich drop (THD high, RMS
// not raised); shorts show an RMS rise with low THD. The DC shift sign picks
// the switch: a suppressed positive half or a negative DC rail both shift
// the average negative.
inline Diagnosis classify(const RuleCode& code, double td_fault = 0.0) {
    Diagnosis d;
    d.code = code;
    d.td_fault = td_fault;
    if (!code.fault_present) {
        d.label = DiagnosisLabel::healthy;
        return d;
    }
    d.faulty_phase = code.phase;
    if (code.harmonic_signature && !code.rms_increased) {
        d.label = label_from(FaultKind::open_circuit,
                             switch_from(code.phase, code.negative_shift));
    } else if (code.rms_increased && !code.harmonic_signature) {
        d.label = label_from(FaultKind::short_circuit,
                             switch_from(code.phase, !code.negative_shift));
    } else {
        d.label = DiagnosisLabel::unknown;
    }
    return d;
}

// End-to-end pipeline: transform, feature tracks, summaries, rule code,
// decision.
inline Diagnosis diagnose(const ThreePhaseRecord& record, const WindowSpec& window = {},
                          const Thresholds& thr = {}) {
    const auto tracks = compute_feature_tracks(record, window);
    const auto summaries = summarize(tracks, thr.twd_fault);
    const auto code = encode(summaries, thr);
    const int fp = static_cast<int>(code.phase);
    return classify(code, code.fault_present ? summaries[fp].td_fault : 0.0);
}

}  // namespace vsidiag
