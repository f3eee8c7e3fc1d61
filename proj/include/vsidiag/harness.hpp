#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsidiag/classifier.hpp"
#include "vsidiag/io.hpp"
#include "vsidiag/signal_model.hpp"

namespace vsidiag {

struct FaultClass {
    FaultKind kind = FaultKind::none;
    SwitchId switch_id = SwitchId::s1;
};

inline std::vector<FaultClass> all_fault_classes() {
    std::vector<FaultClass> out;
    for (int s = 0; s < 6; ++s)
        out.push_back({FaultKind::open_circuit, static_cast<SwitchId>(s)});
    for (int s = 0; s < 6; ++s)
        out.push_back({FaultKind::short_circuit, static_cast<SwitchId>(s)});
    return out;
}

struct CorpusSpec {
    std::uint64_t seed = 42;
    std::size_t per_class = 5;
    std::vector<FaultClass> classes = all_fault_classes();
    std::vector<double> starts_s = {0.150, 0.180, 0.195, 0.210, 0.240};
    std::vector<double> durations_s = {0.040, 0.060, 0.080};
    std::vector<double> snrs_db = {30.0, 40.0};  // empty -> noiseless
    std::vector<double> amplitude_scales = {0.9, 1.0, 1.1};
    SignalConfig base;
};

// Single nominal operating point, no noise.
inline CorpusSpec nominal_corpus_spec(std::size_t per_class = 1) {
    CorpusSpec spec;
    spec.per_class = per_class;
    spec.starts_s = {0.195};
    spec.durations_s = {0.060};
    spec.snrs_db = {};
    spec.amplitude_scales = {1.0};
    return spec;
}

inline std::vector<ThreePhaseRecord> gen_corpus(const CorpusSpec& spec) {
    spec.base.validate();
    std::vector<ThreePhaseRecord> out;
    out.reserve(spec.per_class * spec.classes.size());

    const std::size_t n_snr = spec.snrs_db.empty() ? 1 : spec.snrs_db.size();
    const std::size_t grid =
        spec.starts_s.size() * spec.durations_s.size() * n_snr * spec.amplitude_scales.size();
    if (grid == 0) throw std::invalid_argument("gen_corpus: empty variation grid");

    for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
        // Deterministic draw without replacement from the variation grid.
        std::vector<std::size_t> order(grid);
        for (std::size_t i = 0; i < grid; ++i) order[i] = i;
        detail::SplitMix64 rng(detail::mix_seed(spec.seed, 0x1000 + ci));
        for (std::size_t i = grid; i > 1; --i) {
            const std::size_t j = rng.next() % i;
            std::swap(order[i - 1], order[j]);
        }

        for (std::size_t r = 0; r < spec.per_class; ++r) {
            std::size_t idx = order[r % grid];
            const std::size_t ai = idx % spec.amplitude_scales.size();
            idx /= spec.amplitude_scales.size();
            const std::size_t si = idx % n_snr;
            idx /= n_snr;
            const std::size_t di = idx % spec.durations_s.size();
            idx /= spec.durations_s.size();
            const std::size_t ti = idx % spec.starts_s.size();

            SignalConfig config = spec.base;
            config.fundamental_peak *= spec.amplitude_scales[ai];

            FaultSpec fault;
            fault.kind = spec.classes[ci].kind;
            fault.switch_id = spec.classes[ci].switch_id;
            fault.start = spec.starts_s[ti];
            fault.duration = spec.durations_s[di];

            auto rec = inject_fault(synth_healthy(config), fault);
            if (!spec.snrs_db.empty())
                rec = add_noise(std::move(rec), spec.snrs_db[si],
                                detail::mix_seed(spec.seed, 0x2000 + ci * 64 + r));
            out.push_back(std::move(rec));
        }
    }
    return out;
}

struct ClassResult {
    DiagnosisLabel truth = DiagnosisLabel::healthy;
    int correct = 0;
    int total = 0;
    double percent() const {
        return total ? 100.0 * static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    }
};

struct AccuracyReport {
    std::vector<ClassResult> per_class;  // in first-seen truth order
    int total = 0;
    int correct = 0;
    double overall_percent = 0.0;
    // confusion[truth][predicted] over the full label set
    std::array<std::array<int, kLabelCount>, kLabelCount> confusion{};
    std::uint64_t seed = 0;
    Thresholds thresholds;
    WindowSpec window;

    bool operator==(const AccuracyReport& other) const {
        if (per_class.size() != other.per_class.size()) return false;
        for (std::size_t i = 0; i < per_class.size(); ++i) {
            const auto& a = per_class[i];
            const auto& b = other.per_class[i];
            if (a.truth != b.truth || a.correct != b.correct || a.total != b.total) return false;
        }
        return total == other.total && correct == other.correct &&
               overall_percent == other.overall_percent && confusion == other.confusion &&
               seed == other.seed;
    }
};

inline AccuracyReport evaluate(std::span<const ThreePhaseRecord> corpus,
                               const WindowSpec& window = {}, const Thresholds& thr = {},
                               std::uint64_t seed = 0) {
    if (corpus.empty()) throw std::invalid_argument("evaluate: empty corpus");
    AccuracyReport report;
    report.seed = seed;
    report.thresholds = thr;
    report.window = window;

    auto class_index = [&report](DiagnosisLabel truth) {
        for (std::size_t i = 0; i < report.per_class.size(); ++i)
            if (report.per_class[i].truth == truth) return i;
        report.per_class.push_back({truth, 0, 0});
        return report.per_class.size() - 1;
    };

    for (const auto& rec : corpus) {
        const auto truth = label_from(rec.label.kind, rec.label.switch_id);
        const auto pred = diagnose(rec, window, thr).label;
        const auto ci = class_index(truth);
        ++report.per_class[ci].total;
        ++report.total;
        if (pred == truth) {
            ++report.per_class[ci].correct;
            ++report.correct;
        }
        ++report.confusion[static_cast<int>(truth)][static_cast<int>(pred)];
    }
    report.overall_percent = 100.0 * static_cast<double>(report.correct) /
                             static_cast<double>(report.total);
    return report;
}

inline void to_json(nlohmann::json& j, const ClassResult& r) {
    j = {{"class", to_string(r.truth)}, {"correct", r.correct}, {"total", r.total},
         {"percent", r.percent()}};
}

inline void to_json(nlohmann::json& j, const AccuracyReport& r) {
    nlohmann::json confusion = nlohmann::json::object();
    for (int t = 0; t < kLabelCount; ++t) {
        int row_total = 0;
        for (int p = 0; p < kLabelCount; ++p) row_total += r.confusion[t][p];
        if (!row_total) continue;
        nlohmann::json row = nlohmann::json::object();
        for (int p = 0; p < kLabelCount; ++p)
            if (r.confusion[t][p])
                row[to_string(static_cast<DiagnosisLabel>(p))] = r.confusion[t][p];
        confusion[to_string(static_cast<DiagnosisLabel>(t))] = row;
    }
    j = {{"per_class", r.per_class},
         {"total", r.total},
         {"correct", r.correct},
         {"overall_percent", r.overall_percent},
         {"confusion", confusion},
         {"seed", r.seed},
         {"thresholds", r.thresholds},
         {"window", r.window}};
}

inline void from_json(const nlohmann::json& j, AccuracyReport& r) {
    r = AccuracyReport{};
    for (const auto& e : j.at("per_class")) {
        ClassResult cr;
        const auto name = e.at("class").get<std::string>();
        cr.correct = e.at("correct").get<int>();
        cr.total = e.at("total").get<int>();
        cr.truth = DiagnosisLabel::unknown;
        for (int v = 0; v < kLabelCount; ++v)
            if (to_string(static_cast<DiagnosisLabel>(v)) == name)
                cr.truth = static_cast<DiagnosisLabel>(v);
        r.per_class.push_back(cr);
    }
    r.total = j.at("total").get<int>();
    r.correct = j.at("correct").get<int>();
    r.overall_percent = j.at("overall_percent").get<double>();
    for (const auto& [tname, row] : j.at("confusion").items())
        for (const auto& [pname, count] : row.items())
            for (int t = 0; t < kLabelCount; ++t)
                for (int p = 0; p < kLabelCount; ++p)
                    if (to_string(static_cast<DiagnosisLabel>(t)) == tname &&
                        to_string(static_cast<DiagnosisLabel>(p)) == pname)
                        r.confusion[t][p] = count.get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.thresholds = j.value("thresholds", Thresholds{});
    r.window = j.value("window", WindowSpec{});
}

// Plain-text table: open-circuit rows S1..S6, then short-circuit, then the
// overall line and the confusion counts.
inline std::string report_text(const AccuracyReport& r) {
    if (r.total == 0) throw std::invalid_argument("report_text: empty report");
    char buf[160];
    std::string out;
    out += "Faults          Switch    % Correct Classification\n";

    auto find_class = [&r](DiagnosisLabel truth) -> const ClassResult* {
        for (const auto& c : r.per_class)
            if (c.truth == truth) return &c;
        return nullptr;
    };

    auto emit_rows = [&](FaultKind kind, const char* group) {
        bool first = true;
        for (int s = 0; s < 6; ++s) {
            const auto* c = find_class(label_from(kind, static_cast<SwitchId>(s)));
            if (!c) continue;
            std::snprintf(buf, sizeof(buf), "%-15s %-9s %.1f\n", first ? group : "",
                          to_string(static_cast<SwitchId>(s)), c->percent());
            out += buf;
            first = false;
        }
    };
    emit_rows(FaultKind::open_circuit, "Open-Circuit");
    emit_rows(FaultKind::short_circuit, "Short-Circuit");
    if (const auto* c = find_class(DiagnosisLabel::healthy)) {
        std::snprintf(buf, sizeof(buf), "%-15s %-9s %.1f\n", "Healthy", "-", c->percent());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-15s %-9s %.1f   (%d/%d)\n", "Overall", "",
                  r.overall_percent, r.correct, r.total);
    out += buf;

    out += "\nConfusion (truth -> predicted):\n";
    for (int t = 0; t < kLabelCount; ++t) {
        int row_total = 0;
        for (int p = 0; p < kLabelCount; ++p) row_total += r.confusion[t][p];
        if (!row_total) continue;
        std::snprintf(buf, sizeof(buf), "  %-10s:", to_string(static_cast<DiagnosisLabel>(t)).c_str());
        out += buf;
        for (int p = 0; p < kLabelCount; ++p) {
            if (!r.confusion[t][p]) continue;
            std::snprintf(buf, sizeof(buf), " %s=%d",
                          to_string(static_cast<DiagnosisLabel>(p)).c_str(), r.confusion[t][p]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline void export_report(const AccuracyReport& report, const std::filesystem::path& out_dir) {
    if (report.total == 0) throw std::invalid_argument("export_report: empty report");
    std::filesystem::create_directories(out_dir);
    const nlohmann::json j = report;
    detail::write_text_file(out_dir / "report.json", j.dump(2) + "\n");
    detail::write_text_file(out_dir / "report.txt", report_text(report));
}

}  // namespace vsidiag
