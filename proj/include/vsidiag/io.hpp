#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsidiag/classifier.hpp"
#include "vsidiag/features.hpp"
#include "vsidiag/signal_model.hpp"
#include "vsidiag/stft.hpp"

namespace vsidiag {

namespace detail {

inline std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("malformed numeric field in ") + what + ": '" + s + "'");
    }
}

}  // namespace detail

// ---- JSON bindings ---------------------------------------------------------

inline void to_json(nlohmann::json& j, const SignalConfig& c) {
    j = {{"sample_rate_hz", c.sample_rate},
         {"fundamental_hz", c.fundamental},
         {"duration_s", c.duration},
         {"fundamental_peak_a", c.fundamental_peak},
         {"baseline_distortion", c.baseline_distortion}};
}

inline void from_json(const nlohmann::json& j, SignalConfig& c) {
    c.sample_rate = j.value("sample_rate_hz", c.sample_rate);
    c.fundamental = j.value("fundamental_hz", c.fundamental);
    c.duration = j.value("duration_s", c.duration);
    c.fundamental_peak = j.value("fundamental_peak_a", c.fundamental_peak);
    c.baseline_distortion = j.value("baseline_distortion", c.baseline_distortion);
}

inline FaultKind fault_kind_from_string(const std::string& s) {
    if (s == "none") return FaultKind::none;
    if (s == "open") return FaultKind::open_circuit;
    if (s == "short") return FaultKind::short_circuit;
    throw std::runtime_error("unknown fault kind: " + s);
}

inline SwitchId switch_from_string(const std::string& s) {
    for (int i = 0; i < 6; ++i)
        if (s == to_string(static_cast<SwitchId>(i))) return static_cast<SwitchId>(i);
    throw std::runtime_error("unknown switch id: " + s);
}

inline void to_json(nlohmann::json& j, const FaultSpec& f) {
    j = {{"kind", to_string(f.kind)},
         {"switch", to_string(f.switch_id)},
         {"start_s", f.start},
         {"duration_s", f.duration},
         {"open_residual_a", f.open_residual},
         {"open_compensation", f.open_compensation},
         {"short_dc_offset_a", f.short_dc_offset},
         {"short_fundamental_scale", f.short_fundamental_scale}};
}

inline void from_json(const nlohmann::json& j, FaultSpec& f) {
    f.kind = fault_kind_from_string(j.value("kind", std::string("none")));
    f.switch_id = switch_from_string(j.value("switch", std::string("S1")));
    f.start = j.value("start_s", f.start);
    f.duration = j.value("duration_s", f.duration);
    f.open_residual = j.value("open_residual_a", f.open_residual);
    f.open_compensation = j.value("open_compensation", f.open_compensation);
    f.short_dc_offset = j.value("short_dc_offset_a", f.short_dc_offset);
    f.short_fundamental_scale = j.value("short_fundamental_scale", f.short_fundamental_scale);
}

inline void to_json(nlohmann::json& j, const WindowSpec& w) {
    j = {{"shape", w.shape == WindowShape::hann ? "hann" : "rectangular"},
         {"length", w.length},
         {"hop", w.hop},
         {"dft_size", w.dft_size}};
}

inline void from_json(const nlohmann::json& j, WindowSpec& w) {
    const auto shape = j.value("shape", std::string("hann"));
    if (shape == "hann")
        w.shape = WindowShape::hann;
    else if (shape == "rectangular")
        w.shape = WindowShape::rectangular;
    else
        throw std::runtime_error("unknown window shape: " + shape);
    w.length = j.value("length", w.length);
    w.hop = j.value("hop", w.hop);
    w.dft_size = j.value("dft_size", w.dft_size);
}

inline void to_json(nlohmann::json& j, const Thresholds& t) {
    j = {{"twd_fault", t.twd_fault},
         {"td_min_s", t.td_min},
         {"rms_rise", t.rms_rise},
         {"thd_open", t.thd_open},
         {"ave_shift_a", t.ave_shift},
         {"nominal_rms_a", t.nominal_rms},
         {"tnhd_short", t.tnhd_short}};
}

inline void from_json(const nlohmann::json& j, Thresholds& t) {
    t.twd_fault = j.value("twd_fault", t.twd_fault);
    t.td_min = j.value("td_min_s", t.td_min);
    t.rms_rise = j.value("rms_rise", t.rms_rise);
    t.thd_open = j.value("thd_open", t.thd_open);
    t.ave_shift = j.value("ave_shift_a", t.ave_shift);
    t.nominal_rms = j.value("nominal_rms_a", t.nominal_rms);
    t.tnhd_short = j.value("tnhd_short", t.tnhd_short);
}

inline void to_json(nlohmann::json& j, const FeatureSummary& s) {
    j = {{"td_fault_s", s.td_fault},
         {"thd_mean", s.thd_mean},
         {"tnhd_mean", s.tnhd_mean},
         {"twd_mean", s.twd_mean},
         {"i_rms_mean_a", s.i_rms_mean},
         {"i_ave_mean_a", s.i_ave_mean}};
    if (s.fault_interval)
        j["fault_interval_s"] = {s.fault_interval->t_on, s.fault_interval->t_off};
}

inline nlohmann::json summaries_to_json(const std::array<FeatureSummary, 3>& summaries) {
    nlohmann::json j;
    for (int p = 0; p < 3; ++p) j[to_string(static_cast<PhaseId>(p))] = summaries[p];
    return j;
}

inline nlohmann::json diagnosis_to_json(const Diagnosis& d) {
    nlohmann::json j = {{"label", to_string(d.label)},
                        {"code_bits", d.code.bits()},
                        {"td_fault_s", d.td_fault}};
    if (d.faulty_phase)
        j["phase"] = to_string(*d.faulty_phase);
    else
        j["phase"] = nullptr;
    return j;
}

// ---- Record CSV + sidecar ---------------------------------------------------

inline std::filesystem::path sidecar_path(std::filesystem::path csv_path) {
    csv_path.replace_extension(".json");
    return csv_path;
}

inline std::string record_to_csv(const ThreePhaseRecord& record) {
    record.validate();
    std::string out = "t,ia,ib,ic\n";
    const double ts = 1.0 / record.sample_rate;
    for (std::size_t i = 0; i < record.size(); ++i) {
        out += detail::format_value(static_cast<double>(i) * ts);
        for (int p = 0; p < 3; ++p) {
            out += ',';
            out += detail::format_value(record.samples[p][i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_record(const ThreePhaseRecord& record, const std::filesystem::path& csv_path) {
    detail::write_text_file(csv_path, record_to_csv(record));
    nlohmann::json side = {{"config", record.config}, {"label", record.label}};
    detail::write_text_file(sidecar_path(csv_path), side.dump(2) + "\n");
}

inline ThreePhaseRecord read_record(const std::filesystem::path& csv_path) {
    const std::string text = detail::read_text_file(csv_path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty record file: " + csv_path.string());
    {
        const auto header = detail::split_csv_line(line);
        if (header.size() != 4 || header[0] != "t")
            throw std::runtime_error("expected header 't,ia,ib,ic' in " + csv_path.string());
    }
    ThreePhaseRecord rec;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error("expected 4 columns per row in " + csv_path.string());
        times.push_back(detail::parse_double(fields[0], "record csv"));
        for (int p = 0; p < 3; ++p)
            rec.samples[p].push_back(detail::parse_double(fields[p + 1], "record csv"));
    }
    if (times.size() < 2) throw std::runtime_error("record too short: " + csv_path.string());
    rec.sample_rate = std::round(1.0 / (times[1] - times[0]));

    const auto side = sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        const auto j = nlohmann::json::parse(detail::read_text_file(side));
        rec.config = j.value("config", SignalConfig{});
        rec.label = j.value("label", FaultSpec{});
        rec.sample_rate = rec.config.sample_rate;
    } else {
        rec.config.sample_rate = rec.sample_rate;
        rec.config.duration = static_cast<double>(times.size()) / rec.sample_rate;
    }
    rec.validate();
    return rec;
}

// ---- Track / TFR exports ----------------------------------------------------

inline std::string tracks_to_csv(const FeatureTracks& tracks, PhaseId phase) {
    const auto& ph = tracks.phase[static_cast<int>(phase)];
    std::string out = "t,irms,ifund,iave,thd,tnhd,twd\n";
    for (std::size_t k = 0; k < tracks.frame_times.size(); ++k) {
        out += detail::format_value(tracks.frame_times[k]);
        for (const auto* track : {&ph.i_rms, &ph.i_fund, &ph.i_ave, &ph.thd, &ph.tnhd, &ph.twd}) {
            out += ',';
            out += detail::format_value((*track)[k]);
        }
        out += '\n';
    }
    return out;
}

inline void write_tracks(const FeatureTracks& tracks, PhaseId phase,
                         const std::filesystem::path& path) {
    detail::write_text_file(path, tracks_to_csv(tracks, phase));
}

// Magnitude matrix, rows = frames, columns = bins, plus a JSON sidecar with
// the framing metadata.
inline void write_tfr(const TimeFrequencyMap& tfr, const std::filesystem::path& csv_path) {
    std::string out;
    for (std::size_t k = 0; k < tfr.frame_count(); ++k) {
        for (std::size_t b = 0; b < tfr.bin_count(); ++b) {
            if (b) out += ',';
            out += detail::format_value(tfr.single_sided_amplitude(k, b));
        }
        out += '\n';
    }
    detail::write_text_file(csv_path, out);
    nlohmann::json side = {{"frame_times_s", tfr.frame_times},
                           {"bin_spacing_hz", tfr.bin_spacing},
                           {"window", tfr.window}};
    detail::write_text_file(sidecar_path(csv_path), side.dump(2) + "\n");
}

inline Thresholds read_thresholds(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(detail::read_text_file(path));
    Thresholds t = j.get<Thresholds>();
    t.validate();
    return t;
}

}  // namespace vsidiag
