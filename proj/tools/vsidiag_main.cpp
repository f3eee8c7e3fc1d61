// Command-line front end: synthesize labeled records, analyze them into
// feature/TFR exports, diagnose single records, and run the benchmark.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "vsidiag/vsidiag.hpp"

namespace fs = std::filesystem;
using namespace vsidiag;

namespace {

struct CommonOpts {
    std::string out_dir = ".";
    std::string config_path;
    std::size_t window_len = WindowSpec{}.length;
    std::size_t hop = WindowSpec{}.hop;
    double threshold = Thresholds{}.twd_fault;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out-dir", opts.out_dir, "Output directory")
        ->envname("VSIDIAG_OUT_DIR");
    cmd->add_option("--config", opts.config_path, "Thresholds JSON file");
    cmd->add_option("--window-len", opts.window_len, "Analysis window length, samples");
    cmd->add_option("--hop", opts.hop, "Frame hop, samples");
    cmd->add_option("--threshold", opts.threshold, "Fault distortion threshold (ratio)");
}

WindowSpec window_from(const CommonOpts& opts) {
    WindowSpec w;
    w.length = opts.window_len;
    w.hop = opts.hop;
    if (w.dft_size < w.length) w.dft_size = w.length;
    w.validate();
    return w;
}

Thresholds thresholds_from(const CommonOpts& opts) {
    Thresholds t;
    if (!opts.config_path.empty()) t = read_thresholds(opts.config_path);
    t.twd_fault = opts.threshold;
    t.validate();
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-phase inverter switch-fault synthesis and diagnosis toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Synthesize a labeled three-phase record");
    CommonOpts synth_opts;
    std::string fault_kind = "none", switch_name = "S1", record_name = "record.csv";
    FaultSpec fault_defaults;
    SignalConfig config;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;
    add_common(synth, synth_opts);
    synth->add_option("--fault", fault_kind, "none|open|short");
    synth->add_option("--switch", switch_name, "S1..S6");
    synth->add_option("--start", fault_defaults.start, "Fault start, s");
    synth->add_option("--duration", fault_defaults.duration, "Fault duration, s");
    synth->add_option("--amp", config.fundamental_peak, "Fundamental peak, A");
    synth->add_option("--record-duration", config.duration, "Record length, s");
    synth->add_option("--snr", snr_db, "Noise SNR, dB (omit for noiseless)");
    synth->add_option("--seed", seed, "Noise seed");
    synth->add_option("--name", record_name, "Output CSV file name");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Export feature tracks, summaries and TFRs");
    CommonOpts analyze_opts;
    std::string analyze_input;
    bool with_tfr = false;
    add_common(analyze, analyze_opts);
    analyze->add_option("--input", analyze_input, "Record CSV")->required();
    analyze->add_flag("--tfr", with_tfr, "Also export per-phase TFR matrices");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Classify a record and print the diagnosis");
    CommonOpts diag_opts;
    std::string diag_input;
    bool write_diag = false;
    add_common(diag, diag_opts);
    diag->add_option("--input", diag_input, "Record CSV")->required();
    diag->add_flag("--write", write_diag, "Also write diagnosis.json to the output directory");

    // bench
    auto* bench = app.add_subcommand("bench", "Generate the corpus and report accuracy");
    CommonOpts bench_opts;
    CorpusSpec corpus_spec;
    bool nominal_only = false;
    add_common(bench, bench_opts);
    bench->add_option("--seed", corpus_spec.seed, "Corpus seed");
    bench->add_option("--per-class", corpus_spec.per_class, "Records per fault class");
    bench->add_flag("--nominal", nominal_only, "Noiseless nominal corpus instead of the grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const fs::path out_dir = synth_opts.out_dir;
            fs::create_directories(out_dir);
            FaultSpec fault = fault_defaults;
            fault.kind = fault_kind_from_string(fault_kind);
            fault.switch_id = switch_from_string(switch_name);
            auto rec = inject_fault(synth_healthy(config), fault);
            rec = add_noise(std::move(rec), snr_db, seed);
            const auto path = out_dir / record_name;
            write_record(rec, path);
            std::cout << "wrote " << path.string() << " and " << sidecar_path(path).string()
                      << "\n";
        } else if (*analyze) {
            const fs::path out_dir = analyze_opts.out_dir;
            fs::create_directories(out_dir);
            const auto rec = read_record(analyze_input);
            const auto window = window_from(analyze_opts);
            const auto tracks = compute_feature_tracks(rec, window);
            for (int p = 0; p < 3; ++p) {
                const auto phase = static_cast<PhaseId>(p);
                write_tracks(tracks, phase,
                             out_dir / (std::string("tracks_") + to_string(phase) + ".csv"));
                if (with_tfr)
                    write_tfr(stft(rec.samples[p], rec.sample_rate, window),
                              out_dir / (std::string("tfr_") + to_string(phase) + ".csv"));
            }
            const auto summaries = summarize(tracks, thresholds_from(analyze_opts).twd_fault);
            detail::write_text_file(out_dir / "summary.json",
                                    summaries_to_json(summaries).dump(2) + "\n");
            std::cout << "wrote feature exports to " << out_dir.string() << "\n";
        } else if (*diag) {
            const auto rec = read_record(diag_input);
            const auto d = diagnose(rec, window_from(diag_opts), thresholds_from(diag_opts));
            const auto j = diagnosis_to_json(d);
            std::cout << j.dump(2) << "\n";
            if (write_diag) {
                const fs::path out_dir = diag_opts.out_dir;
                fs::create_directories(out_dir);
                detail::write_text_file(out_dir / "diagnosis.json", j.dump(2) + "\n");
            }
        } else if (*bench) {
            if (nominal_only) {
                auto nominal = nominal_corpus_spec(corpus_spec.per_class);
                nominal.seed = corpus_spec.seed;
                corpus_spec = nominal;
            }
            const auto corpus = gen_corpus(corpus_spec);
            const auto report = evaluate(corpus, window_from(bench_opts),
                                         thresholds_from(bench_opts), corpus_spec.seed);
            export_report(report, bench_opts.out_dir);
            std::cout << report_text(report);
            std::cout << "wrote report.json and report.txt to " << bench_opts.out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
