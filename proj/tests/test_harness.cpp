#include <catch2/catch_amalgamated.hpp>

#include "vsidiag/vsidiag.hpp"

using namespace vsidiag;
using Catch::Approx;

TEST_CASE("default corpus has five records per fault class", "[harness]") {
    CorpusSpec spec;
    const auto corpus = gen_corpus(spec);
    REQUIRE(corpus.size() == 60);

    std::map<DiagnosisLabel, int> counts;
    for (const auto& rec : corpus) {
        ++counts[label_from(rec.label.kind, rec.label.switch_id)];
        REQUIRE(rec.size() == 4000);
        REQUIRE(rec.label.kind != FaultKind::none);
        // Every grid choice comes from the declared variation sets.
        const bool start_ok = rec.label.start == 0.150 || rec.label.start == 0.180 ||
                              rec.label.start == 0.195 || rec.label.start == 0.210 ||
                              rec.label.start == 0.240;
        REQUIRE(start_ok);
        const bool dur_ok = rec.label.duration == 0.040 || rec.label.duration == 0.060 ||
                            rec.label.duration == 0.080;
        REQUIRE(dur_ok);
    }
    REQUIRE(counts.size() == 12);
    for (const auto& [label, n] : counts) REQUIRE(n == 5);
}

TEST_CASE("empty corpus spec produces an empty corpus", "[harness]") {
    CorpusSpec spec;
    spec.per_class = 0;
    REQUIRE(gen_corpus(spec).empty());
}

TEST_CASE("same seed reproduces the corpus byte for byte", "[harness]") {
    CorpusSpec spec;
    spec.per_class = 1;
    const auto a = gen_corpus(spec);
    const auto b = gen_corpus(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE(record_to_csv(a[i]) == record_to_csv(b[i]));

    spec.seed = 43;
    const auto c = gen_corpus(spec);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (record_to_csv(a[i]) != record_to_csv(c[i])) any_diff = true;
    REQUIRE(any_diff);
}

TEST_CASE("noiseless nominal corpus classifies perfectly", "[harness][pipeline]") {
    const auto corpus = gen_corpus(nominal_corpus_spec());
    const auto report = evaluate(corpus, WindowSpec{}, Thresholds{}, 42);
    REQUIRE(report.total == 12);
    REQUIRE(report.correct == 12);
    REQUIRE(report.overall_percent == 100.0);
}

TEST_CASE("healthy-only corpus stays healthy, with and without noise", "[harness][pipeline]") {
    CorpusSpec spec;
    spec.per_class = 4;
    spec.classes = {{FaultKind::none, SwitchId::s1}};
    const auto corpus = gen_corpus(spec);  // default grid includes 30 and 40 dB noise
    REQUIRE(corpus.size() == 4);
    const auto report = evaluate(corpus, WindowSpec{}, Thresholds{}, spec.seed);
    REQUIRE(report.overall_percent == 100.0);
    REQUIRE(report.per_class.size() == 1);
    REQUIRE(report.per_class[0].truth == DiagnosisLabel::healthy);
}

TEST_CASE("reports are deterministic given the seed", "[harness]") {
    auto spec = nominal_corpus_spec();
    const auto r1 = evaluate(gen_corpus(spec), WindowSpec{}, Thresholds{}, spec.seed);
    const auto r2 = evaluate(gen_corpus(spec), WindowSpec{}, Thresholds{}, spec.seed);
    REQUIRE(r1 == r2);
    REQUIRE(nlohmann::json(r1).dump() == nlohmann::json(r2).dump());
    REQUIRE(report_text(r1) == report_text(r2));
}

TEST_CASE("higher SNR never scores worse", "[harness][pipeline]") {
    CorpusSpec base;
    base.per_class = 2;
    base.snrs_db = {30.0};
    const auto low = evaluate(gen_corpus(base), WindowSpec{}, Thresholds{}, base.seed);
    base.snrs_db = {40.0};
    const auto high = evaluate(gen_corpus(base), WindowSpec{}, Thresholds{}, base.seed);
    REQUIRE(high.correct >= low.correct);
}

TEST_CASE("confusion matrix marginals match the class totals", "[harness]") {
    auto spec = nominal_corpus_spec(2);
    const auto report = evaluate(gen_corpus(spec), WindowSpec{}, Thresholds{}, spec.seed);
    for (const auto& c : report.per_class) {
        int row = 0;
        for (int p = 0; p < kLabelCount; ++p)
            row += report.confusion[static_cast<int>(c.truth)][p];
        REQUIRE(row == c.total);
    }
    int grand = 0;
    for (int t = 0; t < kLabelCount; ++t)
        for (int p = 0; p < kLabelCount; ++p) grand += report.confusion[t][p];
    REQUIRE(grand == report.total);
}
