#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "emba/bench.hpp"

using namespace emba;

namespace {

const Width w8 = Width::of(8);
const Width w64 = Width::of(64);

BenchConfig quick_config(Width w) {
    BenchConfig cfg;
    cfg.width = w;
    cfg.rules = default_ruleset(w);
    cfg.samples = 500;
    cfg.zero_timing = true;  // also lifts the wall-clock limit, so cap growth
    cfg.limits.max_iterations = 8;
    cfg.limits.max_nodes = 8000;
    return cfg;
}

}  // namespace

TEST_CASE("parse_dataset: entry shapes") {
    auto one = parse_dataset("x+y\n", w8);
    REQUIRE(one.size() == 1);
    CHECK(one[0].obfuscated == "x+y");
    CHECK_FALSE(one[0].has_ground_truth());

    auto gt = parse_dataset("(x|y)+y-(~x&y),x+y\n", w8);
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].ground_truth == "x+y");

    auto skipped = parse_dataset("# comment\n\nx^x,0\n", w8);
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].index == 0);
    CHECK(skipped[0].obfuscated == "x^x");
}

TEST_CASE("parse_dataset: malformed line reports its number") {
    try {
        parse_dataset("x+y\nx+\n", w8);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.message.find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_dataset: missing file") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/corpus.txt", w8), IoError);
}

TEST_CASE("run_entry: the obfuscated addition succeeds") {
    DatasetEntry entry{0, "(x|y)+y-(~x&y)", "x+y"};
    auto res = run_entry(entry, quick_config(w8));
    CHECK(res.input_size == 11);
    CHECK(res.output_size == 3);
    CHECK(res.success);
    CHECK(res.matched_gt);
    CHECK((res.verified == VerifyOutcome::Equivalent ||
           res.verified == VerifyOutcome::ProbablyEquivalent));
}

TEST_CASE("run_entry: already-minimal input counts as failure") {
    DatasetEntry entry{0, "x", ""};
    auto cfg = quick_config(w8);
    auto res = run_entry(entry, cfg);
    CHECK(res.input_size == 1);
    CHECK(res.output_size == 1);
    CHECK_FALSE(res.success);

    cfg.allow_equal = true;
    auto res2 = run_entry(entry, cfg);
    CHECK(res2.success);
}

TEST_CASE("report arithmetic: 267 of 323 is 82.66%") {
    std::vector<EntryResult> entries(323);
    for (int i = 0; i < 323; ++i) {
        entries[i].index = i;
        entries[i].input_size = 10;
        entries[i].output_size = i < 267 ? 3 : 10;
        entries[i].verified = VerifyOutcome::Equivalent;
        entries[i].success = i < 267;
    }
    auto r = BenchReport::aggregate(std::move(entries));
    CHECK(r.total == 323);
    CHECK(r.successes == 267);
    CHECK(r.failures == 56);
    CHECK(r.success_rate == doctest::Approx(82.66).epsilon(1e-9));
    auto text = write_report(r, ReportFormat::Text);
    CHECK(text.find("82.66") != std::string::npos);
}

TEST_CASE("report aggregates recompute from per-entry rows") {
    std::vector<EntryResult> entries;
    for (int i = 0; i < 7; ++i) {
        EntryResult e;
        e.index = i;
        e.input_size = 10 + i;
        e.output_size = i % 2 ? 3 : 10 + i;
        e.verified = VerifyOutcome::Equivalent;
        e.success = i % 2 == 1;
        entries.push_back(e);
    }
    auto r = BenchReport::aggregate(entries);
    CHECK(r.total == r.successes + r.failures);
    int succ = 0;
    double ratio = 0;
    for (const auto& e : r.per_entry) {
        if (e.success) {
            ++succ;
            ratio += 1.0 - static_cast<double>(e.output_size) / e.input_size;
        }
    }
    CHECK(succ == r.successes);
    CHECK(r.simplification_ratio ==
          doctest::Approx(std::round(100.0 * ratio / succ * 100.0) / 100.0));
}

TEST_CASE("write_report: csv") {
    BenchReport empty = BenchReport::aggregate({});
    CHECK(write_report(empty, ReportFormat::Csv) ==
          "index,input_size,output_size,verified,success,millis,stop_reason,output\n");

    EntryResult e;
    e.index = 0;
    e.input_size = 11;
    e.output_size = 3;
    e.output = "x+y";
    e.verified = VerifyOutcome::Equivalent;
    e.success = true;
    e.stop_reason = StopReason::Saturated;
    auto r = BenchReport::aggregate({e});
    auto csv = write_report(r, ReportFormat::Csv);
    CHECK(csv.find("0,11,3,equivalent,true,0,saturated,x+y\n") != std::string::npos);
}

TEST_CASE("write_report: json round trip") {
    EntryResult e;
    e.index = 0;
    e.input_size = 11;
    e.output_size = 3;
    e.output = "x+y";
    e.verified = VerifyOutcome::Equivalent;
    e.success = true;
    auto r = BenchReport::aggregate({e});
    auto j = nlohmann::json::parse(write_report(r, ReportFormat::Json));
    CHECK(j["total"] == 1);
    CHECK(j["successes"] == 1);
    CHECK(j["per_entry"][0]["output"] == "x+y");
    CHECK(j["per_entry"][0]["input_size"] == 11);
    CHECK(j["per_entry"][0]["verified"] == "equivalent");
    CHECK(j["success_rate"] == doctest::Approx(100.0));
}

TEST_CASE("generate_corpus: deterministic and oracle-equivalent") {
    std::vector<ExprPtr> seeds{parse("x+y", w64), parse("x^y", w64)};
    CorpusConfig cfg;
    cfg.count = 10;
    cfg.rng_seed = 0xC0FFEE;
    auto a = generate_corpus(seeds, cfg);
    auto b = generate_corpus(seeds, cfg);
    REQUIRE(a.size() == 10);
    CHECK(dataset_to_text(a) == dataset_to_text(b));
    for (const auto& entry : a) {
        REQUIRE(entry.has_ground_truth());
        auto obf = parse(entry.obfuscated, w64);
        auto gt = parse(entry.ground_truth, w64);
        CHECK(ast_size(*obf) > ast_size(*gt));
        CHECK(verify_equiv(*obf, *gt, w64, 500, 1).status != EquivStatus::NotEquivalent);
    }
}

TEST_CASE("generate_corpus: emits the dataset format it loads") {
    std::vector<ExprPtr> seeds{parse("x+y", w64)};
    CorpusConfig cfg;
    cfg.count = 5;
    cfg.rng_seed = 7;
    auto entries = generate_corpus(seeds, cfg);
    auto reloaded = parse_dataset(dataset_to_text(entries), w64);
    REQUIRE(reloaded.size() == entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        CHECK(reloaded[i].obfuscated == entries[i].obfuscated);
        CHECK(reloaded[i].ground_truth == entries[i].ground_truth);
    }
}

TEST_CASE("run_benchmark: parallel equals serial") {
    std::vector<ExprPtr> seeds{parse("x+y", w8), parse("x&y", w8)};
    CorpusConfig ccfg;
    ccfg.width = w8;
    ccfg.count = 8;
    ccfg.rng_seed = 3;
    auto entries = generate_corpus(seeds, ccfg);

    auto cfg = quick_config(w8);
    cfg.jobs = 1;
    auto serial = run_benchmark(entries, cfg);
    cfg.jobs = 4;
    auto parallel = run_benchmark(entries, cfg);
    CHECK(write_report(serial, ReportFormat::Csv) == write_report(parallel, ReportFormat::Csv));
    CHECK(serial.success_rate == parallel.success_rate);
}
