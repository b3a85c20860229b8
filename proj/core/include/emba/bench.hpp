#pragma once

#include <string>
#include <vector>

#include "emba/expr.hpp"
#include "emba/rewrite.hpp"
#include "emba/semantics.hpp"

namespace emba {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct DatasetEntry {
    int index = 0;
    std::string obfuscated;
    std::string ground_truth;  // empty when absent

    bool has_ground_truth() const { return !ground_truth.empty(); }
};

// One entry per line: `obfuscated` or `obfuscated,ground_truth`.
// '#' lines and blank lines are skipped. Commas cannot occur inside the
// expression grammar, so the first comma splits.
std::vector<DatasetEntry> load_dataset(const std::string& path, Width w);
std::vector<DatasetEntry> parse_dataset(const std::string& text, Width w);

enum class VerifyOutcome { Equivalent, ProbablyEquivalent, NotEquivalent, Skipped };

const char* verify_outcome_name(VerifyOutcome v);

struct EntryResult {
    int index = 0;
    int input_size = 0;   // post-preprocess ast size
    int output_size = 0;
    std::string output;
    VerifyOutcome verified = VerifyOutcome::Skipped;
    bool success = false;
    bool matched_gt = false;  // output_size <= ground-truth size, when present
    int64_t millis = 0;       // simplify phase only
    StopReason stop_reason = StopReason::Saturated;
};

struct BenchReport {
    int total = 0;
    int successes = 0;
    int failures = 0;
    double success_rate = 0.0;           // percent, 2 decimals
    double simplification_ratio = 0.0;   // percent, mean over successes of 1 - out/in
    double total_seconds = 0.0;
    std::vector<EntryResult> per_entry;

    // Derives the aggregate fields from per_entry.
    static BenchReport aggregate(std::vector<EntryResult> entries);
};

struct BenchConfig {
    Width width{64};
    SaturationLimits limits;
    RuleSet rules;
    bool verify = true;
    uint64_t samples = 10000;
    uint64_t seed = 0;
    bool allow_equal = false;  // success on output_size == input_size too
    int jobs = 1;
    bool zero_timing = false;  // deterministic reports for golden tests
};

EntryResult run_entry(const DatasetEntry& entry, const BenchConfig& cfg);
BenchReport run_benchmark(const std::vector<DatasetEntry>& entries, const BenchConfig& cfg);

enum class ReportFormat { Json, Csv, Text };

std::string write_report(const BenchReport& r, ReportFormat format);

struct GenerationFailed : std::runtime_error {
    GenerationFailed() : std::runtime_error("rewrite sequence produced no growth") {}
};

struct CorpusConfig {
    Width width{64};
    int min_rewrites = 2;
    int max_rewrites = 5;
    int count = 60;
    uint64_t rng_seed = 0;
};

// Obfuscates random seeds by running catalog identities in the growing
// direction as destructive textual rewrites; every emitted entry is
// oracle-verified against its seed.
std::vector<DatasetEntry> generate_corpus(const std::vector<ExprPtr>& seeds,
                                          const CorpusConfig& cfg);

std::string dataset_to_text(const std::vector<DatasetEntry>& entries);

}  // namespace emba
