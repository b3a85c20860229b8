#include "emba/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "emba/egraph.hpp"
#include "emba/extract.hpp"

namespace emba {

const char* verify_outcome_name(VerifyOutcome v) {
    switch (v) {
        case VerifyOutcome::Equivalent: return "equivalent";
        case VerifyOutcome::ProbablyEquivalent: return "probably-equivalent";
        case VerifyOutcome::NotEquivalent: return "not-equivalent";
        case VerifyOutcome::Skipped: return "skipped";
    }
    return "?";
}

std::vector<DatasetEntry> parse_dataset(const std::string& text, Width w) {
    std::vector<DatasetEntry> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        DatasetEntry entry;
        entry.index = index;
        size_t comma = line.find(',');
        if (comma == std::string::npos) {
            entry.obfuscated = line;
        } else {
            entry.obfuscated = line.substr(0, comma);
            entry.ground_truth = line.substr(comma + 1);
        }

        try {
            auto obf = parse(entry.obfuscated, w);
            if (entry.has_ground_truth()) {
                auto gt = parse(entry.ground_truth, w);
                auto verdict = verify_equiv(*obf, *gt, w, 256, 1);
                if (verdict.status == EquivStatus::NotEquivalent) {
                    std::cerr << "warning: line " << lineno
                              << ": ground truth is not equivalent to the obfuscated expression\n";
                }
            }
        } catch (const ParseError& e) {
            throw ParseError(e.position, "line " + std::to_string(lineno) + ": " + e.message);
        }

        out.push_back(std::move(entry));
        ++index;
    }
    return out;
}

std::vector<DatasetEntry> load_dataset(const std::string& path, Width w) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), w);
}

EntryResult run_entry(const DatasetEntry& entry, const BenchConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    EntryResult res;
    res.index = entry.index;

    auto input = preprocess(parse(entry.obfuscated, cfg.width), cfg.width);
    res.input_size = ast_size(*input);

    // With timing zeroed, the wall-clock limit is lifted too: a binding time
    // limit would make stop reasons depend on machine load, defeating the
    // byte-determinism that zeroed timing exists to provide.
    SaturationLimits limits = cfg.limits;
    if (cfg.zero_timing) limits.max_millis = std::numeric_limits<int64_t>::max() / 2;

    auto start = Clock::now();
    EGraph g(cfg.width);
    EClassId root = g.add_expr(*input);
    auto sat = saturate(g, cfg.rules, limits);
    auto best = extract_best(g, root, CostModel{});
    res.millis = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();

    res.stop_reason = sat.stop_reason;
    res.output = render(*best.expr);
    res.output_size = static_cast<int>(best.cost);

    if (cfg.verify) {
        auto verdict = verify_equiv(*input, *best.expr, cfg.width, cfg.samples, cfg.seed);
        switch (verdict.status) {
            case EquivStatus::Equivalent: res.verified = VerifyOutcome::Equivalent; break;
            case EquivStatus::ProbablyEquivalent: res.verified = VerifyOutcome::ProbablyEquivalent; break;
            case EquivStatus::NotEquivalent: res.verified = VerifyOutcome::NotEquivalent; break;
        }
    }

    bool smaller = cfg.allow_equal ? res.output_size <= res.input_size
                                   : res.output_size < res.input_size;
    res.success = smaller && (res.verified == VerifyOutcome::Equivalent ||
                              res.verified == VerifyOutcome::ProbablyEquivalent);
    if (entry.has_ground_truth()) {
        auto gt = preprocess(parse(entry.ground_truth, cfg.width), cfg.width);
        res.matched_gt = res.output_size <= ast_size(*gt);
    }
    return res;
}

BenchReport BenchReport::aggregate(std::vector<EntryResult> entries) {
    BenchReport r;
    r.per_entry = std::move(entries);
    r.total = static_cast<int>(r.per_entry.size());
    double ratio_sum = 0.0;
    int64_t millis_sum = 0;
    for (const auto& e : r.per_entry) {
        if (e.success) {
            ++r.successes;
            ratio_sum += 1.0 - static_cast<double>(e.output_size) / e.input_size;
        }
        millis_sum += e.millis;
    }
    r.failures = r.total - r.successes;
    auto pct2 = [](double v) { return std::round(v * 100.0) / 100.0; };
    r.success_rate = r.total ? pct2(100.0 * r.successes / r.total) : 0.0;
    r.simplification_ratio = r.successes ? pct2(100.0 * ratio_sum / r.successes) : 0.0;
    r.total_seconds = static_cast<double>(millis_sum) / 1000.0;
    return r;
}

BenchReport run_benchmark(const std::vector<DatasetEntry>& entries, const BenchConfig& cfg) {
    std::vector<EntryResult> results(entries.size());
    int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || entries.size() <= 1) {
        for (size_t i = 0; i < entries.size(); ++i) results[i] = run_entry(entries[i], cfg);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= entries.size()) break;
                results[i] = run_entry(entries[i], cfg);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (cfg.zero_timing) {
        for (auto& r : results) r.millis = 0;
    }
    return BenchReport::aggregate(std::move(results));
}

namespace {

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

nlohmann::ordered_json entry_to_json(const EntryResult& e) {
    return {
        {"index", e.index},
        {"input_size", e.input_size},
        {"output_size", e.output_size},
        {"output", e.output},
        {"verified", verify_outcome_name(e.verified)},
        {"success", e.success},
        {"matched_gt", e.matched_gt},
        {"millis", e.millis},
        {"stop_reason", stop_reason_name(e.stop_reason)},
    };
}

}  // namespace

std::string write_report(const BenchReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: {
            nlohmann::ordered_json j{
                {"total", r.total},
                {"successes", r.successes},
                {"failures", r.failures},
                {"success_rate", r.success_rate},
                {"simplification_ratio", r.simplification_ratio},
                {"total_seconds", r.total_seconds},
            };
            auto& per = j["per_entry"] = nlohmann::ordered_json::array();
            for (const auto& e : r.per_entry) per.push_back(entry_to_json(e));
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv: {
            std::ostringstream out;
            out << "index,input_size,output_size,verified,success,millis,stop_reason,output\n";
            for (const auto& e : r.per_entry) {
                out << e.index << ',' << e.input_size << ',' << e.output_size << ','
                    << verify_outcome_name(e.verified) << ',' << (e.success ? "true" : "false")
                    << ',' << e.millis << ',' << stop_reason_name(e.stop_reason) << ','
                    << e.output << '\n';
            }
            return out.str();
        }
        case ReportFormat::Text: {
            std::ostringstream out;
            out << "total=" << r.total << " successes=" << r.successes
                << " failures=" << r.failures << " success_rate=" << format_pct(r.success_rate)
                << "% simplification_ratio=" << format_pct(r.simplification_ratio)
                << "% time_s=" << format_pct(r.total_seconds) << "\n";
            return out.str();
        }
    }
    return {};
}

namespace {

// One growth template: rewrites a matching subterm into a strictly larger
// equivalent form (a catalog identity run in the obfuscating direction).
struct GrowthTemplate {
    const char* name;
    std::function<ExprPtr(const Expr&, Width)> apply;  // nullptr result: not applicable
};

std::vector<GrowthTemplate> growth_templates() {
    auto C = [](uint64_t v, Width w) { return Expr::constant(v, w); };
    auto B = [](Op op, ExprPtr l, ExprPtr r) { return Expr::binary(op, std::move(l), std::move(r)); };
    return {
        {"mba-add1",  // x+y -> (x|y)+(x&y)
         [B](const Expr& e, Width) -> ExprPtr {
             if (e.op() != Op::Add) return nullptr;
             return B(Op::Add, B(Op::Or, e.left(), e.right()), B(Op::And, e.left(), e.right()));
         }},
        {"mba-add2",  // x+y -> (x^y)+2*(x&y)
         [B, C](const Expr& e, Width w) -> ExprPtr {
             if (e.op() != Op::Add) return nullptr;
             return B(Op::Add, B(Op::Xor, e.left(), e.right()),
                      B(Op::Mul, C(2, w), B(Op::And, e.left(), e.right())));
         }},
        {"mba-or",  // x|y -> x+((x^M)&y)
         [B, C](const Expr& e, Width w) -> ExprPtr {
             if (e.op() != Op::Or) return nullptr;
             return B(Op::Add, e.left(),
                      B(Op::And, B(Op::Xor, e.left(), C(w.mask(), w)), e.right()));
         }},
        {"mba-xor",  // x^y -> (x|y)-(x&y)
         [B](const Expr& e, Width) -> ExprPtr {
             if (e.op() != Op::Xor) return nullptr;
             return B(Op::Sub, B(Op::Or, e.left(), e.right()), B(Op::And, e.left(), e.right()));
         }},
        {"mba-and",  // x&y -> (x|y)-(x^y)
         [B](const Expr& e, Width) -> ExprPtr {
             if (e.op() != Op::And) return nullptr;
             return B(Op::Sub, B(Op::Or, e.left(), e.right()), B(Op::Xor, e.left(), e.right()));
         }},
        {"mba-sub",  // x-y -> (x&(y^M))-((x^M)&y)
         [B, C](const Expr& e, Width w) -> ExprPtr {
             if (e.op() != Op::Sub) return nullptr;
             auto m = C(w.mask(), w);
             return B(Op::Sub, B(Op::And, e.left(), B(Op::Xor, e.right(), m)),
                      B(Op::And, B(Op::Xor, e.left(), m), e.right()));
         }},
        {"sub-via-neg",  // x-y -> x+(0-y)
         [B, C](const Expr& e, Width w) -> ExprPtr {
             if (e.op() != Op::Sub) return nullptr;
             return B(Op::Add, e.left(), B(Op::Sub, C(0, w), e.right()));
         }},
        {"neg-def",  // 0-y -> (y^M)+1
         [B, C](const Expr& e, Width w) -> ExprPtr {
             if (e.op() != Op::Sub || e.left()->op() != Op::Const || e.left()->value() != 0)
                 return nullptr;
             return B(Op::Add, B(Op::Xor, e.right(), C(w.mask(), w)), C(1, w));
         }},
        {"add-same",  // 2*x -> x+x
         [B](const Expr& e, Width) -> ExprPtr {
             if (e.op() != Op::Mul || e.left()->op() != Op::Const || e.left()->value() != 2)
                 return nullptr;
             return B(Op::Add, e.right(), e.right());
         }},
    };
}

void collect_subterms(const ExprPtr& e, std::vector<ExprPtr>& out) {
    out.push_back(e);
    if (e->left()) collect_subterms(e->left(), out);
    if (e->right()) collect_subterms(e->right(), out);
}

// Rebuilds e with `target` (pointer identity) replaced by `replacement`.
ExprPtr replace_subterm(const ExprPtr& e, const Expr* target, const ExprPtr& replacement) {
    if (e.get() == target) return replacement;
    if (!e->left()) return e;
    if (is_unary(e->op()))
        return Expr::unary(e->op(), replace_subterm(e->left(), target, replacement));
    return Expr::binary(e->op(), replace_subterm(e->left(), target, replacement),
                        replace_subterm(e->right(), target, replacement));
}

}  // namespace

std::vector<DatasetEntry> generate_corpus(const std::vector<ExprPtr>& seeds,
                                          const CorpusConfig& cfg) {
    if (seeds.empty() || cfg.count < 1) throw std::invalid_argument("bad corpus config");
    auto templates = growth_templates();
    Xorshift64 rng(cfg.rng_seed);
    std::vector<DatasetEntry> out;

    for (int i = 0; i < cfg.count; ++i) {
        const ExprPtr& seed = seeds[rng.next_below(seeds.size())];
        int rewrites = cfg.min_rewrites +
                       static_cast<int>(rng.next_below(
                           static_cast<uint64_t>(cfg.max_rewrites - cfg.min_rewrites + 1)));

        ExprPtr expr;
        bool grew = false;
        for (int attempt = 0; attempt < 16 && !grew; ++attempt) {
            expr = seed;
            for (int r = 0; r < rewrites; ++r) {
                std::vector<ExprPtr> subterms;
                collect_subterms(expr, subterms);
                std::vector<std::pair<const Expr*, size_t>> applicable;
                for (const auto& st : subterms) {
                    for (size_t t = 0; t < templates.size(); ++t) {
                        if (templates[t].apply(*st, cfg.width)) applicable.emplace_back(st.get(), t);
                    }
                }
                if (applicable.empty()) break;
                auto [target, t] = applicable[rng.next_below(applicable.size())];
                auto replacement = templates[t].apply(*target, cfg.width);
                expr = replace_subterm(expr, target, replacement);
            }
            grew = ast_size(*expr) > ast_size(*seed);
        }
        if (!grew) throw GenerationFailed();

        auto verdict = verify_equiv(*expr, *seed, cfg.width, 1000, cfg.rng_seed + i);
        if (verdict.status == EquivStatus::NotEquivalent)
            throw std::logic_error("corpus generator produced a non-equivalent entry");

        DatasetEntry entry;
        entry.index = i;
        entry.obfuscated = render(*expr);
        entry.ground_truth = render(*seed);
        out.push_back(std::move(entry));
    }
    return out;
}

std::string dataset_to_text(const std::vector<DatasetEntry>& entries) {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << e.obfuscated;
        if (e.has_ground_truth()) out << ',' << e.ground_truth;
        out << '\n';
    }
    return out.str();
}

}  // namespace emba
