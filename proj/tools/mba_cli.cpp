#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "emba/bench.hpp"
#include "emba/egraph.hpp"
#include "emba/extract.hpp"
#include "emba/rewrite.hpp"
#include "emba/semantics.hpp"

namespace {

struct GlobalOpts {
    int width = 64;
    int iters = 30;
    size_t nodes = 50000;
    int64_t timeout_ms = 5000;
    std::string groups = "structural,arithid,boolid,mbabridge,constfold";
    bool no_const_fold = false;
    uint64_t seed = 0;
    uint64_t samples = 10000;
    std::string output = "text";
    bool no_verify = false;
    bool no_timing = false;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_global_flags(CLI::App* app, GlobalOpts& g) {
    app->add_option("--width", g.width, "bit width (1-64)")->check(CLI::Range(1, 64));
    app->add_option("--iters", g.iters, "saturation iteration limit");
    app->add_option("--nodes", g.nodes, "saturation e-node limit");
    app->add_option("--timeout-ms", g.timeout_ms, "saturation time limit in ms");
    app->add_option("--groups", g.groups, "comma-separated rule groups to enable");
    app->add_flag("--no-const-fold", g.no_const_fold, "disable constant folding rules");
    app->add_option("--seed", g.seed, "rng seed");
    app->add_option("--samples", g.samples, "random verification sample count");
    app->add_option("--output", g.output, "output format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app->add_flag("--no-verify", g.no_verify, "skip verification after simplify");
    app->add_flag("--no-timing", g.no_timing, "zero timing fields for byte-stable output");
    app->add_option("--jobs", g.jobs, "batch worker count");
}

emba::RuleSet build_ruleset(const GlobalOpts& g, emba::Width w) {
    auto all = emba::default_ruleset(w);
    std::vector<emba::RuleGroup> enabled;
    std::stringstream ss(g.groups);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto grp = emba::rule_group_from_name(tok);
        if (!grp) throw CLI::ValidationError("--groups", "unknown rule group: " + tok);
        enabled.push_back(*grp);
    }
    auto rs = all.filtered(enabled);
    if (g.no_const_fold) rs = rs.without_group(emba::RuleGroup::ConstFold);
    return rs;
}

emba::SaturationLimits build_limits(const GlobalOpts& g) {
    return {g.iters, g.nodes, g.timeout_ms};
}

int cmd_simplify(const std::string& text, const GlobalOpts& g) {
    auto w = emba::Width::of(g.width);
    emba::ExprPtr input;
    try {
        input = emba::preprocess(emba::parse(text, w), w);
    } catch (const emba::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    emba::EGraph graph(w);
    auto root = graph.add_expr(*input);
    auto sat = emba::saturate(graph, build_ruleset(g, w), build_limits(g));
    auto best = emba::extract_best(graph, root, emba::CostModel{});
    std::string output = emba::render(*best.expr);

    std::string verified = "skipped";
    bool unsound = false;
    if (!g.no_verify) {
        auto verdict = emba::verify_equiv(*input, *best.expr, w, g.samples, g.seed);
        verified = emba::equiv_status_name(verdict.status);
        unsound = verdict.status == emba::EquivStatus::NotEquivalent;
    }

    int64_t millis = g.no_timing ? 0 : sat.millis;
    if (g.output == "json") {
        nlohmann::ordered_json j{
            {"input", text},
            {"output", output},
            {"input_size", emba::ast_size(*input)},
            {"output_size", best.cost},
            {"stop_reason", emba::stop_reason_name(sat.stop_reason)},
            {"millis", millis},
            {"verified", verified},
        };
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << output << "\n";
    }
    if (unsound) {
        std::cerr << "error: simplified output is NOT equivalent to the input\n";
        return 2;
    }
    return 0;
}

int cmd_batch(const std::string& dataset_path, const std::string& report_path,
              const GlobalOpts& g) {
    auto w = emba::Width::of(g.width);
    std::vector<emba::DatasetEntry> entries;
    try {
        entries = emba::load_dataset(dataset_path, w);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    emba::BenchConfig cfg;
    cfg.width = w;
    cfg.limits = build_limits(g);
    cfg.rules = build_ruleset(g, w);
    cfg.verify = !g.no_verify;
    cfg.samples = g.samples;
    cfg.seed = g.seed;
    cfg.jobs = std::max(1, g.jobs);
    cfg.zero_timing = g.no_timing;

    auto report = emba::run_benchmark(entries, cfg);

    emba::ReportFormat fmt = emba::ReportFormat::Text;
    if (g.output == "json") fmt = emba::ReportFormat::Json;
    if (g.output == "csv") fmt = emba::ReportFormat::Csv;
    std::string bytes = emba::write_report(report, fmt);

    if (report_path.empty() || report_path == "-") {
        std::cout << bytes;
    } else {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write report to " << report_path << "\n";
            return 1;
        }
        out << bytes;
    }
    // Table-1 style summary on stdout regardless of report format.
    if (fmt != emba::ReportFormat::Text || !(report_path.empty() || report_path == "-"))
        std::cout << emba::write_report(report, emba::ReportFormat::Text);
    return 0;
}

int cmd_verify(const std::string& a_text, const std::string& b_text, const GlobalOpts& g) {
    auto w = emba::Width::of(g.width);
    emba::ExprPtr a, b;
    try {
        a = emba::parse(a_text, w);
        b = emba::parse(b_text, w);
    } catch (const emba::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    auto vars_a = emba::free_vars(*a);
    auto vars_b = emba::free_vars(*b);
    size_t n = vars_a.size();
    for (auto& v : vars_b)
        if (std::find(vars_a.begin(), vars_a.end(), v) == vars_a.end()) ++n;

    emba::EquivVerdict verdict;
    if (n * static_cast<size_t>(w.bits) <= 24) {
        verdict = emba::equiv_exhaustive(*a, *b, w);
        if (verdict.status == emba::EquivStatus::Equivalent) {
            std::cout << "Equivalent (exhaustive, " << verdict.assignments_checked
                      << " assignments)\n";
            return 0;
        }
    } else {
        verdict = emba::verify_equiv(*a, *b, w, g.samples, g.seed);
        if (verdict.status != emba::EquivStatus::NotEquivalent) {
            std::cout << "ProbablyEquivalent (" << verdict.assignments_checked
                      << " assignments checked)\n";
            return 0;
        }
    }

    std::cout << "NotEquivalent, counterexample:";
    for (const auto& [name, value] : *verdict.counterexample)
        std::cout << " " << name << "=" << value;
    std::cout << "\n";
    return 2;
}

int cmd_dump(const std::string& text, const std::string& stage, const GlobalOpts& g) {
    auto w = emba::Width::of(g.width);
    emba::ExprPtr input;
    try {
        input = emba::preprocess(emba::parse(text, w), w);
    } catch (const emba::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    emba::EGraph graph(w);
    graph.add_expr(*input);
    if (stage == "after") emba::saturate(graph, build_ruleset(g, w), build_limits(g));
    std::cout << graph.dump_dot();
    return 0;
}

int cmd_gen(const std::string& seeds_path, int count, const std::string& out_path,
            int min_rewrites, int max_rewrites, const GlobalOpts& g) {
    auto w = emba::Width::of(g.width);
    std::ifstream in(seeds_path);
    if (!in) {
        std::cerr << "error: cannot open seeds file: " << seeds_path << "\n";
        return 1;
    }
    std::vector<emba::ExprPtr> seeds;
    std::string line;
    try {
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            seeds.push_back(emba::parse(line, w));
        }
    } catch (const emba::ParseError& e) {
        std::cerr << "error in seeds file: " << e.what() << "\n";
        return 1;
    }
    if (seeds.empty()) {
        std::cerr << "error: seeds file contains no expressions\n";
        return 1;
    }

    emba::CorpusConfig cfg;
    cfg.width = w;
    cfg.count = count;
    cfg.min_rewrites = min_rewrites;
    cfg.max_rewrites = max_rewrites;
    cfg.rng_seed = g.seed;
    auto entries = emba::generate_corpus(seeds, cfg);
    std::string bytes = emba::dataset_to_text(entries);

    if (out_path.empty() || out_path == "-") {
        std::cout << bytes;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        out << bytes;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MBA expression simplifier based on equality saturation"};
    app.require_subcommand(1);
    GlobalOpts g;

    std::string expr_text, dataset_path, report_path, expr_a, expr_b, stage = "after";
    std::string seeds_path, gen_out;
    int gen_count = 60, gen_min = 2, gen_max = 5;

    auto* simplify = app.add_subcommand("simplify", "simplify one expression");
    simplify->add_option("expr", expr_text, "expression text")->required();
    add_global_flags(simplify, g);

    auto* batch = app.add_subcommand("batch", "run a dataset and report metrics");
    batch->add_option("dataset", dataset_path, "dataset file")->required();
    batch->add_option("--report", report_path, "report output path (default stdout)");
    add_global_flags(batch, g);

    auto* verify = app.add_subcommand("verify", "check two expressions for equivalence");
    verify->add_option("a", expr_a, "first expression")->required();
    verify->add_option("b", expr_b, "second expression")->required();
    add_global_flags(verify, g);

    auto* dump = app.add_subcommand("dump", "print the e-graph as Graphviz DOT");
    dump->add_option("expr", expr_text, "expression text")->required();
    dump->add_option("--stage", stage, "before or after saturation")
        ->check(CLI::IsMember({"before", "after"}));
    add_global_flags(dump, g);

    auto* gen = app.add_subcommand("gen", "generate an obfuscated corpus from seeds");
    gen->add_option("seeds", seeds_path, "seed expressions, one per line")->required();
    gen->add_option("--count", gen_count, "number of entries");
    gen->add_option("--min-rewrites", gen_min, "minimum expansion rewrites per entry");
    gen->add_option("--max-rewrites", gen_max, "maximum expansion rewrites per entry");
    gen->add_option("--out", gen_out, "output dataset path (default stdout)");
    add_global_flags(gen, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (simplify->parsed()) return cmd_simplify(expr_text, g);
        if (batch->parsed()) return cmd_batch(dataset_path, report_path, g);
        if (verify->parsed()) return cmd_verify(expr_a, expr_b, g);
        if (dump->parsed()) return cmd_dump(expr_text, stage, g);
        if (gen->parsed()) return cmd_gen(seeds_path, gen_count, gen_out, gen_min, gen_max, g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
