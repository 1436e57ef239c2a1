#include "xmethod/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xmethod/evaluation.hpp"
#include "xmethod/extraction.hpp"
#include "xmethod/io.hpp"

namespace xmethod::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string file;
    std::string method_name;
    int line = 0;

    std::string endpoint;
    std::string model;
    double temperature = 1.2;
    int iterations = 10;
    bool fixpoint = false;
    std::string cache = "replay";
    std::string cache_dir;

    double max_coverage = 0.88;
    int min_statements = 2;
    bool no_enhance = false;
    std::string rank_strategy = "combined";
    int top = 5;

    std::string corpus;
    double tolerance = 3.0;
    int recall_n = 5;
    int repetitions = 30;
    std::uint64_t seed = 42;
    std::string ablation;
    std::vector<double> temperatures;
    int max_iterations = 10;

    std::string report;
    int index = 0;
    bool allow_var = false;
    std::string out;
};

void add_llm_options(CLI::App* app, Options& o) {
    app->add_option("--endpoint", o.endpoint, "chat-completions URL");
    app->add_option("--model", o.model, "model name sent with each request");
    app->add_option("--temperature", o.temperature, "sampling temperature")->check(CLI::Range(0.0, 2.0));
    app->add_option("--iterations", o.iterations, "requests per method")->check(CLI::Range(1, 1000));
    app->add_flag("--fixpoint", o.fixpoint, "repeat until a reply adds nothing new");
    app->add_option("--cache", o.cache, "record, replay or live")
        ->check(CLI::IsMember({"record", "replay", "live"}));
    app->add_option("--cache-dir", o.cache_dir, "fixture cache directory");
}

void add_filter_options(CLI::App* app, Options& o) {
    app->add_option("--max-coverage", o.max_coverage, "reject fragments covering at least this fraction");
    app->add_option("--min-statements", o.min_statements, "reject fragments with fewer statements");
    app->add_flag("--no-enhance", o.no_enhance, "skip declaration extension and header shrinking");
    app->add_option("--rank-strategy", o.rank_strategy, "heat, popularity or combined")
        ->check(CLI::IsMember({"heat", "popularity", "combined"}));
    app->add_option("--top", o.top, "suggestions to keep")->check(CLI::PositiveNumber);
}

void add_eval_options(CLI::App* app, Options& o) {
    app->add_option("--corpus", o.corpus, "oracle JSON-lines file")->required()->check(CLI::ExistingFile);
    app->add_option("--tolerance", o.tolerance, "allowed deviation in percent of the host length")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--recall-n", o.recall_n, "n of Recall@n")->check(CLI::PositiveNumber);
    app->add_option("--seed", o.seed, "seed for the random ablation modes");
}

bool loopback(const std::string& url) {
    return url.find("://127.0.0.1") != std::string::npos || url.find("://localhost") != std::string::npos;
}

PipelineConfig pipeline_config(const Options& o, const std::optional<fs::path>& default_cache) {
    PipelineConfig cfg;
    cfg.llm.temperature = o.temperature;
    cfg.llm.iterations = o.iterations;
    cfg.llm.fixpoint = o.fixpoint;
    if (!o.model.empty()) cfg.llm.model_name = o.model;
    if (!o.endpoint.empty()) cfg.llm.endpoint_url = o.endpoint;
    cfg.cache_mode = parse_cache_mode(o.cache);
    if (!o.cache_dir.empty()) {
        cfg.cache_dir = o.cache_dir;
    } else if (default_cache) {
        cfg.cache_dir = *default_cache;
    }
    cfg.filter.max_coverage_fraction = o.max_coverage;
    cfg.filter.min_statements = o.min_statements;
    cfg.strategy = parse_rank_strategy(o.rank_strategy);
    cfg.top_n = o.top;
    cfg.enhance = !o.no_enhance;

    if (cfg.cache_mode != CacheMode::live && !cfg.cache_dir) {
        throw UsageError("--cache " + o.cache + " needs --cache-dir");
    }
    if (cfg.cache_mode != CacheMode::replay) {
        const char* token = std::getenv(kTokenEnv);
        if ((!token || !*token) && !loopback(cfg.llm.endpoint_url)) {
            throw UsageError(std::string("set ") + kTokenEnv + " to reach " + cfg.llm.endpoint_url);
        }
    }
    try {
        cfg.filter.validate();
        cfg.llm.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

std::unique_ptr<Transport> make_transport(const PipelineConfig& cfg) {
    if (cfg.cache_mode == CacheMode::replay) return nullptr;
    return std::make_unique<HttpTransport>(cfg.llm.endpoint_url, cfg.llm.request_timeout);
}

LongMethod load_method(const Options& o, const std::string& source) {
    std::optional<MethodLocation> loc;
    if (!o.method_name.empty()) {
        loc = locate_method(source, o.method_name);
        if (!loc) throw Error(Errc::line_not_in_body, "no method named '" + o.method_name + "' in " + o.file);
    } else {
        loc = locate_method(source, o.line);
        if (!loc) throw Error(Errc::line_not_in_body, "line " + std::to_string(o.line) + " is not inside a method");
    }
    return parse_method(source, {loc->start_line, loc->end_line}, o.file);
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_file_atomic(path, text);
    }
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

int cmd_suggest(const Options& o, std::ostream& out) {
    const auto cfg = pipeline_config(o, std::nullopt);
    const std::string source = read_file(o.file);
    const LongMethod method = load_method(o, source);
    const auto transport = make_transport(cfg);
    const PipelineResult r = run_pipeline(method, cfg, transport.get());
    const auto shown = top_n(r.ranked, cfg.top_n);

    const auto& t = r.triage;
    json report = {
        {"file", o.file},
        {"method", method.name},
        {"host", {{"start_line", method.start_line}, {"end_line", method.end_line}}},
        {"source_sha256", sha256_hex(source)},
        {"settings",
         {{"temperature", cfg.llm.temperature},
          {"iterations", cfg.llm.iterations},
          {"fixpoint", cfg.llm.fixpoint},
          {"model", cfg.llm.model_name},
          {"max_coverage", cfg.filter.max_coverage_fraction},
          {"min_statements", cfg.filter.min_statements},
          {"enhance", cfg.enhance},
          {"rank_strategy", to_string(cfg.strategy)}}},
        {"counts",
         {{"total", t.verdicts.size()},
          {"invalid", t.count(VerdictClass::invalid)},
          {"not_useful", t.count(VerdictClass::not_useful)},
          {"useful", t.count(VerdictClass::applicable)}}},
        {"diagnostics", r.generation.diagnostics},
    };
    json verdicts = json::array();
    for (const auto& v : t.verdicts) verdicts.push_back(to_json(v));
    report["verdicts"] = verdicts;

    std::ostringstream table;
    table << method.name << " (" << o.file << ":" << method.start_line << "-" << method.end_line << ")\n";
    table << r.generation.set.size() << " distinct suggestions: " << t.count(VerdictClass::invalid) << " invalid, "
          << t.count(VerdictClass::not_useful) << " not useful, " << t.count(VerdictClass::applicable)
          << " useful\n";
    if (shown.empty()) table << "no applicable suggestions\n";
    json list = json::array();
    int index = 0;
    for (const auto& x : shown) {
        ++index;
        const auto& s = x.suggestion;
        json e = to_json(s);
        e["index"] = index;
        e["provenance"] = to_string(s.provenance);
        e["score"] = {{"heat", x.score.heat}, {"popularity", x.score.popularity}, {"combined", x.score.combined}};
        std::string preview;
        try {
            preview = plan_extraction(method, s, source).signature();
        } catch (const Error& err) {
            preview = std::string("unavailable: ") + err.what();
        }
        e["signature"] = preview;
        list.push_back(std::move(e));

        char head[96];
        std::snprintf(head, sizeof head, "%3d  %4d-%-4d  x%-3d heat %-4lld score %-6lld ", index, s.start_line,
                      s.end_line, s.count, x.score.heat, x.score.combined);
        table << head << pad(s.name, 24) << " " << preview << "\n";
    }
    report["suggestions"] = list;

    if (!o.out.empty()) write_file_atomic(o.out, report.dump(2) + "\n");
    out << table.str();
    return kExitOk;
}

int cmd_apply(const Options& o, std::ostream& out) {
    const json report = [&] {
        auto j = json::parse(read_file(o.report), nullptr, false);
        if (j.is_discarded()) throw Error(Errc::bad_input, o.report + " is not a report");
        return j;
    }();
    const auto& list = report.at("suggestions");
    if (o.index < 1 || o.index > static_cast<int>(list.size())) {
        throw Error(Errc::index_out_of_range, "index " + std::to_string(o.index) + " not in 1.." +
                                                  std::to_string(list.size()));
    }
    const std::string file = o.file.empty() ? report.at("file").get<std::string>() : o.file;
    const std::string source = read_file(file);
    if (sha256_hex(source) != report.at("source_sha256").get<std::string>()) {
        throw Error(Errc::stale_source, file + " changed since the report was written");
    }
    const auto& host = report.at("host");
    const LongMethod method =
        parse_method(source, {host.at("start_line").get<int>(), host.at("end_line").get<int>()}, file);

    const auto& e = list.at(static_cast<std::size_t>(o.index - 1));
    ExtractSuggestion s;
    s.name = e.at("name").get<std::string>();
    s.start_line = e.at("start_line").get<int>();
    s.end_line = e.at("end_line").get<int>();
    s.count = e.value("count", 1);

    PlanOptions options;
    options.allow_var_fallback = o.allow_var;
    const ExtractionPlan plan = plan_extraction(method, s, source, options);
    const std::string rewritten = xmethod::apply(source, plan);
    write_file_atomic(file + ".bak", source);
    write_file_atomic(file, rewritten);
    out << "extracted " << plan.signature() << " from lines " << s.start_line << "-" << s.end_line << " of "
        << method.name << "\nbackup: " << file << ".bak\n";
    return kExitOk;
}

ExperimentConfig experiment_config(const Options& o, const Corpus& corpus) {
    ExperimentConfig cfg;
    cfg.pipeline = pipeline_config(o, corpus.root / "cache");
    cfg.n = o.recall_n;
    cfg.tolerance = o.tolerance;
    cfg.repetitions = o.repetitions;
    cfg.seed = o.seed;
    return cfg;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const Corpus corpus = Corpus::load(o.corpus);
    const ExperimentConfig cfg = experiment_config(o, corpus);
    const auto transport = make_transport(cfg.pipeline);

    std::vector<RecallReport> reports;
    if (o.ablation.empty()) {
        reports.push_back(run_experiment(corpus, cfg, transport.get()));
    } else if (o.ablation == "all") {
        for (auto m : {AblationMode::raw, AblationMode::enhanced_random, AblationMode::enhanced_ranked}) {
            reports.push_back(ablation(corpus, cfg, m, transport.get()));
        }
    } else {
        reports.push_back(ablation(corpus, cfg, parse_ablation_mode(o.ablation), transport.get()));
    }

    json j = json::array();
    for (const auto& r : reports) {
        j.push_back(r.to_json());
        out << r.table();
    }
    if (!o.out.empty()) write_file_atomic(o.out, (reports.size() == 1 ? j.at(0) : j).dump(2) + "\n");
    return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const Corpus corpus = Corpus::load(o.corpus);
    const ExperimentConfig cfg = experiment_config(o, corpus);
    const auto transport = make_transport(cfg.pipeline);
    const auto temps = o.temperatures.empty() ? default_sweep_temperatures() : o.temperatures;
    const SweepGrid grid = sweep(corpus, cfg, temps, o.max_iterations, transport.get());
    write_or_print(o.out, grid.csv(), out);
    return kExitOk;
}

int cmd_record(Options o, std::ostream& out) {
    o.cache = "record";
    const auto temps = o.temperatures.empty() ? std::vector<double>{o.temperature} : o.temperatures;
    std::vector<LongMethod> methods;
    std::optional<fs::path> default_cache;
    if (!o.corpus.empty()) {
        const Corpus corpus = Corpus::load(o.corpus);
        default_cache = corpus.root / "cache";
        std::map<MethodKey, bool> seen;
        for (const auto& e : corpus.entries) {
            if (std::exchange(seen[key_of(e)], true)) continue;
            const auto path = corpus.source_path(e);
            methods.push_back(parse_method(read_file(path), e.host(), path));
        }
    } else if (!o.file.empty()) {
        methods.push_back(load_method(o, read_file(o.file)));
    } else {
        throw UsageError("record needs --corpus or --file");
    }
    const PipelineConfig cfg = pipeline_config(o, default_cache);
    const FixtureCache cache(*cfg.cache_dir);
    const auto transport = make_transport(cfg);
    int requests = 0;
    for (const auto& m : methods) {
        for (double t : temps) {
            LlmParams p = cfg.llm;
            p.temperature = t;
            requests += static_cast<int>(generate(m, p, CacheMode::record, &cache, transport.get()).responses.size());
        }
    }
    out << "recorded " << requests << " replies for " << methods.size() << " method(s) into "
        << cache.dir().string() << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Extract Method suggestions for Java sources", "xmethod"};
    app.require_subcommand(1, 1);

    auto* suggest = app.add_subcommand("suggest", "rank extract-method candidates for one method");
    suggest->add_option("--file", o.file, "Java source file")->required()->check(CLI::ExistingFile);
    auto* by_name = suggest->add_option("--method", o.method_name, "method name");
    auto* by_line = suggest->add_option("--line", o.line, "any line inside the method");
    by_name->excludes(by_line);
    add_llm_options(suggest, o);
    add_filter_options(suggest, o);
    suggest->add_option("--out", o.out, "write the JSON report here");

    auto* apply_cmd = app.add_subcommand("apply", "perform one suggestion from a report");
    apply_cmd->add_option("--report", o.report, "report written by suggest --out")->required()->check(CLI::ExistingFile);
    apply_cmd->add_option("--index", o.index, "1-based suggestion index")->required();
    apply_cmd->add_option("--file", o.file, "source file, when it moved since the report");
    apply_cmd->add_flag("--allow-var", o.allow_var, "declare parameters with var when a type is unknown");

    auto* evaluate = app.add_subcommand("evaluate", "Recall@n of the pipeline on an oracle corpus");
    add_eval_options(evaluate, o);
    add_llm_options(evaluate, o);
    add_filter_options(evaluate, o);
    evaluate->add_option("--repetitions", o.repetitions, "independent runs")->check(CLI::PositiveNumber);
    evaluate->add_option("--ablation", o.ablation, "raw, enhanced-random5, enhanced-ranked or all")
        ->check(CLI::IsMember({"raw", "enhanced-random5", "enhanced-ranked", "all"}));
    evaluate->add_option("--out", o.out, "write the JSON report here");

    auto* sweep_cmd = app.add_subcommand("sweep", "recall over temperature and iteration count");
    add_eval_options(sweep_cmd, o);
    add_llm_options(sweep_cmd, o);
    add_filter_options(sweep_cmd, o);
    sweep_cmd->add_option("--temperatures", o.temperatures, "temperatures to sweep")->delimiter(',');
    sweep_cmd->add_option("--max-iterations", o.max_iterations, "largest iteration count")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", o.out, "CSV path, stdout when omitted");

    auto* record = app.add_subcommand("record", "fill a fixture cache from the endpoint");
    record->add_option("--corpus", o.corpus, "record every method of an oracle corpus");
    record->add_option("--file", o.file, "Java source file");
    auto* r_name = record->add_option("--method", o.method_name, "method name");
    auto* r_line = record->add_option("--line", o.line, "any line inside the method");
    r_name->excludes(r_line);
    add_llm_options(record, o);
    record->add_option("--temperatures", o.temperatures, "record each of these temperatures")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        app.exit(e, msg, msg);
        err << msg.str();
        return kExitUsage;
    }

    try {
        if (suggest->parsed()) {
            if (o.method_name.empty() && o.line == 0) throw UsageError("suggest needs --method or --line");
            return cmd_suggest(o, out);
        }
        if (apply_cmd->parsed()) return cmd_apply(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (sweep_cmd->parsed()) return cmd_sweep(o, out);
        return cmd_record(o, out);
    } catch (const UsageError& e) {
        err << "xmethod: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "xmethod: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const json::exception& e) {
        err << "xmethod: malformed report: " << e.what() << "\n";
        return kExitPipeline;
    }
}

}  // namespace xmethod::cli
