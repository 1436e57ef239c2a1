#include "xmethod/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "xmethod/io.hpp"
#include "xmethod/tokenizer.hpp"

namespace xmethod {

MethodKey key_of(const OracleEntry& e) { return {e.file, e.host_start, e.host_end}; }

Corpus Corpus::load(const std::filesystem::path& oracle_file) {
    Corpus c;
    c.root = oracle_file.parent_path();
    int line_no = 0;
    for (const auto& line : split_lines(read_file(oracle_file))) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw Error(Errc::bad_input, oracle_file.string() + ":" + std::to_string(line_no) + ": not JSON");
        }
        try {
            OracleEntry e;
            e.file = j.at("file").get<std::string>();
            e.host_start = j.at("host_start").get<int>();
            e.host_end = j.at("host_end").get<int>();
            e.oracle_start = j.at("oracle_start").get<int>();
            e.oracle_end = j.at("oracle_end").get<int>();
            e.oracle_name = j.value("oracle_name", "");
            if (!(e.host_start < e.oracle_start && e.oracle_start <= e.oracle_end && e.oracle_end < e.host_end)) {
                throw Error(Errc::bad_input, "oracle range outside its host");
            }
            c.entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(Errc::bad_input, oracle_file.string() + ":" + std::to_string(line_no) + ": " + ex.what());
        } catch (const Error& ex) {
            throw Error(Errc::bad_input, oracle_file.string() + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return c;
}

bool within_tolerance(const ExtractSuggestion& s, const OracleEntry& oracle, double m, int host_length) {
    const int deviation = std::abs(s.start_line - oracle.oracle_start) + std::abs(s.end_line - oracle.oracle_end);
    return static_cast<double>(deviation) * 100.0 <= m * static_cast<double>(host_length);
}

namespace {

int first_match(const std::vector<ExtractSuggestion>& list, const OracleEntry& e, int n, double m) {
    const int limit = std::min(n, static_cast<int>(list.size()));
    for (int i = 0; i < limit; ++i) {
        if (within_tolerance(list[static_cast<std::size_t>(i)], e, m, e.host_length())) return i + 1;
    }
    return 0;
}

void check_known(const ResultMap& results, const std::vector<OracleEntry>& oracle) {
    for (const auto& [key, list] : results) {
        const bool known = std::any_of(oracle.begin(), oracle.end(), [&](const OracleEntry& e) { return key_of(e) == key; });
        if (!known) {
            throw Error(Errc::corpus_mismatch, "result for " + key.file.string() + ":" + std::to_string(key.host_start) +
                                                   " which is not in the corpus");
        }
    }
}

}  // namespace

double recall_at_n(const ResultMap& results, const std::vector<OracleEntry>& oracle, int n, double m) {
    check_known(results, oracle);
    if (oracle.empty()) return 0.0;
    int hits = 0;
    for (const auto& e : oracle) {
        const auto it = results.find(key_of(e));
        if (it != results.end() && first_match(it->second, e, n, m) > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(oracle.size());
}

std::string_view to_string(AblationMode m) noexcept {
    switch (m) {
        case AblationMode::raw: return "raw";
        case AblationMode::enhanced_random: return "enhanced-random5";
        case AblationMode::enhanced_ranked: return "enhanced-ranked";
    }
    return "enhanced-ranked";
}

AblationMode parse_ablation_mode(std::string_view text) {
    if (text == "raw") return AblationMode::raw;
    if (text == "enhanced-random5" || text == "enhanced-random") return AblationMode::enhanced_random;
    if (text == "enhanced-ranked" || text == "ranked") return AblationMode::enhanced_ranked;
    throw Error(Errc::bad_input, "unknown ablation mode '" + std::string(text) + "'");
}

nlohmann::json RecallReport::to_json() const {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& m : details) {
        d.push_back({{"file", m.entry.file.generic_string()},
                     {"host_start", m.entry.host_start},
                     {"host_end", m.entry.host_end},
                     {"oracle_start", m.entry.oracle_start},
                     {"oracle_end", m.entry.oracle_end},
                     {"hit", m.hit},
                     {"rank", m.rank},
                     {"candidates", m.candidates}});
    }
    return {{"mode", mode},   {"n", n},           {"tolerance", tolerance},
            {"runs", per_run.size()}, {"per_run", per_run}, {"mean", mean},
            {"stddev", stddev}, {"methods", d},
            {"note", "methods without surviving suggestions count as misses"}};
}

std::string RecallReport::table() const {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "Recall@%d with %.1f%% tolerance (%s): mean %.4f, stddev %.4f over %zu run(s)\n", n,
                  tolerance, mode.c_str(), mean, stddev, per_run.size());
    out << buf;
    for (const auto& m : details) {
        std::snprintf(buf, sizeof buf, "  %-40s %5d-%-5d oracle %5d-%-5d %s", m.entry.file.generic_string().c_str(),
                      m.entry.host_start, m.entry.host_end, m.entry.oracle_start, m.entry.oracle_end,
                      m.hit ? "hit" : "miss");
        out << buf;
        if (m.hit) out << " @" << m.rank;
        out << "\n";
    }
    return out.str();
}

namespace {

struct MethodCache {
    std::map<MethodKey, LongMethod> methods;

    const LongMethod& get(const Corpus& corpus, const OracleEntry& e) {
        const auto key = key_of(e);
        auto it = methods.find(key);
        if (it == methods.end()) {
            const auto path = corpus.source_path(e);
            it = methods.emplace(key, parse_method(read_file(path), e.host(), path)).first;
        }
        return it->second;
    }
};

RecallReport run_mode(const Corpus& corpus, const ExperimentConfig& cfg, AblationMode mode, Transport* transport,
                      const std::string& label) {
    if (cfg.repetitions < 1) throw Error(Errc::bad_input, "repetitions must be at least 1");
    if (cfg.n < 1) throw Error(Errc::bad_input, "n must be at least 1");
    RecallReport report;
    report.mode = label;
    report.n = cfg.n;
    report.tolerance = cfg.tolerance;
    MethodCache cache;

    for (int run = 0; run < cfg.repetitions; ++run) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(run));
        ResultMap results;
        for (const auto& e : corpus.entries) {
            const auto key = key_of(e);
            if (results.count(key)) continue;
            const LongMethod& method = cache.get(corpus, e);
            const PipelineResult r = run_pipeline(method, cfg.pipeline, transport);
            std::vector<ExtractSuggestion> list;
            if (mode == AblationMode::raw) {
                list = r.generation.set.entries();
                std::shuffle(list.begin(), list.end(), rng);
            } else if (mode == AblationMode::enhanced_random) {
                list = r.applicable;
                std::shuffle(list.begin(), list.end(), rng);
            } else {
                for (const auto& x : r.ranked) list.push_back(x.suggestion);
            }
            if (static_cast<int>(list.size()) > cfg.n) list.resize(static_cast<std::size_t>(cfg.n));
            results.emplace(key, std::move(list));
        }
        report.per_run.push_back(recall_at_n(results, corpus.entries, cfg.n, cfg.tolerance));
        if (run == 0) {
            for (const auto& e : corpus.entries) {
                const auto& list = results.at(key_of(e));
                const int rank = first_match(list, e, cfg.n, cfg.tolerance);
                report.details.push_back({e, rank > 0, rank, static_cast<int>(list.size())});
            }
        }
    }

    // Welford: identical runs give their exact value and zero spread.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : report.per_run) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    report.mean = mean;
    if (k > 1) report.stddev = std::sqrt(m2 / static_cast<double>(k - 1));
    return report;
}

}  // namespace

RecallReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg, Transport* transport) {
    return run_mode(corpus, cfg, AblationMode::enhanced_ranked, transport, "pipeline");
}

RecallReport ablation(const Corpus& corpus, const ExperimentConfig& cfg, AblationMode mode, Transport* transport) {
    ExperimentConfig c = cfg;
    if (mode == AblationMode::raw) c.pipeline.enhance = false;
    return run_mode(corpus, c, mode, transport, std::string(to_string(mode)));
}

std::vector<double> default_sweep_temperatures() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2}; }

std::string SweepGrid::csv() const {
    std::string out = "temperature";
    for (int i : iterations) out += ",I=" + std::to_string(i);
    out += "\n";
    char buf[32];
    for (std::size_t t = 0; t < temperatures.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.1f", temperatures[t]);
        out += buf;
        for (double v : recall[t]) {
            std::snprintf(buf, sizeof buf, ",%.4f", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

SweepGrid sweep(const Corpus& corpus, const ExperimentConfig& cfg, const std::vector<double>& temperatures,
                int max_iterations, Transport* transport) {
    if (max_iterations < 1) throw Error(Errc::bad_input, "max iterations must be at least 1");
    SweepGrid grid;
    grid.temperatures = temperatures;
    for (int i = 1; i <= max_iterations; ++i) grid.iterations.push_back(i);
    for (double t : temperatures) {
        std::vector<double> row;
        for (int i : grid.iterations) {
            ExperimentConfig c = cfg;
            c.repetitions = 1;
            c.pipeline.llm.temperature = t;
            c.pipeline.llm.iterations = i;
            c.pipeline.llm.fixpoint = false;
            row.push_back(run_experiment(corpus, c, transport).mean);
        }
        grid.recall.push_back(std::move(row));
    }
    return grid;
}

}  // namespace xmethod
