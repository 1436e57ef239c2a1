#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xmethod/pipeline.hpp"

namespace xmethod {

struct OracleEntry {
    std::filesystem::path file;  // relative to the corpus sources/ directory
    int host_start = 0;
    int host_end = 0;
    int oracle_start = 0;
    int oracle_end = 0;
    std::string oracle_name;

    LineRange host() const { return {host_start, host_end}; }
    LineRange oracle() const { return {oracle_start, oracle_end}; }
    int host_length() const { return host_end - host_start; }
};

struct MethodKey {
    std::filesystem::path file;
    int host_start = 0;
    int host_end = 0;

    friend bool operator==(const MethodKey&, const MethodKey&) = default;
    friend auto operator<=>(const MethodKey& a, const MethodKey& b) {
        if (auto c = a.file.generic_string() <=> b.file.generic_string(); c != 0) return c;
        if (auto c = a.host_start <=> b.host_start; c != 0) return c;
        return a.host_end <=> b.host_end;
    }
};

MethodKey key_of(const OracleEntry& e);

/// JSON-lines oracle file plus a sources/ directory beside it.
struct Corpus {
    std::filesystem::path root;
    std::vector<OracleEntry> entries;

    static Corpus load(const std::filesystem::path& oracle_file);  // throws Error(io_failure / bad_input)
    std::filesystem::path source_path(const OracleEntry& e) const { return root / "sources" / e.file; }
};

/// |start deviation| + |end deviation| <= m% of the host length.
bool within_tolerance(const ExtractSuggestion& s, const OracleEntry& oracle, double m, int host_length);

using ResultMap = std::map<MethodKey, std::vector<ExtractSuggestion>>;

/// Fraction of oracle entries with a tolerant match among the first n of
/// their method's list. Methods without a list count as misses. Throws
/// Error(corpus_mismatch) for a list whose method is not in the corpus.
double recall_at_n(const ResultMap& results, const std::vector<OracleEntry>& oracle, int n, double m);

struct MethodDetail {
    OracleEntry entry;
    bool hit = false;
    int rank = 0;  // 1-based rank of the first match, 0 on a miss
    int candidates = 0;
};

struct RecallReport {
    std::string mode;
    int n = 5;
    double tolerance = 3.0;
    std::vector<double> per_run;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single run
    std::vector<MethodDetail> details;  // from the first run

    nlohmann::json to_json() const;
    std::string table() const;
};

enum class AblationMode { raw, enhanced_random, enhanced_ranked };

std::string_view to_string(AblationMode m) noexcept;
AblationMode parse_ablation_mode(std::string_view text);

struct ExperimentConfig {
    PipelineConfig pipeline;
    int n = 5;
    double tolerance = 3.0;
    int repetitions = 30;
    std::uint64_t seed = 42;
};

RecallReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg, Transport* transport = nullptr);

/// raw: n random raw suggestions; enhanced-random: n random applicable
/// suggestions; enhanced-ranked: the top n. Run r draws from seed + r.
RecallReport ablation(const Corpus& corpus, const ExperimentConfig& cfg, AblationMode mode,
                      Transport* transport = nullptr);

struct SweepGrid {
    std::vector<double> temperatures;
    std::vector<int> iterations;
    std::vector<std::vector<double>> recall;  // [temperature][iteration]

    std::string csv() const;
};

std::vector<double> default_sweep_temperatures();  // 0, 0.2, ..., 1.2

/// One replay run per cell; iteration counts 1..max_iterations.
SweepGrid sweep(const Corpus& corpus, const ExperimentConfig& cfg, const std::vector<double>& temperatures,
                int max_iterations, Transport* transport = nullptr);

}  // namespace xmethod
