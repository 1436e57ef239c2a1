#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "xmethod/enhancement.hpp"
#include "xmethod/filtering.hpp"
#include "xmethod/llm_gateway.hpp"
#include "xmethod/ranking.hpp"

namespace xmethod {

struct PipelineConfig {
    LlmParams llm;
    CacheMode cache_mode = CacheMode::replay;
    std::optional<std::filesystem::path> cache_dir;
    FilterConfig filter;
    RankStrategy strategy = RankStrategy::combined;
    int top_n = 5;
    bool enhance = true;
};

struct PipelineResult {
    GenerateResult generation;
    Triage triage;
    std::vector<ExtractSuggestion> applicable;  // enhanced and merged
    HeatMap heatmap;
    std::vector<Ranked> ranked;  // every applicable suggestion, best first
};

/// generate, triage, enhance, rank.
PipelineResult run_pipeline(const LongMethod& method, const PipelineConfig& cfg, Transport* transport = nullptr);

/// triage, enhance, rank for an already generated set.
PipelineResult rank_suggestions(const LongMethod& method, const SuggestionSet& set, const PipelineConfig& cfg);

}  // namespace xmethod
