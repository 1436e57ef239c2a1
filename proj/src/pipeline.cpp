#include "xmethod/pipeline.hpp"

namespace xmethod {

PipelineResult rank_suggestions(const LongMethod& method, const SuggestionSet& set, const PipelineConfig& cfg) {
    PipelineResult r;
    r.triage = triage(method, set, cfg.filter);
    r.applicable = enhance_applicable(method, r.triage, cfg.filter, cfg.enhance);
    r.heatmap = build_heatmap(method, r.applicable);
    r.ranked = score(r.applicable, r.heatmap, cfg.strategy);
    return r;
}

PipelineResult run_pipeline(const LongMethod& method, const PipelineConfig& cfg, Transport* transport) {
    cfg.filter.validate();
    std::optional<FixtureCache> cache;
    if (cfg.cache_dir) cache.emplace(*cfg.cache_dir);
    auto generation = generate(method, cfg.llm, cfg.cache_mode, cache ? &*cache : nullptr, transport);
    PipelineResult r = rank_suggestions(method, generation.set, cfg);
    r.generation = std::move(generation);
    return r;
}

}  // namespace xmethod
