#include "xmethod/enhancement.hpp"

#include <map>

namespace xmethod {

ExtractSuggestion extend_for_declaration(const LongMethod& method, const ExtractSuggestion& s,
                                         const FilterConfig& cfg) {
    ExtractSuggestion current = s;
    while (true) {
        const auto span = method.statement_span(current.range());
        if (!span || span->first == 0) break;
        const Statement& above = method.statements[static_cast<std::size_t>(span->first - 1)];
        if (above.kind != StatementKind::declaration) break;

        std::set<std::string> used;
        for (int k = span->first; k <= span->second; ++k) {
            const auto& u = method.statements[static_cast<std::size_t>(k)].uses;
            used.insert(u.begin(), u.end());
        }
        const bool feeds = std::any_of(above.defs.begin(), above.defs.end(),
                                       [&](const std::string& d) { return used.count(d) > 0; });
        if (!feeds) break;

        ExtractSuggestion candidate = current;
        candidate.start_line = above.start_line;
        candidate.provenance = Provenance::enhanced;
        if (!classify(method, candidate, cfg).applicable()) break;
        if (live_in(method, candidate.range()).size() > live_in(method, current.range()).size()) break;
        current = candidate;
    }
    return current;
}

ExtractSuggestion shrink_control_header(const LongMethod& method, const ExtractSuggestion& s,
                                        const FilterConfig& cfg) {
    const auto span = method.statement_span(s.range());
    if (!span) return s;
    const auto [a, b] = *span;
    const Statement& head = method.statements[static_cast<std::size_t>(a)];
    if (!head.if_header || head.has_else || head.block_end != b || b - a < 2) return s;

    ExtractSuggestion candidate = s;
    candidate.start_line = method.statements[static_cast<std::size_t>(a + 1)].start_line;
    candidate.end_line = method.statements[static_cast<std::size_t>(b - 1)].end_line;
    candidate.provenance = Provenance::enhanced;
    return classify(method, candidate, cfg).applicable() ? candidate : s;
}

ExtractSuggestion enhance(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg) {
    return shrink_control_header(method, extend_for_declaration(method, s, cfg), cfg);
}

std::vector<ExtractSuggestion> enhance_applicable(const LongMethod& method, const Triage& triaged,
                                                  const FilterConfig& cfg, bool enabled) {
    std::map<LineRange, ExtractSuggestion> merged;
    for (const auto& v : triaged.verdicts) {
        if (!v.applicable()) continue;
        ExtractSuggestion s = enabled ? enhance(method, v.suggestion, cfg) : v.suggestion;
        auto [it, fresh] = merged.try_emplace(s.range(), s);
        if (!fresh) {
            // Keep the name of the larger contributor; ties keep the smaller name.
            if (s.count > it->second.count || (s.count == it->second.count && s.name < it->second.name)) {
                it->second.name = s.name;
            }
            it->second.count += s.count;
        }
    }
    std::vector<ExtractSuggestion> out;
    out.reserve(merged.size());
    for (auto& [range, s] : merged) out.push_back(std::move(s));
    return out;
}

}  // namespace xmethod
