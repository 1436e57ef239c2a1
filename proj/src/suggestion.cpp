#include "xmethod/suggestion.hpp"

#include <algorithm>
#include <cctype>

#include "xmethod/tokenizer.hpp"

namespace xmethod {

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::raw: return "raw";
        case Provenance::normalized: return "normalized";
        case Provenance::enhanced: return "enhanced";
    }
    return "raw";
}

std::string_view to_string(VerdictClass c) noexcept {
    switch (c) {
        case VerdictClass::invalid: return "invalid";
        case VerdictClass::not_useful: return "not_useful";
        case VerdictClass::applicable: return "applicable";
    }
    return "invalid";
}

std::string_view to_string(Reason r) noexcept {
    switch (r) {
        case Reason::scope_unbalanced: return "ScopeUnbalanced";
        case Reason::multiple_returns: return "MultipleReturns";
        case Reason::control_flow_escape: return "ControlFlowEscape";
        case Reason::variable_inaccessible: return "VariableInaccessible";
        case Reason::whole_method: return "WholeMethod";
        case Reason::one_liner: return "OneLiner";
        case Reason::ok: return "Ok";
    }
    return "Ok";
}

std::string sanitize_name(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '_' || c == '$') {
            if (out.empty() && std::isdigit(u)) continue;
            out += c;
        }
    }
    if (out.empty() || is_keyword(out)) return "extracted";
    return out;
}

void SuggestionSet::add(std::string_view name, LineRange range, int count) {
    votes_[range][sanitize_name(name)] += count;
}

void SuggestionSet::merge(const SuggestionSet& other) {
    for (const auto& [range, names] : other.votes_) {
        for (const auto& [name, n] : names) votes_[range][name] += n;
    }
}

std::vector<ExtractSuggestion> SuggestionSet::entries() const {
    std::vector<ExtractSuggestion> out;
    out.reserve(votes_.size());
    for (const auto& [range, names] : votes_) {
        ExtractSuggestion s;
        s.start_line = range.start;
        s.end_line = range.end;
        s.count = 0;
        int best = -1;
        for (const auto& [name, n] : names) {  // map order gives the lexicographic tie-break
            s.count += n;
            if (n > best) {
                best = n;
                s.name = name;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

int SuggestionSet::total_count() const {
    int total = 0;
    for (const auto& [range, names] : votes_) {
        for (const auto& [name, n] : names) total += n;
    }
    return total;
}

Normalized normalize_scope(const LongMethod& method, const ExtractSuggestion& s) {
    Normalized out{s, true, {}};
    out.suggestion.provenance = Provenance::normalized;
    auto reject = [&](std::string why) {
        out.salvageable = false;
        out.detail = std::move(why);
        return out;
    };

    if (s.start_line > s.end_line) return reject("start after end");
    if (s.start_line <= method.start_line || s.end_line >= method.end_line) {
        out.suggestion.start_line = std::clamp(s.start_line, method.start_line + 1, method.end_line - 1);
        out.suggestion.end_line = std::clamp(s.end_line, method.start_line + 1, method.end_line - 1);
        return reject("lines " + std::to_string(s.start_line) + "-" + std::to_string(s.end_line) +
                      " fall outside the host method " + std::to_string(method.start_line) + "-" +
                      std::to_string(method.end_line));
    }
    const auto span = method.statement_span(s.range());
    if (!span) return reject("range holds no statements");

    const auto& st = method.statements;
    auto at = [&](int i) -> const Statement& { return st[static_cast<std::size_t>(i)]; };
    int a = span->first;
    int b = span->second;
    int depth = std::min(at(a).depth_before, at(b).depth_after);
    for (int k = a; k <= b; ++k) depth = std::min(depth, at(k).scope_depth);

    const int last = static_cast<int>(st.size()) - 1;
    bool changed = true;
    while (changed) {
        changed = false;
        while (at(a).depth_before > depth && a > 0) {
            --a;
            depth = std::min(depth, at(a).scope_depth);
            changed = true;
        }
        while (at(b).depth_after > depth && b < last) {
            ++b;
            depth = std::min(depth, at(b).scope_depth);
            changed = true;
        }
        if (at(a).continuation && a > 0) {
            --a;
            depth = std::min(depth, at(a).scope_depth);
            changed = true;
        }
        if (b < last && at(b + 1).continuation && at(b + 1).scope_depth == depth) {
            ++b;
            depth = std::min(depth, at(b).scope_depth);
            changed = true;
        }
    }

    out.suggestion.start_line = std::min(s.start_line, at(a).start_line);
    out.suggestion.end_line = std::max(s.end_line, at(b).end_line);
    const bool widened = at(a).start_line < s.start_line || at(b).end_line > s.end_line;
    if (widened && a == 0 && b == last) return reject("balancing the range swallows the whole body");
    return out;
}

nlohmann::json to_json(const ExtractSuggestion& s) {
    return {{"name", s.name}, {"start_line", s.start_line}, {"end_line", s.end_line}, {"count", s.count}};
}

nlohmann::json to_json(const Verdict& v) {
    auto j = to_json(v.suggestion);
    j["class"] = to_string(v.verdict_class);
    j["reason_code"] = to_string(v.reason);
    j["detail"] = v.detail;
    j["original"] = {{"start_line", v.original.start_line}, {"end_line", v.original.end_line}};
    return j;
}

}  // namespace xmethod
