#include "xmethod/filtering.hpp"

#include <algorithm>

namespace xmethod {

void FilterConfig::validate() const {
    if (!(max_coverage_fraction > 0.0 && max_coverage_fraction <= 1.0)) {
        throw Error(Errc::bad_input, "max coverage must be in (0, 1]");
    }
    if (min_statements < 2) throw Error(Errc::bad_input, "min statements must be at least 2");
}

namespace {

Verdict make(const ExtractSuggestion& s, VerdictClass c, Reason r, std::string detail) {
    Verdict v;
    v.suggestion = s;
    v.original = s;
    v.verdict_class = c;
    v.reason = r;
    v.detail = std::move(detail);
    return v;
}

std::string join(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

}  // namespace

int fragment_statements(const LongMethod& method, LineRange range) {
    const auto span = method.statement_span(range);
    if (!span) return 0;
    int n = 0;
    for (int k = span->first; k <= span->second; ++k) {
        n += method.statements[static_cast<std::size_t>(k)].countable() ? 1 : 0;
    }
    return n;
}

Verdict check_validity(const LongMethod& method, const ExtractSuggestion& s) {
    const auto bad_scope = [&](std::string why) {
        return make(s, VerdictClass::invalid, Reason::scope_unbalanced, std::move(why));
    };
    if (s.start_line <= method.start_line || s.end_line >= method.end_line || s.start_line > s.end_line) {
        return bad_scope("range outside the host method body");
    }
    const auto span = method.statement_span(s.range());
    if (!span) return bad_scope("range holds no statements");
    const auto [a, b] = *span;
    const auto& st = method.statements;
    auto at = [&](int i) -> const Statement& { return st[static_cast<std::size_t>(i)]; };

    int depth = at(a).depth_before;
    for (int k = a; k <= b; ++k) depth = std::min(depth, at(k).scope_depth);
    if (at(a).depth_before != depth || at(b).depth_after != depth) {
        return bad_scope("start and end sit at different nesting levels");
    }
    const bool split_tail =
        b + 1 < static_cast<int>(st.size()) && at(b + 1).continuation && at(b + 1).scope_depth == depth;
    if (at(a).continuation || split_tail) {
        return bad_scope("splits an if/else, try/catch or do/while chain");
    }

    const bool body_suffix = b == static_cast<int>(st.size()) - 1;
    for (int k = a; k <= b; ++k) {
        const Statement& x = at(k);
        for (int t : x.jump_targets) {
            if (t < a || t > b) {
                return make(s, VerdictClass::invalid, Reason::control_flow_escape,
                            "break/continue at line " + std::to_string(x.start_line) + " leaves the fragment");
            }
        }
        if (x.has_return && !body_suffix) {
            return make(s, VerdictClass::invalid, Reason::control_flow_escape,
                        "return at line " + std::to_string(x.start_line) + " with code after the fragment");
        }
        for (int t : x.throw_trys) {
            if (t < a || t > b) {
                return make(s, VerdictClass::invalid, Reason::control_flow_escape,
                            "throw at line " + std::to_string(x.start_line) + " is caught outside the fragment");
            }
        }
    }

    for (const auto& acc : method.accesses) {
        if (acc.statement < a || acc.statement > b) continue;
        const auto& v = method.variables[static_cast<std::size_t>(acc.variable)];
        if (v.kind == VariableKind::unresolved) {
            return make(s, VerdictClass::invalid, Reason::variable_inaccessible,
                        "'" + v.name + "' is not visible at line " + std::to_string(at(acc.statement).start_line));
        }
    }

    const auto out = live_out(method, s.range());
    if (out.size() > 1) {
        return make(s, VerdictClass::invalid, Reason::multiple_returns, "live after the fragment: " + join(out));
    }
    return make(s, VerdictClass::applicable, Reason::ok, out.empty() ? "" : "returns " + *out.begin());
}

Verdict check_usefulness(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg) {
    const int fragment = fragment_statements(method, s.range());
    const auto total = static_cast<int>(method.countable_statements());
    const double coverage = total == 0 ? 1.0 : static_cast<double>(fragment) / static_cast<double>(total);
    if (coverage >= cfg.max_coverage_fraction) {
        return make(s, VerdictClass::not_useful, Reason::whole_method,
                    std::to_string(fragment) + " of " + std::to_string(total) + " statements");
    }
    if (fragment < cfg.min_statements) {
        return make(s, VerdictClass::not_useful, Reason::one_liner, std::to_string(fragment) + " statement(s)");
    }
    return make(s, VerdictClass::applicable, Reason::ok, {});
}

Verdict classify(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg) {
    Verdict v = check_validity(method, s);
    if (!v.applicable()) return v;
    Verdict u = check_usefulness(method, s, cfg);
    if (u.applicable()) u.detail = v.detail;
    return u;
}

std::vector<const Verdict*> Triage::of(VerdictClass c) const {
    std::vector<const Verdict*> out;
    for (const auto& v : verdicts) {
        if (v.verdict_class == c) out.push_back(&v);
    }
    return out;
}

std::size_t Triage::count(VerdictClass c) const {
    return static_cast<std::size_t>(
        std::count_if(verdicts.begin(), verdicts.end(), [c](const Verdict& v) { return v.verdict_class == c; }));
}

Triage triage(const LongMethod& method, const std::vector<ExtractSuggestion>& entries, const FilterConfig& cfg) {
    Triage out;
    out.verdicts.reserve(entries.size());
    for (const auto& raw : entries) {
        const auto norm = normalize_scope(method, raw);
        Verdict v;
        if (!norm.salvageable) {
            v = make(norm.suggestion, VerdictClass::invalid, Reason::scope_unbalanced, norm.detail);
        } else {
            v = classify(method, norm.suggestion, cfg);
        }
        v.original = raw;
        out.verdicts.push_back(std::move(v));
    }
    return out;
}

Triage triage(const LongMethod& method, const SuggestionSet& set, const FilterConfig& cfg) {
    return triage(method, set.entries(), cfg);
}

}  // namespace xmethod
