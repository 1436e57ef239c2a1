#include "xmethod/extraction.hpp"

#include <algorithm>
#include <unordered_set>

#include "xmethod/filtering.hpp"
#include "xmethod/io.hpp"
#include "xmethod/tokenizer.hpp"

namespace xmethod {

namespace {

std::string leading_ws(const std::string& line) {
    const auto n = line.find_first_not_of(" \t");
    return n == std::string::npos ? std::string{} : line.substr(0, n);
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

const Variable* find_tracked(const LongMethod& m, const std::string& name, int a, int b) {
    for (const auto& acc : m.accesses) {
        if (acc.statement < a || acc.statement > b || !acc.def) continue;
        const auto& v = m.variables[static_cast<std::size_t>(acc.variable)];
        if (v.name == name && (v.kind == VariableKind::local || v.kind == VariableKind::parameter)) return &v;
    }
    return nullptr;
}

std::string recover_type(const Variable& v, const PlanOptions& options) {
    if (v.type_text.empty()) throw Error(Errc::plan_infeasible, "no declared type for '" + v.name + "'");
    if (v.type_text == "var" && !options.allow_var_fallback) {
        throw Error(Errc::plan_infeasible, "'" + v.name + "' is declared with var");
    }
    return v.type_text;
}

}  // namespace

std::string ExtractionPlan::signature() const {
    std::string out = return_type + " " + new_method_name + "(";
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (i) out += ", ";
        out += parameters[i].type_text + " " + parameters[i].name;
    }
    return out + ")";
}

ExtractionPlan plan_extraction(const LongMethod& method, const ExtractSuggestion& s, std::string_view source,
                               PlanOptions options) {
    const Verdict v = check_validity(method, s);
    if (!v.applicable()) {
        throw Error(Errc::plan_infeasible, std::string(to_string(v.reason)) + ": " + v.detail);
    }
    const auto span = method.statement_span(s.range());
    const auto [a, b] = *span;
    const auto& st = method.statements;
    const int depth = st[static_cast<std::size_t>(a)].depth_before;

    ExtractionPlan plan;
    plan.new_method_name = sanitize_name(s.name);
    plan.host = {method.start_line, method.end_line};
    plan.fragment = s.range();
    plan.insertion_line = method.end_line + 1;
    plan.source_sha256 = sha256_hex(source);

    // Parameters in order of first use inside the fragment.
    const auto in = live_in(method, s.range());
    std::unordered_set<int> seen;
    for (const auto& acc : method.accesses) {
        if (acc.statement < a || acc.statement > b || !acc.use) continue;
        const auto& var = method.variables[static_cast<std::size_t>(acc.variable)];
        if (!in.count(var.name) || !seen.insert(acc.variable).second) continue;
        if (var.kind == VariableKind::local && var.decl_statement >= a) continue;
        if (std::any_of(plan.parameters.begin(), plan.parameters.end(),
                        [&](const PlanParameter& p) { return p.name == var.name; })) {
            continue;
        }
        plan.parameters.push_back({var.name, recover_type(var, options)});
    }

    const auto out = live_out(method, s.range());
    const bool body_suffix = b == static_cast<int>(st.size()) - 1;
    bool has_return = false;
    for (int k = a; k <= b; ++k) has_return = has_return || st[static_cast<std::size_t>(k)].has_return;

    std::string preamble;  // extra first line of the new body
    std::string call;
    std::string args;
    for (std::size_t i = 0; i < plan.parameters.size(); ++i) {
        if (i) args += ", ";
        args += plan.parameters[i].name;
    }
    const std::string invocation = plan.new_method_name + "(" + args + ")";
    if (!out.empty()) {
        const std::string& name = *out.begin();
        const Variable* var = find_tracked(method, name, a, b);
        if (!var) throw Error(Errc::plan_infeasible, "cannot find declaration of '" + name + "'");
        const std::string type = recover_type(*var, options);
        plan.return_variable = name;
        plan.return_type = type;
        const bool declared_inside = var->kind == VariableKind::local && var->decl_statement >= a;
        if (declared_inside) {
            call = type + " " + name + " = " + invocation + ";";
        } else {
            call = name + " = " + invocation + ";";
            const bool passed = std::any_of(plan.parameters.begin(), plan.parameters.end(),
                                            [&](const PlanParameter& p) { return p.name == name; });
            if (!passed) {
                // Assigned unconditionally at the fragment's own level: a local is enough.
                bool top_level_def = false;
                for (const auto& acc : method.accesses) {
                    if (acc.statement >= a && acc.statement <= b && acc.def &&
                        method.variables[static_cast<std::size_t>(acc.variable)].name == name &&
                        st[static_cast<std::size_t>(acc.statement)].depth_before == depth &&
                        st[static_cast<std::size_t>(acc.statement)].scope_depth == depth) {
                        top_level_def = true;
                    }
                }
                if (top_level_def) {
                    preamble = type + " " + name + ";";
                } else {
                    plan.parameters.push_back({name, type});
                    args += (args.empty() ? "" : ", ") + name;
                    call = name + " = " + plan.new_method_name + "(" + args + ");";
                }
            }
        }
    } else if (has_return && body_suffix) {
        plan.return_type = method.return_type.empty() ? "void" : method.return_type;
        call = plan.return_type == "void" ? invocation + ";" : "return " + invocation + ";";
    } else {
        plan.return_type = "void";
        call = invocation + ";";
    }

    std::vector<std::string> frag;
    for (int l = s.start_line; l <= s.end_line; ++l) frag.push_back(method.line_text(l));
    plan.fragment_text = join_lines(frag);

    std::string common;
    bool first = true;
    for (const auto& l : frag) {
        if (blank(l)) continue;
        const auto ws = leading_ws(l);
        if (first) {
            common = ws;
            first = false;
        } else {
            std::size_t k = 0;
            while (k < common.size() && k < ws.size() && common[k] == ws[k]) ++k;
            common.resize(k);
        }
    }
    const std::string& inner = method.body_indent;
    const std::string call_indent = leading_ws(method.line_text(st[static_cast<std::size_t>(a)].start_line));
    plan.call_site_text = call_indent + call;

    std::vector<std::string> text;
    std::string head = method.indent + "private ";
    if (method.is_static) head += "static ";
    head += plan.signature();
    if (!method.throws_clause.empty()) head += " throws " + method.throws_clause;
    text.push_back(head + " {");
    if (!preamble.empty()) text.push_back(inner + preamble);
    for (const auto& l : frag) text.push_back(blank(l) ? std::string{} : inner + l.substr(common.size()));
    if (plan.return_variable) text.push_back(inner + "return " + *plan.return_variable + ";");
    text.push_back(method.indent + "}");
    plan.method_text = join_lines(text);
    return plan;
}

std::string apply(std::string_view source, const ExtractionPlan& plan) {
    if (sha256_hex(source) != plan.source_sha256) {
        throw Error(Errc::stale_source, "source changed since the plan was made");
    }
    auto lines = split_lines(source);
    if (plan.host.end > static_cast<int>(lines.size())) throw Error(Errc::stale_source, "host method moved");

    std::vector<std::string> out;
    out.reserve(lines.size() + 8);
    for (int l = 1; l < plan.fragment.start; ++l) out.push_back(lines[static_cast<std::size_t>(l - 1)]);
    out.push_back(plan.call_site_text);
    for (int l = plan.fragment.end + 1; l <= plan.host.end; ++l) out.push_back(lines[static_cast<std::size_t>(l - 1)]);
    const int host_end = static_cast<int>(out.size());
    out.emplace_back();
    const int new_start = static_cast<int>(out.size()) + 1;
    for (auto& l : split_lines(plan.method_text)) out.push_back(std::move(l));
    const int new_end = static_cast<int>(out.size());
    for (int l = plan.host.end + 1; l <= static_cast<int>(lines.size()); ++l) {
        out.push_back(lines[static_cast<std::size_t>(l - 1)]);
    }
    std::string result = join_lines(out);
    if (!source.empty() && source.back() != '\n') result.pop_back();

    // Both methods must re-parse with every name resolving, and the new
    // method must not read host locals that were not passed in.
    try {
        const auto host = parse_method(result, {plan.host.start, host_end});
        const auto extracted = parse_method(result, {new_start, new_end});
        if (!unresolved_accesses(host).empty() || !unresolved_accesses(extracted).empty()) {
            throw Error(Errc::reparse_failure, "unresolved names after extraction");
        }
        // Host names visible at the call site.
        const int call = host.statement_at(plan.fragment.start);
        std::unordered_set<std::string> host_locals;
        for (const auto& v : host.variables) {
            const bool visible_local = v.kind == VariableKind::local && v.decl_statement < call && v.scope_end >= call;
            if (visible_local || v.kind == VariableKind::parameter) host_locals.insert(v.name);
        }
        for (const auto& acc : extracted.accesses) {
            const auto& v = extracted.variables[static_cast<std::size_t>(acc.variable)];
            if (v.kind == VariableKind::external && host_locals.count(v.name)) {
                throw Error(Errc::reparse_failure, "'" + v.name + "' leaks from the host into " + extracted.name);
            }
        }
    } catch (const Error& e) {
        if (e.code() == Errc::reparse_failure) throw;
        throw Error(Errc::reparse_failure, e.what());
    }
    return result;
}

}  // namespace xmethod
