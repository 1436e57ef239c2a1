#pragma once

// Undoes an extraction by pasting the new method's body back over its call
// and compares the result with the original text, line by line.

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "xmethod/extraction.hpp"
#include "xmethod/tokenizer.hpp"

namespace testsupport {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// Splits on commas outside angle brackets and parentheses.
inline std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int nest = 0;
    for (char c : s) {
        if (c == '<' || c == '(') ++nest;
        if (c == '>' || c == ')') --nest;
        if (c == ',' && nest == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

inline std::optional<std::string> inline_mismatch(const std::string& original, const std::string& result,
                                                  const xmethod::LongMethod& host, const xmethod::ExtractionPlan& plan) {
    using namespace xmethod;
    const auto before = split_lines(original);
    const auto after = split_lines(result);
    const int s = plan.fragment.start;
    const int e = plan.fragment.end;
    const int frag_len = e - s + 1;
    auto line = [](const std::vector<std::string>& v, int n) -> const std::string& {
        return v.at(static_cast<std::size_t>(n - 1));
    };

    for (int l = 1; l < s; ++l) {
        if (line(after, l) != line(before, l)) return "line " + std::to_string(l) + " above the call changed";
    }
    const int host_end = host.end_line - frag_len + 1;
    for (int l = s + 1; l <= host_end; ++l) {
        if (line(after, l) != line(before, l + frag_len - 1)) return "host line " + std::to_string(l) + " changed";
    }

    // The call: `T v = f(a, b);`, `v = f(a, b);`, `return f(a, b);` or `f(a, b);`.
    static const std::regex call_re(R"(^(?:(?:([\w.<>\[\], ?]+)\s+)?(\w+)\s*=\s*|(return)\s+)?(\w+)\((.*)\);$)");
    std::smatch cm;
    const std::string call = trim(line(after, s));
    if (!std::regex_match(call, cm, call_re)) return "call site has an unexpected shape: " + call;
    const std::string assigned = cm[2];
    const bool declares = cm[1].matched;
    const bool returns = cm[3].matched;
    const std::string callee = cm[4];
    std::vector<std::string> args;
    for (const auto& a : split_top_level(cm[5])) args.push_back(a);

    if (!trim(line(after, host_end + 1)).empty()) return "no blank line before the new method";
    const int sig = host_end + 2;
    static const std::regex sig_re(R"(^private\s+(?:static\s+)?(.+?)\s+(\w+)\((.*)\)(?:\s+throws\s+.+)?\s*\{$)");
    std::smatch sm;
    const std::string sig_text = trim(line(after, sig));
    if (!std::regex_match(sig_text, sm, sig_re)) return "unexpected signature: " + sig_text;
    if (sm[2] != callee) return "call targets " + callee + " but the new method is " + std::string(sm[2]);
    std::vector<std::string> params;
    for (const auto& t : split_top_level(sm[3])) params.push_back(t.substr(t.find_last_of(' ') + 1));
    if (params != args) return "arguments do not match the parameters one to one";

    int close = sig + 1;
    while (trim(line(after, close)) != "}" || line(after, close).size() > host.indent.size() + 1) ++close;
    std::vector<std::string> body(after.begin() + sig, after.begin() + close - 1);

    if (!assigned.empty() && !declares) {
        // `v = f(...)`: the body may open with `T v;` and must end with `return v;`.
        if (!body.empty() && std::regex_match(trim(body.front()), std::regex(R"([\w.<>\[\], ?]+\s+)" + assigned + ";"))) {
            body.erase(body.begin());
        }
    }
    if (!assigned.empty()) {
        if (body.empty() || trim(body.back()) != "return " + assigned + ";") return "missing `return " + assigned + ";`";
        body.pop_back();
    }
    if (static_cast<int>(body.size()) != frag_len) {
        return "inlined body has " + std::to_string(body.size()) + " lines, fragment " + std::to_string(frag_len);
    }
    for (int i = 0; i < frag_len; ++i) {
        if (trim(body[static_cast<std::size_t>(i)]) != trim(line(before, s + i))) {
            return "inlined line " + std::to_string(s + i) + " differs: " + trim(body[static_cast<std::size_t>(i)]);
        }
    }
    if (returns && !plan.return_variable && plan.return_type == "void") return "void method returned a value";
    for (int l = host.end_line + 1; l <= static_cast<int>(before.size()); ++l) {
        if (line(after, close + l - host.end_line) != line(before, l)) return "text after the host changed";
    }

    // Both methods re-parse, nothing is unresolved and no host local sneaks
    // into the new method as if it were a field.
    const auto new_host = parse_method(result, {host.start_line, host_end});
    const auto extracted = parse_method(result, {sig, close});
    if (!unresolved_accesses(new_host).empty()) return "unresolved names in the host";
    if (!unresolved_accesses(extracted).empty()) return "unresolved names in the new method";
    std::set<std::string> host_names;
    for (const auto& v : host.variables) {
        if (v.kind == VariableKind::local || v.kind == VariableKind::parameter) host_names.insert(v.name);
    }
    for (const auto& v : extracted.variables) {
        if (v.kind == VariableKind::external && host_names.count(v.name)) {
            return "'" + v.name + "' is a host variable read as a field in the new method";
        }
    }
    return std::nullopt;
}

}  // namespace testsupport
