#include "xmethod/method_model.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "xmethod/tokenizer.hpp"

namespace xmethod {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::unbalanced_braces: return "UnbalancedBraces";
        case Errc::empty_body: return "EmptyBody";
        case Errc::line_not_in_body: return "LineNotInBody";
        case Errc::invalid_range: return "InvalidRange";
        case Errc::endpoint_unreachable: return "EndpointUnreachable";
        case Errc::missing_fixture: return "MissingFixture";
        case Errc::plan_infeasible: return "PlanInfeasible";
        case Errc::stale_source: return "StaleSource";
        case Errc::reparse_failure: return "ReparseFailure";
        case Errc::corpus_mismatch: return "CorpusMismatch";
        case Errc::index_out_of_range: return "IndexOutOfRange";
        case Errc::io_failure: return "IoFailure";
        case Errc::bad_input: return "BadInput";
    }
    return "Unknown";
}

std::string_view to_string(StatementKind kind) noexcept {
    switch (kind) {
        case StatementKind::declaration: return "declaration";
        case StatementKind::expression: return "expression";
        case StatementKind::control_header: return "control-header";
        case StatementKind::block_close: return "block-close";
        case StatementKind::return_stmt: return "return";
        case StatementKind::break_stmt: return "break";
        case StatementKind::continue_stmt: return "continue";
        case StatementKind::throw_stmt: return "throw";
        case StatementKind::try_boundary: return "try-boundary";
    }
    return "unknown";
}

namespace {

enum class Header { none, if_, else_, for_, while_, do_, try_, catch_, finally_, switch_, sync, bare, label };

struct ParenGroup {
    Header keyword;
    std::size_t open;   // index of `(`
    std::size_t close;  // index of matching `)`
};

struct Declarator {
    std::size_t name;
    std::string type_text;
};

// A single Java statement, block opener or block closer, at token level.
struct Micro {
    std::size_t first = 0;
    std::size_t last = 0;  // one past
    int depth_before = 0;
    int depth_after = 0;
    StatementKind kind = StatementKind::expression;
    bool opener = false;
    bool closer = false;
    Header head = Header::none;  // first keyword of the header chain
    bool loop = false;
    bool breakable = false;
    bool chain_has_loop = false;
    bool continuation = false;
    bool do_tail = false;
    int parent = -1;
    int match = -1;
    std::string label;  // set on labelled openers
    std::string label_name;  // set on label micros
    std::vector<ParenGroup> groups;
    std::vector<std::pair<std::size_t, std::size_t>> opaque;  // [open, close] brace pairs
    std::vector<Declarator> decls;
    std::unordered_set<std::size_t> skip;  // type and label tokens

    bool has_return = false;
    struct Jump {
        bool is_break;
        std::string label;
        int target = -1;
    };
    std::vector<Jump> jumps;
    std::vector<int> throw_trys;
    std::vector<int> loops;  // enclosing loop openers
    int stmt = -1;
};

bool is_header_keyword(const Token& t) {
    return t.kind == TokenKind::keyword &&
           (t.text == "if" || t.text == "for" || t.text == "while" || t.text == "do" || t.text == "try" ||
            t.text == "switch" || t.text == "synchronized" || t.text == "else" || t.text == "catch" ||
            t.text == "finally");
}

Header header_of(const Token& t) {
    if (t.kind != TokenKind::keyword) return Header::none;
    if (t.text == "if") return Header::if_;
    if (t.text == "else") return Header::else_;
    if (t.text == "for") return Header::for_;
    if (t.text == "while") return Header::while_;
    if (t.text == "do") return Header::do_;
    if (t.text == "try") return Header::try_;
    if (t.text == "catch") return Header::catch_;
    if (t.text == "finally") return Header::finally_;
    if (t.text == "switch") return Header::switch_;
    if (t.text == "synchronized") return Header::sync;
    return Header::none;
}

bool is_loop(Header h) { return h == Header::for_ || h == Header::while_ || h == Header::do_; }

bool is_compound_assign(const std::string& s) {
    return s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" || s == "&=" || s == "|=" ||
           s == "^=" || s == "<<=" || s == ">>=" || s == ">>>=";
}

std::size_t match_close(const std::vector<Token>& toks, std::size_t open, std::size_t limit) {
    const std::string& o = toks[open].text;
    const std::string c = o == "(" ? ")" : o == "[" ? "]" : "}";
    int depth = 0;
    for (std::size_t i = open; i < limit; ++i) {
        if (toks[i].kind == TokenKind::literal) continue;
        if (toks[i].text == o) ++depth;
        if (toks[i].text == c && --depth == 0) return i;
    }
    return limit;
}

// Skips `@Name(.Name)*` and an optional argument group.
std::size_t skip_annotation(const std::vector<Token>& toks, std::size_t p, std::size_t to) {
    ++p;
    if (p < to && toks[p].is_identifier()) ++p;
    while (p + 1 < to && toks[p].is(".") && toks[p + 1].is_identifier()) p += 2;
    if (p < to && toks[p].is("(")) p = match_close(toks, p, to) + 1;
    return p;
}

// Parses `Type` at p: Name(.Name)* <...>? ([])*. Returns one past the type or p on failure.
std::size_t parse_type(const std::vector<Token>& toks, std::size_t p, std::size_t to) {
    if (p >= to) return p;
    const Token& t = toks[p];
    if (!(t.is_identifier() || (t.kind == TokenKind::keyword && is_primitive_type(t.text)))) return p;
    std::size_t q = p + 1;
    while (q + 1 < to && toks[q].is(".") && toks[q + 1].is_identifier()) q += 2;
    if (q < to && toks[q].is("<")) {
        int depth = 0;
        for (; q < to; ++q) {
            const Token& g = toks[q];
            if (g.is("<")) {
                ++depth;
            } else if (g.is(">")) {
                if (--depth == 0) {
                    ++q;
                    break;
                }
            } else if (!(g.is_identifier() || g.is(",") || g.is(".") || g.is("?") || g.is("[") || g.is("]") ||
                         g.is("&") || g.is("extends") || g.is("super") ||
                         (g.kind == TokenKind::keyword && is_primitive_type(g.text)))) {
                return p;
            }
        }
        if (depth != 0) return p;
    }
    while (q + 1 < to && toks[q].is("[") && toks[q + 1].is("]")) q += 2;
    return q;
}

// Skips an initializer expression up to `,` or `;` at nesting zero.
std::size_t skip_initializer(const std::vector<Token>& toks, std::size_t p, std::size_t to) {
    int depth = 0;
    for (; p < to; ++p) {
        const Token& t = toks[p];
        if (t.kind == TokenKind::literal) continue;
        if (t.is("(") || t.is("[") || t.is("{")) ++depth;
        else if (t.is(")") || t.is("]") || t.is("}")) {
            if (depth == 0) return p;
            --depth;
        } else if (depth == 0 && (t.is(",") || t.is(";"))) {
            return p;
        }
    }
    return p;
}

// Recognises `[final] [@Ann] Type name [= init] {, name [= init]}` starting at p.
// On success appends declarators and marks type tokens in `skip`.
bool detect_declarators(const std::vector<Token>& toks, std::size_t p, std::size_t to,
                        std::vector<Declarator>& out, std::unordered_set<std::size_t>& skip,
                        std::size_t* end = nullptr) {
    while (p < to && (toks[p].is("final") || toks[p].is("@"))) {
        if (toks[p].is("@")) {
            for (std::size_t k = p; k < std::min(to, p + 2); ++k) skip.insert(k);
            p = skip_annotation(toks, p, to);
        } else {
            ++p;
        }
    }
    const std::size_t type_begin = p;
    const std::size_t type_end = parse_type(toks, p, to);
    if (type_end == type_begin || type_end >= to) return false;
    if (!toks[type_end].is_identifier()) return false;
    auto follows_name = [&](std::size_t q) {
        return q >= to || toks[q].is("=") || toks[q].is(";") || toks[q].is(",") || toks[q].is(":") ||
               toks[q].is(")") || toks[q].is("[");
    };
    if (!follows_name(type_end + 1)) return false;

    const std::string base_type = join_tokens(toks, type_begin, type_end);
    for (std::size_t k = type_begin; k < type_end; ++k) skip.insert(k);
    std::size_t q = type_end;
    while (true) {
        std::string type_text = base_type;
        const std::size_t name = q;
        ++q;
        while (q + 1 < to && toks[q].is("[") && toks[q + 1].is("]")) {
            type_text += "[]";
            q += 2;
        }
        out.push_back({name, type_text});
        if (q < to && toks[q].is("=")) q = skip_initializer(toks, q + 1, to);
        if (q + 1 < to && toks[q].is(",") && toks[q + 1].is_identifier() && follows_name(q + 2)) {
            q = q + 1;
            continue;
        }
        break;
    }
    if (end) *end = q;
    return true;
}

class BodyParser {
public:
    BodyParser(const std::vector<Token>& toks, std::size_t begin) : toks_(toks), pos_(begin) {}

    // Returns the index of the method's closing brace.
    std::size_t run(std::vector<Micro>& micros) {
        std::vector<int> stack;
        int depth = 0;
        while (true) {
            if (pos_ >= toks_.size()) {
                throw Error(Errc::unbalanced_braces, "method body is not closed");
            }
            const Token& t = toks_[pos_];
            if (t.is(";")) {
                ++pos_;
                continue;
            }
            if (t.is("}") && stack.empty()) return pos_;

            Micro m = scan();
            const int idx = static_cast<int>(micros.size());
            m.parent = stack.empty() ? -1 : stack.back();
            for (int s : stack) {
                if (micros[static_cast<std::size_t>(s)].loop) m.loops.push_back(s);
            }
            if (m.closer) {
                const int opener = stack.back();
                stack.pop_back();
                m.depth_before = depth;
                m.depth_after = --depth;
                m.match = opener;
                micros[static_cast<std::size_t>(opener)].match = idx;
                m.parent = micros[static_cast<std::size_t>(opener)].parent;
            } else if (m.opener) {
                m.depth_before = depth;
                m.depth_after = ++depth;
            } else {
                m.depth_before = m.depth_after = depth;
            }

            if (m.head == Header::while_ && !micros.empty()) {
                const Micro& prev = micros.back();
                const bool after_do_block =
                    prev.closer && micros[static_cast<std::size_t>(prev.match)].head == Header::do_;
                const bool after_do_stmt = !prev.opener && !prev.closer && prev.head == Header::do_;
                if (after_do_block || after_do_stmt) {
                    m.continuation = true;
                    m.do_tail = true;
                    m.loop = m.breakable = m.chain_has_loop = false;
                }
            }
            if (m.opener && !micros.empty() && !micros.back().label_name.empty()) {
                m.label = micros.back().label_name;
            }
            resolve_flow(m, micros, stack);
            if (m.opener) stack.push_back(idx);
            micros.push_back(std::move(m));
        }
    }

private:
    void resolve_flow(Micro& m, const std::vector<Micro>& micros, const std::vector<int>& stack) {
        for (auto& j : m.jumps) {
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                const Micro& o = micros[static_cast<std::size_t>(*it)];
                if (!j.label.empty()) {
                    if (o.label == j.label) {
                        j.target = *it;
                        break;
                    }
                    continue;
                }
                if ((j.is_break && o.breakable) || (!j.is_break && o.loop)) {
                    j.target = *it;
                    break;
                }
            }
        }
        if (!m.throw_trys.empty()) {
            for (int& target : m.throw_trys) {
                target = -1;
                for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                    if (micros[static_cast<std::size_t>(*it)].head == Header::try_) {
                        target = *it;
                        break;
                    }
                }
            }
        }
    }

    Micro scan() {
        Micro m;
        m.first = pos_;
        const Token& t = toks_[pos_];

        if (t.is("}")) {
            m.closer = true;
            m.kind = StatementKind::block_close;
            m.last = ++pos_;
            return m;
        }
        if (t.is("{")) {
            m.opener = true;
            m.head = Header::bare;
            m.kind = StatementKind::control_header;
            m.last = ++pos_;
            return m;
        }
        if ((t.is("case") || t.is("default")) && t.kind == TokenKind::keyword) {
            std::size_t p = pos_;
            int depth = 0;
            while (p < toks_.size()) {
                const Token& u = toks_[p];
                if (u.is("(")) ++depth;
                if (u.is(")")) --depth;
                if (depth == 0 && u.is(":")) break;
                if (depth == 0 && (u.is("->") || u.is(";") || u.is("{") || u.is("}"))) break;
                ++p;
            }
            if (p < toks_.size() && toks_[p].is(":")) {
                m.head = Header::label;
                m.kind = StatementKind::control_header;
                m.last = pos_ = p + 1;
                return m;
            }
        }
        if (t.is_identifier() && pos_ + 1 < toks_.size() && toks_[pos_ + 1].is(":")) {
            m.head = Header::label;
            m.kind = StatementKind::control_header;
            m.label_name = t.text;
            m.skip.insert(pos_);
            m.last = pos_ = pos_ + 2;
            return m;
        }

        std::size_t p = pos_;
        bool in_header = false;
        while (p < toks_.size() && is_header_keyword(toks_[p])) {
            const Header h = header_of(toks_[p]);
            if (!in_header) {
                m.head = h;
                in_header = true;
                m.continuation = h == Header::else_ || h == Header::catch_ || h == Header::finally_;
            }
            if (is_loop(h)) {
                m.chain_has_loop = true;
            }
            const std::size_t kw = p++;
            const bool needs_paren = h == Header::if_ || h == Header::for_ || h == Header::while_ ||
                                     h == Header::switch_ || h == Header::sync || h == Header::catch_;
            if ((needs_paren || h == Header::try_) && p < toks_.size() && toks_[p].is("(")) {
                const std::size_t close = match_close(toks_, p, toks_.size());
                m.groups.push_back({h, p, close});
                p = close + 1;
            }
            (void)kw;
            if (p < toks_.size() && toks_[p].is("{")) {
                m.opener = true;
                m.loop = is_loop(h);
                m.breakable = m.loop || h == Header::switch_;
                m.kind = (m.head == Header::try_ || m.head == Header::catch_ || m.head == Header::finally_)
                             ? StatementKind::try_boundary
                             : StatementKind::control_header;
                m.last = pos_ = p + 1;
                collect_flow(m, m.first, m.last);
                return m;
            }
        }
        const std::size_t body_begin = p;

        // Statement (or brace-less header body) up to `;` at nesting zero.
        int depth = 0;
        std::vector<std::size_t> brace_stack;
        while (p < toks_.size()) {
            const Token& u = toks_[p];
            if (u.kind != TokenKind::literal) {
                if (u.is("(") || u.is("[")) {
                    ++depth;
                } else if (u.is(")") || u.is("]")) {
                    --depth;
                } else if (u.is("{")) {
                    brace_stack.push_back(p);
                } else if (u.is("}")) {
                    if (brace_stack.empty()) break;  // missing `;` before a closer
                    m.opaque.emplace_back(brace_stack.back(), p);
                    brace_stack.pop_back();
                } else if (u.is(";") && depth <= 0 && brace_stack.empty()) {
                    ++p;
                    break;
                }
            }
            ++p;
        }
        m.last = pos_ = p;

        if (in_header) {
            m.kind = (m.head == Header::try_ || m.head == Header::catch_ || m.head == Header::finally_)
                         ? StatementKind::try_boundary
                         : StatementKind::control_header;
        } else {
            const Token& lead = toks_[m.first];
            if (lead.is("return")) m.kind = StatementKind::return_stmt;
            else if (lead.is("break")) m.kind = StatementKind::break_stmt;
            else if (lead.is("continue")) m.kind = StatementKind::continue_stmt;
            else if (lead.is("throw")) m.kind = StatementKind::throw_stmt;
            else m.kind = StatementKind::expression;
            if (m.kind == StatementKind::expression) {
                std::size_t end = 0;
                if (detect_declarators(toks_, m.first, m.last, m.decls, m.skip, &end)) {
                    m.kind = StatementKind::declaration;
                }
            }
        }
        collect_flow(m, body_begin, m.last);
        return m;
    }

    bool in_opaque(const Micro& m, std::size_t i) const {
        for (const auto& [o, c] : m.opaque) {
            if (i > o && i < c) return true;
        }
        return false;
    }

    void collect_flow(Micro& m, std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i) {
            const Token& u = toks_[i];
            if (u.kind != TokenKind::keyword || in_opaque(m, i)) continue;
            if (u.text == "return") {
                m.has_return = true;
            } else if (u.text == "throw") {
                m.throw_trys.push_back(-1);
            } else if (u.text == "break" || u.text == "continue") {
                Micro::Jump j{u.text == "break", {}, -1};
                if (i + 1 < to && toks_[i + 1].is_identifier()) {
                    j.label = toks_[i + 1].text;
                    m.skip.insert(i + 1);
                }
                // A brace-less loop in the same statement captures unlabelled jumps.
                if (j.label.empty() && m.chain_has_loop) continue;
                m.jumps.push_back(std::move(j));
            }
        }
    }

    const std::vector<Token>& toks_;
    std::size_t pos_;
};

struct ScopeFrame {
    std::unordered_map<std::string, int> names;
};

class Resolver {
public:
    Resolver(const std::vector<Token>& toks, std::vector<Micro>& micros, LongMethod& method)
        : toks_(toks), micros_(micros), method_(method) {}

    void run() {
        for (const auto& p : method_.parameters) {
            Variable v;
            v.name = p.name;
            v.kind = VariableKind::parameter;
            v.type_text = p.type_text;
            v.scope_end = static_cast<int>(method_.statements.size()) - 1;
            params_[p.name] = add_variable(std::move(v));
        }
        for (auto& m : micros_) {
            collect_header_decls(m);
            for (const auto& d : m.decls) declared_anywhere_.insert(toks_[d.name].text);
        }

        scopes_.emplace_back();
        for (std::size_t mi = 0; mi < micros_.size(); ++mi) {
            Micro& m = micros_[mi];
            if (m.closer) {
                pop_scope(m.stmt);
                continue;
            }
            const bool braceless_header = !m.opener && !m.groups.empty();
            if (m.opener || braceless_header) scopes_.emplace_back();
            process(m);
            if (braceless_header) pop_scope(m.stmt);
        }
        while (!scopes_.empty()) pop_scope(static_cast<int>(method_.statements.size()) - 1);
    }

private:
    int add_variable(Variable v) {
        method_.variables.push_back(std::move(v));
        return static_cast<int>(method_.variables.size()) - 1;
    }

    void pop_scope(int stmt) {
        for (const auto& [name, id] : scopes_.back().names) {
            method_.variables[static_cast<std::size_t>(id)].scope_end = stmt;
        }
        scopes_.pop_back();
    }

    void collect_header_decls(Micro& m) {
        for (const auto& g : m.groups) {
            if (g.keyword == Header::for_) {
                detect_declarators(toks_, g.open + 1, g.close, m.decls, m.skip);
            } else if (g.keyword == Header::catch_) {
                std::size_t name = g.close;
                while (name > g.open + 1 && !toks_[name - 1].is_identifier()) --name;
                if (name > g.open + 1) {
                    --name;
                    std::size_t type_begin = g.open + 1;
                    while (type_begin < name && toks_[type_begin].is("final")) ++type_begin;
                    for (std::size_t k = type_begin; k < name; ++k) m.skip.insert(k);
                    m.decls.push_back({name, join_tokens(toks_, type_begin, name)});
                }
            } else if (g.keyword == Header::try_) {
                std::size_t p = g.open + 1;
                while (p < g.close) {
                    std::size_t end = p;
                    if (!detect_declarators(toks_, p, g.close, m.decls, m.skip, &end)) {
                        end = skip_initializer(toks_, p, g.close);
                    }
                    p = end + 1;
                }
            }
        }
    }

    int resolve(const std::string& name) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->names.find(name);
            if (found != it->names.end()) return found->second;
        }
        if (auto found = params_.find(name); found != params_.end()) return found->second;
        const bool local_name = declared_anywhere_.count(name) > 0;
        auto& bucket = local_name ? unresolved_ : externals_;
        if (auto found = bucket.find(name); found != bucket.end()) return found->second;
        Variable v;
        v.name = name;
        v.kind = local_name ? VariableKind::unresolved : VariableKind::external;
        v.scope_end = static_cast<int>(method_.statements.size()) - 1;
        const int id = add_variable(std::move(v));
        bucket[name] = id;
        return id;
    }

    // Identifier positions in [from, to) that name lambda parameters or
    // declarations local to lambda / anonymous-class bodies.
    std::unordered_set<std::size_t> lambda_locals(const Micro& m) {
        std::unordered_set<std::size_t> hidden;
        std::vector<std::pair<std::string, std::size_t>> names;  // name, visible from
        for (std::size_t i = m.first; i < m.last; ++i) {
            if (!toks_[i].is("->")) continue;
            if (i > m.first && toks_[i - 1].is_identifier()) {
                names.emplace_back(toks_[i - 1].text, i - 1);
            } else if (i > m.first && toks_[i - 1].is(")")) {
                std::size_t k = i - 1;
                int depth = 0;
                for (; k > m.first; --k) {
                    if (toks_[k].is(")")) ++depth;
                    if (toks_[k].is("(") && --depth == 0) break;
                }
                for (std::size_t q = k + 1; q + 1 < i; ++q) {
                    if (toks_[q].is_identifier() && (toks_[q + 1].is(",") || toks_[q + 1].is(")"))) {
                        names.emplace_back(toks_[q].text, k);
                    }
                }
            }
        }
        for (const auto& [open, close] : m.opaque) {
            for (std::size_t i = open + 1; i < close; ++i) {
                if (toks_[i - 1].is("{") || toks_[i - 1].is(";") || toks_[i - 1].is("}") || toks_[i - 1].is("(")) {
                    std::vector<Declarator> inner;
                    std::unordered_set<std::size_t> dummy;
                    if (detect_declarators(toks_, i, close, inner, dummy)) {
                        for (const auto& d : inner) names.emplace_back(toks_[d.name].text, open);
                        for (std::size_t k : dummy) hidden.insert(k);
                    }
                }
            }
        }
        for (const auto& [name, from] : names) {
            for (std::size_t i = from; i < m.last; ++i) {
                if (toks_[i].is_identifier() && toks_[i].text == name) hidden.insert(i);
            }
        }
        return hidden;
    }

    bool in_opaque(const Micro& m, std::size_t i) const {
        for (const auto& [o, c] : m.opaque) {
            if (i > o && i < c) return true;
        }
        return false;
    }

    void record(int stmt, int var, bool def, bool use) {
        method_.accesses.push_back({stmt, var, def, use});
    }

    void process(Micro& m) {
        std::unordered_map<std::size_t, const Declarator*> decl_at;
        for (const auto& d : m.decls) decl_at[d.name] = &d;
        const auto hidden = lambda_locals(m);

        // Type names after `new` and `instanceof`, and annotation names.
        std::unordered_set<std::size_t> skip = m.skip;
        for (std::size_t i = m.first; i < m.last; ++i) {
            if (toks_[i].is("new") || toks_[i].is("instanceof")) {
                std::size_t q = i + 1;
                while (q < m.last && (toks_[q].is_identifier() || toks_[q].is(".") || toks_[q].is("<") ||
                                      toks_[q].is(">") || toks_[q].is(",") || toks_[q].is("?"))) {
                    if (toks_[q].is_identifier()) {
                        // `x instanceof Foo f` binds f; keep it as a declaration.
                        if (toks_[i].is("instanceof") && q > i + 1 && toks_[q - 1].is_identifier()) break;
                        skip.insert(q);
                    }
                    ++q;
                }
                if (toks_[i].is("instanceof") && q < m.last && toks_[q].is_identifier()) {
                    m.decls.push_back({q, join_tokens(toks_, i + 1, q)});
                    decl_at[q] = &m.decls.back();
                    declared_anywhere_.insert(toks_[q].text);
                }
            } else if (toks_[i].is("@") && i + 1 < m.last) {
                skip.insert(i + 1);
            }
        }

        for (std::size_t i = m.first; i < m.last; ++i) {
            const Token& t = toks_[i];
            if (!t.is_identifier() || skip.count(i) || hidden.count(i)) continue;
            const Token* prev = i > 0 ? &toks_[i - 1] : nullptr;
            const Token* next = i + 1 < toks_.size() ? &toks_[i + 1] : nullptr;
            if (prev && (prev->is(".") || prev->is("::") || prev->is("@"))) continue;
            if (next && next->is("(") && !decl_at.count(i)) continue;

            if (auto d = decl_at.find(i); d != decl_at.end()) {
                Variable v;
                v.name = t.text;
                v.kind = VariableKind::local;
                v.decl_statement = m.stmt;
                v.type_text = d->second->type_text;
                v.header_declared = !m.groups.empty();
                const int id = add_variable(std::move(v));
                scopes_.back().names[t.text] = id;
                record(m.stmt, id, true, false);
                continue;
            }

            const int id = resolve(t.text);
            if (in_opaque(m, i)) {
                record(m.stmt, id, false, true);
                continue;
            }
            const bool assign = next && next->is("=");
            const bool compound = (next && (is_compound_assign(next->text) || next->is("++") || next->is("--"))) ||
                                  (prev && (prev->is("++") || prev->is("--")));
            if (assign) {
                record(m.stmt, id, true, false);
            } else if (compound) {
                record(m.stmt, id, false, true);
                record(m.stmt, id, true, false);
            } else {
                record(m.stmt, id, false, true);
            }
        }
    }

    const std::vector<Token>& toks_;
    std::vector<Micro>& micros_;
    LongMethod& method_;
    std::vector<ScopeFrame> scopes_;
    std::unordered_map<std::string, int> params_;
    std::unordered_map<std::string, int> externals_;
    std::unordered_map<std::string, int> unresolved_;
    std::unordered_set<std::string> declared_anywhere_;
};

std::string leading_ws(const std::string& line) {
    const auto n = line.find_first_not_of(" \t");
    return n == std::string::npos ? line : line.substr(0, n);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void parse_signature(const std::vector<Token>& toks, std::size_t open_brace, LongMethod& m) {
    std::size_t paren = open_brace;
    int angle = 0;
    for (std::size_t i = 0; i < open_brace; ++i) {
        if (toks[i].is("<")) ++angle;
        if (toks[i].is(">")) --angle;
        if (angle == 0 && toks[i].is("(")) {
            paren = i;
            break;
        }
    }
    if (paren == open_brace || paren == 0) return;
    m.name = toks[paren - 1].text;
    const std::size_t close = match_close(toks, paren, open_brace);

    std::size_t p = 0;
    while (p < paren - 1) {
        const Token& t = toks[p];
        if (t.is("@")) {
            p = skip_annotation(toks, p, paren - 1);
        } else if (t.is("public") || t.is("protected") || t.is("private") || t.is("abstract") || t.is("final") ||
                   t.is("synchronized") || t.is("native") || t.is("strictfp") || t.is("default")) {
            ++p;
        } else if (t.is("static")) {
            m.is_static = true;
            ++p;
        } else if (t.is("<")) {
            int depth = 0;
            for (; p < paren - 1; ++p) {
                if (toks[p].is("<")) ++depth;
                if (toks[p].is(">") && --depth == 0) {
                    ++p;
                    break;
                }
            }
        } else {
            break;
        }
    }
    m.return_type = join_tokens(toks, p, paren - 1);

    // Parameters, split on top-level commas.
    std::size_t start = paren + 1;
    int depth = 0;
    for (std::size_t i = paren + 1; i <= close && close < open_brace; ++i) {
        const Token& t = toks[i];
        if (t.is("(") || t.is("<") || t.is("[")) ++depth;
        if ((t.is(")") && i != close) || t.is(">") || t.is("]")) --depth;
        if ((t.is(",") && depth == 0) || i == close) {
            std::size_t name = i;
            while (name > start && !toks[name - 1].is_identifier()) --name;
            if (name > start) {
                --name;
                std::size_t type_begin = start;
                while (type_begin < name && (toks[type_begin].is("final") || toks[type_begin].is("@"))) {
                    type_begin = toks[type_begin].is("@") ? skip_annotation(toks, type_begin, name) : type_begin + 1;
                }
                m.parameters.push_back({join_tokens(toks, type_begin, name), toks[name].text});
            }
            start = i + 1;
        }
    }
    if (close + 1 < open_brace && toks[close + 1].is("throws")) {
        m.throws_clause = join_tokens(toks, close + 2, open_brace);
    }
}

std::optional<std::string> doc_comment_above(const std::vector<std::string>& file_lines, int start_line) {
    int l = start_line - 2;  // 0-based index of the line above
    while (l >= 0) {
        const std::string t = trim(file_lines[static_cast<std::size_t>(l)]);
        if (t.empty() || t[0] == '@') {
            --l;
            continue;
        }
        break;
    }
    if (l < 0) return std::nullopt;
    const std::string last = trim(file_lines[static_cast<std::size_t>(l)]);
    if (last.size() < 2 || last.compare(last.size() - 2, 2, "*/") != 0) return std::nullopt;
    int first = l;
    while (first >= 0 && file_lines[static_cast<std::size_t>(first)].find("/*") == std::string::npos) --first;
    if (first < 0 || file_lines[static_cast<std::size_t>(first)].find("/**") == std::string::npos) {
        return std::nullopt;
    }
    std::string doc;
    for (int k = first; k <= l; ++k) {
        if (!doc.empty()) doc += '\n';
        doc += trim(file_lines[static_cast<std::size_t>(k)]);
    }
    return doc;
}

}  // namespace

std::string LongMethod::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::size_t LongMethod::countable_statements() const {
    return static_cast<std::size_t>(
        std::count_if(statements.begin(), statements.end(), [](const Statement& s) { return s.countable(); }));
}

std::optional<std::pair<int, int>> LongMethod::statement_span(LineRange range) const {
    int first = -1;
    int last = -1;
    for (const auto& s : statements) {
        if (s.end_line >= range.start && first < 0) first = static_cast<int>(s.index);
        if (s.start_line <= range.end) last = static_cast<int>(s.index);
    }
    if (first < 0 || last < first) return std::nullopt;
    return std::make_pair(first, last);
}

int LongMethod::statement_at(int line) const {
    for (const auto& s : statements) {
        if (line >= s.start_line && line <= s.end_line) return static_cast<int>(s.index);
    }
    return -1;
}

const DefUseChain* DefUseChains::find(std::string_view name, int decl_statement) const {
    for (const auto& c : chains) {
        if (c.name == name && c.decl_statement == decl_statement) return &c;
    }
    return nullptr;
}

const DefUseChain* DefUseChains::find(std::string_view name) const {
    for (const auto& c : chains) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

LongMethod parse_method(std::string_view source, LineRange range, std::filesystem::path file_path) {
    const auto file_lines = split_lines(source);
    if (range.start < 1 || range.end > static_cast<int>(file_lines.size()) || range.start > range.end) {
        throw Error(Errc::invalid_range, "method range " + std::to_string(range.start) + "-" +
                                             std::to_string(range.end) + " is outside the file");
    }

    LongMethod m;
    m.file_path = std::move(file_path);
    m.start_line = range.start;
    m.end_line = range.end;
    std::string text;
    for (int l = range.start; l <= range.end; ++l) {
        m.lines.push_back(file_lines[static_cast<std::size_t>(l - 1)]);
        text += m.lines.back();
        text += '\n';
    }
    m.indent = leading_ws(m.lines.front());
    m.doc_comment = doc_comment_above(file_lines, range.start);

    const auto toks = tokenize(text, range.start);
    std::size_t open = toks.size();
    int paren = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].is("(")) ++paren;
        if (toks[i].is(")")) --paren;
        if (paren == 0 && toks[i].is("{")) {
            open = i;
            break;
        }
    }
    if (open == toks.size()) throw Error(Errc::unbalanced_braces, "no opening brace for " + m.file_path.string());
    {
        const int brace_line = toks[open].line;
        std::string sig;
        for (int l = range.start; l <= brace_line; ++l) {
            if (!sig.empty()) sig += '\n';
            sig += m.lines[static_cast<std::size_t>(l - range.start)];
        }
        m.signature_text = trim(sig);
    }
    parse_signature(toks, open, m);

    std::vector<Micro> micros;
    const std::size_t close = BodyParser(toks, open + 1).run(micros);
    if (toks[close].line != range.end) {
        throw Error(Errc::unbalanced_braces, "method closes at line " + std::to_string(toks[close].line) +
                                                 ", expected " + std::to_string(range.end));
    }
    if (micros.empty()) throw Error(Errc::empty_body, "method at line " + std::to_string(range.start) + " has no statements");
    if (range.start == range.end) throw Error(Errc::invalid_range, "single-line method at " + std::to_string(range.start));

    // Group token-level statements into line-granular ones.
    for (std::size_t i = 0; i < micros.size(); ++i) {
        Micro& mc = micros[i];
        const int sl = toks[mc.first].line;
        const int el = toks[mc.last - 1].line;
        if (!m.statements.empty() && sl <= m.statements.back().end_line) {
            Statement& s = m.statements.back();
            s.end_line = std::max(s.end_line, el);
        } else {
            Statement s;
            s.index = m.statements.size();
            s.start_line = sl;
            s.end_line = el;
            m.statements.push_back(std::move(s));
        }
        mc.stmt = static_cast<int>(m.statements.size()) - 1;
    }

    std::vector<std::vector<int>> members(m.statements.size());
    for (std::size_t i = 0; i < micros.size(); ++i) members[static_cast<std::size_t>(micros[i].stmt)].push_back(static_cast<int>(i));
    auto stmt_of = [&](int micro) { return micro < 0 ? -1 : micros[static_cast<std::size_t>(micro)].stmt; };

    for (auto& s : m.statements) {
        const auto& mem = members[s.index];
        const Micro& first = micros[static_cast<std::size_t>(mem.front())];
        const Micro& last = micros[static_cast<std::size_t>(mem.back())];
        s.depth_before = first.depth_before;
        s.depth_after = last.depth_after;
        s.scope_depth = s.depth_before;
        const Micro* lead = nullptr;
        bool all_decl = true;
        for (int id : mem) {
            const Micro& mc = micros[static_cast<std::size_t>(id)];
            s.scope_depth = std::min({s.scope_depth, mc.depth_before, mc.depth_after});
            if (!mc.closer && !lead) lead = &mc;
            if (!mc.closer && mc.kind != StatementKind::declaration) all_decl = false;
            s.has_return = s.has_return || mc.has_return;
            for (const auto& j : mc.jumps) s.jump_targets.push_back(stmt_of(j.target));
            for (int t : mc.throw_trys) {
                if (t >= 0) s.throw_trys.push_back(stmt_of(t));
            }
        }
        s.kind = lead ? (all_decl ? StatementKind::declaration
                                  : (lead->kind == StatementKind::declaration ? StatementKind::expression : lead->kind))
                      : StatementKind::block_close;
        s.parent = stmt_of(first.parent);
        s.continuation = lead && lead->continuation;
        for (int l : first.loops) {
            const int st = stmt_of(l);
            if (st != static_cast<int>(s.index) &&
                std::find(s.enclosing_loops.begin(), s.enclosing_loops.end(), st) == s.enclosing_loops.end()) {
                s.enclosing_loops.push_back(st);
            }
        }
        if (last.opener) {
            s.block_end = stmt_of(last.match);
            s.loop_header = last.loop;
            if (lead == &last && last.head == Header::if_) {
                s.if_header = true;
                const std::size_t after = static_cast<std::size_t>(last.match) + 1;
                s.has_else = after < micros.size() && micros[after].head == Header::else_;
            }
        }
    }

    m.body_first_line = toks[open].line + 1;
    m.body_last_line = range.end - 1;
    if (m.statements.front().start_line < m.body_first_line) m.body_first_line = m.statements.front().start_line;
    if (m.statements.back().end_line > m.body_last_line) m.body_last_line = m.statements.back().end_line;
    m.body_indent = leading_ws(m.line_text(m.statements.front().start_line));

    Resolver(toks, micros, m).run();
    std::stable_sort(m.accesses.begin(), m.accesses.end(),
                     [](const Access& a, const Access& b) { return a.statement < b.statement; });

    // Declarations carry exactly their declared names; compound declarations
    // that also assign something else were demoted to expression above.
    for (const auto& a : m.accesses) {
        Statement& s = m.statements[static_cast<std::size_t>(a.statement)];
        const std::string& name = m.variables[static_cast<std::size_t>(a.variable)].name;
        if (a.def) s.defs.insert(name);
        if (a.use) s.uses.insert(name);
    }
    for (auto& s : m.statements) {
        if (s.kind != StatementKind::declaration) continue;
        for (const auto& a : m.accesses) {
            if (a.statement != static_cast<int>(s.index) || !a.def) continue;
            const auto& v = m.variables[static_cast<std::size_t>(a.variable)];
            if (v.decl_statement != static_cast<int>(s.index)) {
                s.kind = StatementKind::expression;
                break;
            }
        }
    }
    return m;
}

DefUseChains def_use(const LongMethod& method) {
    DefUseChains out;
    std::map<int, std::size_t> chain_of;
    for (std::size_t v = 0; v < method.variables.size(); ++v) {
        const auto& var = method.variables[v];
        chain_of[static_cast<int>(v)] = out.chains.size();
        out.chains.push_back({var.name, var.decl_statement,
                              var.kind == VariableKind::external || var.kind == VariableKind::parameter ||
                                  var.kind == VariableKind::unresolved,
                              {}});
    }
    for (const auto& a : method.accesses) {
        auto& events = out.chains[chain_of[a.variable]].events;
        auto push = [&](bool def) {
            if (!events.empty() && events.back().statement == a.statement && events.back().def == def) return;
            events.push_back({a.statement, def});
        };
        if (a.use) push(false);
        if (a.def) push(true);
    }
    return out;
}

namespace {

bool tracked(const Variable& v) { return v.kind == VariableKind::local || v.kind == VariableKind::parameter; }

}  // namespace

std::set<std::string> live_out(const LongMethod& method, LineRange fragment) {
    std::set<std::string> out;
    const auto span = method.statement_span(fragment);
    if (!span) return out;
    const auto [a, b] = *span;

    // Uses inside an enclosing loop but before the fragment run again after it.
    int carried_from = a;
    for (int loop : method.statements[static_cast<std::size_t>(a)].enclosing_loops) {
        const int end = method.statements[static_cast<std::size_t>(loop)].block_end;
        if (end >= b) carried_from = std::min(carried_from, loop);
    }

    std::vector<char> defined(method.variables.size(), 0);
    std::vector<char> used_later(method.variables.size(), 0);
    for (const auto& acc : method.accesses) {
        const bool inside = acc.statement >= a && acc.statement <= b;
        if (inside && acc.def) defined[static_cast<std::size_t>(acc.variable)] = 1;
        if (!inside && acc.use && (acc.statement > b || acc.statement >= carried_from)) {
            used_later[static_cast<std::size_t>(acc.variable)] = 1;
        }
    }
    for (std::size_t v = 0; v < method.variables.size(); ++v) {
        if (defined[v] && used_later[v] && tracked(method.variables[v])) out.insert(method.variables[v].name);
    }
    return out;
}

std::set<std::string> live_in(const LongMethod& method, LineRange fragment) {
    std::set<std::string> out;
    const auto span = method.statement_span(fragment);
    if (!span) return out;
    const auto [a, b] = *span;
    for (const auto& acc : method.accesses) {
        if (acc.statement < a || acc.statement > b || !acc.use) continue;
        const auto& v = method.variables[static_cast<std::size_t>(acc.variable)];
        if (v.kind == VariableKind::parameter || (v.kind == VariableKind::local && v.decl_statement < a)) {
            out.insert(v.name);
        }
    }
    return out;
}

int scope_depth_at(const LongMethod& method, int line) {
    if (line < method.body_first_line || line > method.body_last_line) {
        throw Error(Errc::line_not_in_body, "line " + std::to_string(line) + " is outside the body of " + method.name);
    }
    for (const auto& s : method.statements) {
        if (line >= s.start_line && line <= s.end_line) return s.scope_depth;
        if (s.start_line > line) return s.depth_before;
    }
    return method.statements.back().depth_after;
}

std::vector<int> unresolved_accesses(const LongMethod& method) {
    std::vector<int> out;
    for (const auto& a : method.accesses) {
        if (method.variables[static_cast<std::size_t>(a.variable)].kind == VariableKind::unresolved &&
            std::find(out.begin(), out.end(), a.variable) == out.end()) {
            out.push_back(a.variable);
        }
    }
    return out;
}

namespace {

class MethodFinder {
public:
    explicit MethodFinder(const std::vector<Token>& toks) : toks_(toks) {}

    std::vector<MethodLocation> run() {
        level(0, true);
        return std::move(found_);
    }

private:
    bool declares_type(std::size_t from, std::size_t to) const {
        for (std::size_t i = from; i < to; ++i) {
            const Token& t = toks_[i];
            if (t.is("class") || t.is("interface") || t.is("enum")) return true;
            if (t.is_identifier() && t.text == "record" && i + 1 < to && toks_[i + 1].is_identifier()) return true;
        }
        return false;
    }

    // Returns the name token index if [from, to) is a method header.
    std::optional<std::size_t> method_header(std::size_t from, std::size_t to) const {
        std::size_t paren = to;
        int angle = 0;
        for (std::size_t i = from; i < to; ++i) {
            if (toks_[i].is("=")) return std::nullopt;
            if (toks_[i].is("<")) ++angle;
            if (toks_[i].is(">")) --angle;
            if (angle == 0 && toks_[i].is("(")) {
                paren = i;
                break;
            }
        }
        if (paren == to || paren == from || !toks_[paren - 1].is_identifier()) return std::nullopt;
        if (paren - 1 > from && toks_[paren - 2].is("new")) return std::nullopt;
        const std::size_t close = match_close(toks_, paren, to);
        if (close >= to) return std::nullopt;
        std::size_t p = close + 1;
        if (p < to) {
            if (!toks_[p].is("throws")) return std::nullopt;
            for (++p; p < to; ++p) {
                if (!(toks_[p].is_identifier() || toks_[p].is(",") || toks_[p].is("."))) return std::nullopt;
            }
        }
        return paren - 1;
    }

    std::size_t level(std::size_t i, bool type_body) {
        std::size_t member = i;
        while (i < toks_.size()) {
            const Token& t = toks_[i];
            if (t.is("}")) return i + 1;
            if (t.is(";")) {
                member = ++i;
                continue;
            }
            if (!t.is("{")) {
                ++i;
                continue;
            }
            if (declares_type(member, i)) {
                i = level(i + 1, true);
                member = i;
                continue;
            }
            const std::size_t close = match_close(toks_, i, toks_.size());
            if (type_body) {
                if (auto name = method_header(member, i)) {
                    std::size_t first = member;
                    while (first < *name && toks_[first].is("@")) first = skip_annotation(toks_, first, *name);
                    if (close < toks_.size()) {
                        found_.push_back({toks_[*name].text, toks_[first].line, toks_[close].line});
                    }
                    i = close + 1;
                    member = i;
                    continue;
                }
            }
            i = close + 1;
            // A brace group that ends a member (initializer block) starts a new one;
            // one inside an expression (`= {1, 2}`) runs on to its `;`.
            bool in_expression = false;
            for (std::size_t k = member; k < i; ++k) {
                if (toks_[k].is("=")) in_expression = true;
            }
            if (!in_expression) member = i;
        }
        return i;
    }

    const std::vector<Token>& toks_;
    std::vector<MethodLocation> found_;
};

}  // namespace

std::vector<MethodLocation> find_methods(std::string_view source) {
    const auto toks = tokenize(source);
    auto found = MethodFinder(toks).run();
    std::sort(found.begin(), found.end(),
              [](const MethodLocation& a, const MethodLocation& b) { return a.start_line < b.start_line; });
    return found;
}

std::optional<MethodLocation> locate_method(std::string_view source, int line) {
    std::optional<MethodLocation> best;
    for (const auto& m : find_methods(source)) {
        if (line < m.start_line || line > m.end_line) continue;
        if (!best || m.end_line - m.start_line < best->end_line - best->start_line) best = m;
    }
    return best;
}

std::optional<MethodLocation> locate_method(std::string_view source, std::string_view name) {
    for (const auto& m : find_methods(source)) {
        if (m.name == name) return m;
    }
    return std::nullopt;
}

}  // namespace xmethod
