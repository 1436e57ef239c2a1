#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xmethod/error.hpp"

namespace xmethod {

/// Inclusive 1-based line span, absolute in the source file.
struct LineRange {
    int start = 0;
    int end = 0;

    int line_count() const { return end - start + 1; }
    bool contains(int line) const { return line >= start && line <= end; }
    bool contains(const LineRange& other) const { return other.start >= start && other.end <= end; }
    friend bool operator==(const LineRange&, const LineRange&) = default;
    friend auto operator<=>(const LineRange&, const LineRange&) = default;
};

enum class StatementKind {
    declaration,
    expression,
    control_header,
    block_close,
    return_stmt,
    break_stmt,
    continue_stmt,
    throw_stmt,
    try_boundary,
};

std::string_view to_string(StatementKind kind) noexcept;

/// One source-line-granular statement of a method body. Several Java
/// statements sharing a line (`} else {`, `a(); b();`) form one Statement, so
/// every non-blank body line belongs to exactly one Statement.
struct Statement {
    std::size_t index = 0;
    int start_line = 0;
    int end_line = 0;
    int scope_depth = 0;   // minimum brace nesting reached on the statement
    int depth_before = 0;  // nesting before its first token
    int depth_after = 0;   // nesting after its last token
    StatementKind kind = StatementKind::expression;
    std::set<std::string> defs;
    std::set<std::string> uses;

    int parent = -1;     // statement whose block holds this one, -1 for the body
    int block_end = -1;  // for block openers: statement holding the matching `}`
    bool continuation = false;  // begins with else / catch / finally / do-while tail
    bool loop_header = false;
    bool if_header = false;  // plain `if (...) {` opening a braced then-block
    bool has_else = false;   // for if headers: an else branch follows the then-block

    bool has_return = false;
    std::vector<int> jump_targets;  // break/continue targets; -1 when unresolvable
    std::vector<int> throw_trys;    // enclosing try statement for each caught throw
    std::vector<int> enclosing_loops;

    LineRange lines() const { return {start_line, end_line}; }
    bool countable() const { return kind != StatementKind::block_close; }
};

enum class VariableKind { local, parameter, external, unresolved };

struct Variable {
    std::string name;
    VariableKind kind = VariableKind::external;
    int decl_statement = -1;  // -1 for parameters and externals
    int scope_end = -1;       // last statement where the declaration is visible
    std::string type_text;    // as written at the declaration, empty for externals
    bool header_declared = false;  // for/catch/try-resource variable
};

struct Access {
    int statement = 0;
    int variable = 0;
    bool def = false;
    bool use = false;
};

struct Parameter {
    std::string type_text;
    std::string name;
};

/// A parsed host method. Immutable once returned from parse_method.
struct LongMethod {
    std::filesystem::path file_path;
    int start_line = 0;  // signature line
    int end_line = 0;    // line of the closing brace
    std::string signature_text;
    std::optional<std::string> doc_comment;
    std::vector<Statement> statements;

    std::string name;
    std::string return_type;  // empty for constructors
    std::string throws_clause;
    bool is_static = false;
    std::vector<Parameter> parameters;
    std::string indent;       // leading whitespace of the signature line
    std::string body_indent;  // leading whitespace of the first body statement

    std::vector<std::string> lines;  // source lines start_line..end_line
    int body_first_line = 0;         // first line after the opening brace line
    int body_last_line = 0;          // line before the closing brace line

    std::vector<Variable> variables;
    std::vector<Access> accesses;  // sorted by statement

    int length() const { return end_line - start_line; }
    const std::string& line_text(int line) const { return lines.at(static_cast<std::size_t>(line - start_line)); }
    std::string text() const;
    std::size_t countable_statements() const;

    /// Statement indices [first, last] touched by `range`, or nullopt when the
    /// range covers no statement.
    std::optional<std::pair<int, int>> statement_span(LineRange range) const;
    int statement_at(int line) const;  // -1 when no statement covers the line
    LineRange body() const { return {body_first_line, body_last_line}; }
};

struct DefUseEvent {
    int statement = 0;
    bool def = false;  // false: use. Compound assignments emit a use then a def.
};

struct DefUseChain {
    std::string name;
    int decl_statement = -1;
    bool external = false;
    std::vector<DefUseEvent> events;
};

struct DefUseChains {
    std::vector<DefUseChain> chains;

    const DefUseChain* find(std::string_view name, int decl_statement) const;
    /// First chain with this name; shadowed names have several.
    const DefUseChain* find(std::string_view name) const;
};

struct MethodLocation {
    std::string name;
    int start_line = 0;
    int end_line = 0;
};

/// Parses the method spanning `range` within `source`. Throws Error with
/// unbalanced_braces, empty_body or invalid_range.
LongMethod parse_method(std::string_view source, LineRange range, std::filesystem::path file_path = {});

DefUseChains def_use(const LongMethod& method);

/// Locals and parameters defined inside `fragment` and used after it, where
/// uses inside an enclosing loop also count as "after" (back edge).
std::set<std::string> live_out(const LongMethod& method, LineRange fragment);

/// Locals and parameters declared outside `fragment` and read inside it.
std::set<std::string> live_in(const LongMethod& method, LineRange fragment);

/// Depth of the statement covering `line`. Blank and comment lines report the
/// nesting at that point. Throws Error(line_not_in_body) outside the body.
int scope_depth_at(const LongMethod& method, int line);

/// Top-level and nested-type methods with bodies, in source order.
std::vector<MethodLocation> find_methods(std::string_view source);

/// The method whose span contains `line`, innermost first.
std::optional<MethodLocation> locate_method(std::string_view source, int line);
std::optional<MethodLocation> locate_method(std::string_view source, std::string_view name);

/// Variable indices whose resolution failed (name declared in the method but
/// not visible at the access).
std::vector<int> unresolved_accesses(const LongMethod& method);

}  // namespace xmethod
