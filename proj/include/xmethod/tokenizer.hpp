#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xmethod {

enum class TokenKind { identifier, keyword, number, literal, op };

struct Token {
    TokenKind kind;
    std::string text;
    int line;  // 1-based, absolute in the file

    bool is(std::string_view s) const { return text == s && kind != TokenKind::literal; }
    bool is_identifier() const { return kind == TokenKind::identifier; }
};

/// Lexes Java-like source. Comments vanish and string, char and text-block
/// literals collapse to a single `literal` token, so identifier scanning never
/// sees their contents. Line numbers are preserved; `first_line` is the
/// number assigned to the first line of `source`.
std::vector<Token> tokenize(std::string_view source, int first_line = 1);

bool is_keyword(std::string_view word) noexcept;
bool is_primitive_type(std::string_view word) noexcept;

/// Joins tokens with Java-ish spacing (`Map<String, List<Integer>>`, `int[]`).
std::string join_tokens(const std::vector<Token>& tokens, std::size_t first, std::size_t last);

/// Splits text into lines without the terminators. A trailing newline does not
/// produce an extra empty line.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace xmethod
