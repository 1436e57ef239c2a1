#include "xmethod/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace xmethod {

namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",      "case",    "catch",
    "char",     "class",      "const",     "continue",   "default",   "do",      "double",
    "else",     "enum",       "extends",   "final",      "finally",   "float",   "for",
    "goto",     "if",         "implements", "import",    "instanceof", "int",    "interface",
    "long",     "native",     "new",       "package",    "private",   "protected", "public",
    "return",   "short",      "static",    "strictfp",   "super",     "switch",  "synchronized",
    "this",     "throw",      "throws",    "transient",  "try",       "void",    "volatile",
    "while",    "true",       "false",     "null",
};

constexpr std::array<std::string_view, 8> kPrimitives = {
    "boolean", "byte", "char", "double", "float", "int", "long", "short",
};

// Longest first. `>>` and `>>>` are deliberately absent so that nested
// generic closers stay separate tokens; their compound forms are kept.
constexpr std::array<std::string_view, 30> kOperators = {
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=",   "*=",  "/=",  "%=",  "&=", "|=", "^=", "<<", "{",  "}",  "(",  ")",  "[",  "]",  ";",
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool ident_part(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

bool is_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_primitive_type(std::string_view word) noexcept {
    return std::find(kPrimitives.begin(), kPrimitives.end(), word) != kPrimitives.end();
}

std::vector<Token> tokenize(std::string_view src, int first_line) {
    std::vector<Token> out;
    int line = first_line;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto count_lines = [&](std::size_t from, std::size_t to) {
        line += static_cast<int>(std::count(src.begin() + from, src.begin() + to, '\n'));
    };

    while (i < n) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const std::size_t close = src.find("*/", i + 2);
            const std::size_t end = close == std::string_view::npos ? n : close + 2;
            count_lines(i, end);
            i = end;
            continue;
        }
        if (c == '"' && src.substr(i, 3) == "\"\"\"") {
            const int start_line = line;
            const std::size_t close = src.find("\"\"\"", i + 3);
            const std::size_t end = close == std::string_view::npos ? n : close + 3;
            count_lines(i, end);
            out.push_back({TokenKind::literal, "\"\"\"", start_line});
            i = end;
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < n && src[j] != c && src[j] != '\n') {
                j += src[j] == '\\' ? 2 : 1;
            }
            out.push_back({TokenKind::literal, std::string(1, c) + c, line});
            i = std::min(n, j + 1);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < n && ident_part(src[j])) ++j;
            std::string word(src.substr(i, j - i));
            const TokenKind kind = is_keyword(word) ? TokenKind::keyword : TokenKind::identifier;
            out.push_back({kind, std::move(word), line});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < n) {
                const char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    ++j;
                } else if ((d == '+' || d == '-') && (src[j - 1] == 'e' || src[j - 1] == 'E' ||
                                                      src[j - 1] == 'p' || src[j - 1] == 'P')) {
                    ++j;
                } else {
                    break;
                }
            }
            out.push_back({TokenKind::number, std::string(src.substr(i, j - i)), line});
            i = j;
            continue;
        }
        bool matched = false;
        for (std::string_view op : kOperators) {
            if (src.substr(i, op.size()) == op) {
                out.push_back({TokenKind::op, std::string(op), line});
                i += op.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back({TokenKind::op, std::string(1, c), line});
            ++i;
        }
    }
    return out;
}

std::string join_tokens(const std::vector<Token>& tokens, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last && i < tokens.size(); ++i) {
        const std::string& t = tokens[i].text;
        if (!out.empty()) {
            const std::string& prev = tokens[i - 1].text;
            const bool tight = t == "." || t == "<" || t == ">" || t == "[" || t == "]" || t == "," ||
                               t == "..." || t == ")" || prev == "." || prev == "<" || prev == "[" ||
                               prev == "(" || prev == "@" || t == "(";
            if (!tight || prev == ",") out += ' ';
        }
        out += t;
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line(text.substr(start, nl - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = nl + 1;
    }
    return lines;
}

}  // namespace xmethod
