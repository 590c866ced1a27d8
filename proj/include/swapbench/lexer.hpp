#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace swapbench {

enum class TokenKind {
    Identifier,
    Keyword,
    Number,
    CharLiteral,
    StringLiteral,
    Punctuator,
    Unknown,  // unlexable byte, counted as one token
};

struct Token {
    TokenKind kind = TokenKind::Unknown;
    size_t begin = 0;  // byte offset, inclusive
    size_t end = 0;    // byte offset, exclusive
    int line = 1;      // 1-based line of the first byte
    bool in_directive = false;

    std::string_view text(std::string_view source) const {
        return source.substr(begin, end - begin);
    }
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<std::string> warnings;
};

// Lexes C/C++ source into tokens. Comments and whitespace produce no tokens.
// Tokens on preprocessor directive lines (including backslash continuations)
// carry in_directive = true. Unlexable bytes become one Unknown token each
// and add a warning.
LexResult lex(std::string_view source);

// Number of lexical tokens in source_text; comments and whitespace count zero.
size_t count_tokens(std::string_view source_text);

bool is_cpp_keyword(std::string_view word);

}  // namespace swapbench
