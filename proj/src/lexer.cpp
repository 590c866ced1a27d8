#include "swapbench/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace swapbench {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_continue(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool digit(char c) { return c >= '0' && c <= '9'; }

// Multi-character punctuators, longest first (maximal munch). Covers C and
// the C++ operators that show up in mixed trees.
const std::array<std::string_view, 36> kPunct3plus = {
    "<<=", ">>=", "...", "->*", "<=>",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=", "::", "##",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!",
};

const std::string_view kSinglePunct = "{}[]()<>;:,.?=#@\\";

}  // namespace

bool is_cpp_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kKeywords = {
        // C
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if",
        "inline", "int", "long", "register", "restrict", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
        "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
        "_Atomic", "_Noreturn", "_Static_assert", "_Thread_local",
        "_Alignas", "_Alignof", "_Generic",
        // C++
        "alignas", "alignof", "bool", "catch", "class", "concept", "consteval",
        "constexpr", "constinit", "co_await", "co_return", "co_yield",
        "decltype", "delete", "dynamic_cast", "explicit", "export", "false",
        "friend", "mutable", "namespace", "new", "noexcept", "nullptr",
        "operator", "private", "protected", "public", "reinterpret_cast",
        "requires", "static_assert", "static_cast", "template", "this",
        "thread_local", "throw", "true", "try", "typeid", "typename", "using",
        "virtual", "wchar_t",
    };
    return kKeywords.count(word) > 0;
}

LexResult lex(std::string_view src) {
    LexResult out;
    size_t i = 0;
    int line = 1;
    bool in_directive = false;   // inside a # line (with continuations)
    bool line_has_token = false; // any token emitted on the current logical line

    auto advance_newline = [&](size_t pos) {
        // caller guarantees src[pos] == '\n'
        (void)pos;
        ++line;
        if (in_directive)
            in_directive = false;
        line_has_token = false;
    };

    while (i < src.size()) {
        char c = src[i];

        if (c == '\n') {
            advance_newline(i);
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++i;
            continue;
        }

        // Line continuation keeps directive state across the newline.
        if (c == '\\' && i + 1 < src.size() &&
            (src[i + 1] == '\n' || (src[i + 1] == '\r' && i + 2 < src.size() && src[i + 2] == '\n'))) {
            size_t nl = (src[i + 1] == '\n') ? i + 1 : i + 2;
            ++line;
            line_has_token = false;
            i = nl + 1;
            continue;
        }

        // Comments.
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            i += 2;
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
                    ++line;
                    i += 2;
                    continue;
                }
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            size_t start_line = static_cast<size_t>(line);
            i += 2;
            bool closed = false;
            while (i < src.size()) {
                if (src[i] == '\n')
                    ++line;
                if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/') {
                    i += 2;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed)
                out.warnings.push_back("unterminated block comment starting at line " +
                                       std::to_string(start_line));
            continue;
        }

        Token tok;
        tok.begin = i;
        tok.line = line;

        // Directive start: '#' as the first token of a line.
        if (c == '#' && !line_has_token)
            in_directive = true;
        tok.in_directive = in_directive;

        // String/char literals, with encoding prefixes and raw strings.
        size_t lit = i;
        bool raw = false;
        if (c == 'L' || c == 'u' || c == 'U' || c == 'R') {
            size_t p = i;
            if (src[p] == 'u' && p + 1 < src.size() && src[p + 1] == '8')
                ++p;
            if (p + 1 < src.size() && (src[p + 1] == '"' || src[p + 1] == '\'')) {
                lit = p + 1;
            } else if (p + 1 < src.size() && src[p + 1] == 'R' && p + 2 < src.size() &&
                       src[p + 2] == '"') {
                lit = p + 2;
                raw = true;
            } else if (src[p] == 'R' && p + 1 < src.size() && src[p + 1] == '"') {
                lit = p + 1;
                raw = true;
            } else {
                lit = i;  // plain identifier
            }
        }
        if (src[lit] == '"' || src[lit] == '\'') {
            char quote = src[lit];
            size_t j = lit + 1;
            if (raw) {
                // R"delim( ... )delim"
                std::string delim;
                while (j < src.size() && src[j] != '(')
                    delim.push_back(src[j++]);
                std::string closer = ")" + delim + "\"";
                size_t end = src.find(closer, j);
                if (end == std::string_view::npos) {
                    out.warnings.push_back("unterminated raw string at line " +
                                           std::to_string(line));
                    j = src.size();
                } else {
                    j = end + closer.size();
                }
            } else {
                bool closed = false;
                while (j < src.size()) {
                    if (src[j] == '\\' && j + 1 < src.size()) {
                        j += 2;
                        continue;
                    }
                    if (src[j] == '\n')
                        break;  // unterminated on this line
                    if (src[j] == quote) {
                        ++j;
                        closed = true;
                        break;
                    }
                    ++j;
                }
                if (!closed)
                    out.warnings.push_back("unterminated literal at line " +
                                           std::to_string(line));
            }
            for (size_t k = tok.begin; k < j; ++k)
                if (src[k] == '\n')
                    ++line;
            tok.kind = quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral;
            tok.end = j;
            out.tokens.push_back(tok);
            line_has_token = true;
            i = j;
            continue;
        }

        if (ident_start(c)) {
            size_t j = i + 1;
            while (j < src.size() && ident_continue(src[j]))
                ++j;
            tok.end = j;
            std::string_view word = src.substr(i, j - i);
            tok.kind = is_cpp_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
            out.tokens.push_back(tok);
            line_has_token = true;
            i = j;
            continue;
        }

        // pp-number: digits, hex/bin prefixes, '.' forms, exponents with sign.
        if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
            size_t j = i + 1;
            while (j < src.size()) {
                char d = src[j];
                if ((d == 'e' || d == 'E' || d == 'p' || d == 'P') && j + 1 < src.size() &&
                    (src[j + 1] == '+' || src[j + 1] == '-')) {
                    j += 2;
                    continue;
                }
                if (ident_continue(d) || d == '.' || d == '\'') {
                    ++j;
                    continue;
                }
                break;
            }
            tok.kind = TokenKind::Number;
            tok.end = j;
            out.tokens.push_back(tok);
            line_has_token = true;
            i = j;
            continue;
        }

        // Punctuators, longest match first.
        bool matched = false;
        for (std::string_view p : kPunct3plus) {
            if (src.compare(i, p.size(), p) == 0) {
                tok.kind = TokenKind::Punctuator;
                tok.end = i + p.size();
                out.tokens.push_back(tok);
                line_has_token = true;
                i += p.size();
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (kSinglePunct.find(c) != std::string_view::npos) {
            tok.kind = TokenKind::Punctuator;
            tok.end = i + 1;
            out.tokens.push_back(tok);
            line_has_token = true;
            ++i;
            continue;
        }

        tok.kind = TokenKind::Unknown;
        tok.end = i + 1;
        out.tokens.push_back(tok);
        out.warnings.push_back("unlexable byte 0x" +
                               std::string(1, "0123456789abcdef"[(c >> 4) & 0xf]) +
                               std::string(1, "0123456789abcdef"[c & 0xf]) + " at line " +
                               std::to_string(line));
        line_has_token = true;
        ++i;
    }
    return out;
}

size_t count_tokens(std::string_view source_text) {
    return lex(source_text).tokens.size();
}

}  // namespace swapbench
