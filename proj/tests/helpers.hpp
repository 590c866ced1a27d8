#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace testutil {

inline std::filesystem::path fixtures_dir() { return SWAPBENCH_FIXTURES_DIR; }

// Fresh scratch directory per test, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("swapbench-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// Independent reference tokenizer used as the oracle for count_tokens and the
// extraction filter. Regex-driven, structured nothing like the production
// lexer: it repeatedly matches one token class at the current position.
inline size_t reference_token_count(const std::string& src) {
    static const std::vector<std::regex> classes = {
        std::regex(R"(^\s+)"),                                  // whitespace (not a token)
        std::regex(R"(^//[^\n]*)"),                             // line comment (not a token)
        std::regex(R"(^/\*[\s\S]*?\*/)"),                       // block comment (not a token)
    };
    static const std::vector<std::regex> tokens = {
        std::regex(R"(^(?:u8|u|U|L)?"(?:\\.|[^"\\\n])*")"),     // string
        std::regex(R"(^(?:u|U|L)?'(?:\\.|[^'\\\n])*')"),        // char
        std::regex(R"(^[A-Za-z_$][A-Za-z0-9_$]*)"),             // identifier/keyword
        std::regex(R"(^\.?[0-9](?:[eEpP][+-]|[A-Za-z0-9_.'])*)"),  // pp-number
        std::regex(R"(^(?:<<=|>>=|\.\.\.|->\*|<=>|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||\+=|-=|\*=|/=|%=|&=|\^=|\|=|::|##))"),
        std::regex(R"(^[{}\[\]()<>;:,.?=#@\\+\-*/%&|^~!])"),
    };
    size_t count = 0;
    size_t pos = 0;
    while (pos < src.size()) {
        std::string rest = src.substr(pos);
        std::smatch m;
        bool skipped = false;
        for (const auto& re : classes) {
            if (std::regex_search(rest, m, re)) {
                pos += static_cast<size_t>(m[0].length());
                skipped = true;
                break;
            }
        }
        if (skipped)
            continue;
        bool matched = false;
        for (const auto& re : tokens) {
            if (std::regex_search(rest, m, re)) {
                pos += static_cast<size_t>(m[0].length());
                ++count;
                matched = true;
                break;
            }
        }
        if (!matched) {
            ++count;  // unlexable byte counts as one token
            ++pos;
        }
    }
    return count;
}

// Deterministic generator of small C-like functions with varied token mass.
inline std::string random_c_function(std::mt19937& rng, int index) {
    std::uniform_int_distribution<int> stmt_count(0, 24);
    std::uniform_int_distribution<int> pick(0, 4);
    std::string name = "gen_fn_" + std::to_string(index);
    std::string body;
    int n = stmt_count(rng);
    for (int i = 0; i < n; ++i) {
        switch (pick(rng)) {
        case 0: body += "    x = x + " + std::to_string(i) + ";\n"; break;
        case 1: body += "    if (x > " + std::to_string(i * 3) + ") { x--; }\n"; break;
        case 2: body += "    /* step " + std::to_string(i) + " */\n"; break;
        case 3: body += "    x ^= (x << 2) | " + std::to_string(i) + ";\n"; break;
        default: body += "    call_helper(x, \"s" + std::to_string(i) + "\");\n"; break;
        }
    }
    return "static int " + name + "(int x)\n{\n" + body + "    return x;\n}\n";
}

}  // namespace testutil
