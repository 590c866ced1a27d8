#include "swapbench/lexer.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

using namespace swapbench;

TEST_CASE("count_tokens on the canonical tiny function") {
    // int f ( void ) { return 0 ; }
    CHECK(count_tokens("int f(void){return 0;}") == 10);
}

TEST_CASE("comments and whitespace contribute zero tokens") {
    std::string fn = "int f(void){return 0;}";
    CHECK(count_tokens(fn + "/* hi */") == count_tokens(fn));
    CHECK(count_tokens("// leading\n" + fn) == count_tokens(fn));
    CHECK(count_tokens("  \t\n" + fn + "\n\n") == count_tokens(fn));
}

TEST_CASE("token kinds come out in order") {
    auto r = lex("static int x = 0x1f + 2.5e-3; /* c */ char *s = \"a\\\"b\";");
    REQUIRE(r.warnings.empty());
    std::vector<TokenKind> kinds;
    for (const auto& t : r.tokens)
        kinds.push_back(t.kind);
    CHECK(kinds == std::vector<TokenKind>{
                       TokenKind::Keyword, TokenKind::Keyword, TokenKind::Identifier,
                       TokenKind::Punctuator, TokenKind::Number, TokenKind::Punctuator,
                       TokenKind::Number, TokenKind::Punctuator, TokenKind::Keyword,
                       TokenKind::Punctuator, TokenKind::Identifier, TokenKind::Punctuator,
                       TokenKind::StringLiteral, TokenKind::Punctuator});
}

TEST_CASE("unlexable bytes count one token each and warn") {
    auto r = lex("int a; \x01\x02");
    CHECK(r.tokens.size() == 5);
    CHECK(r.warnings.size() == 2);
}

TEST_CASE("directive tokens are flagged, body tokens are not") {
    std::string src = "#define F(x) {x}\nint g;\n#if A \\\n || B\nlong h;\n#endif\n";
    auto r = lex(src);
    bool saw_directive = false, saw_plain = false, saw_continuation = false;
    for (const auto& t : r.tokens) {
        (t.in_directive ? saw_directive : saw_plain) = true;
        if (t.text(src) == "B") {
            CHECK(t.in_directive);  // backslash continuation keeps the directive open
            saw_continuation = true;
        }
    }
    CHECK(saw_directive);
    CHECK(saw_plain);
    CHECK(saw_continuation);
}

TEST_CASE("string and char literals lex as single tokens") {
    CHECK(count_tokens(R"(char c = '\n';)") == 5);
    CHECK(count_tokens(R"(const char *s = "a b c ; { } /* not a comment */";)") == 7);
    CHECK(count_tokens("const char *r = R\"(raw \" content)\";") == 7);
}

TEST_CASE("counts agree with the independent reference lexer on generated functions") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 50; ++i) {
        std::string fn = testutil::random_c_function(rng, i);
        CAPTURE(fn);
        CHECK(count_tokens(fn) == testutil::reference_token_count(fn));
    }
}

TEST_CASE("counts agree with the reference lexer on the mock project source") {
    std::ifstream in(testutil::fixtures_dir() / "mockproj/src/calc.c", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    REQUIRE(!text.empty());
    CHECK(count_tokens(text) == testutil::reference_token_count(text));
}
