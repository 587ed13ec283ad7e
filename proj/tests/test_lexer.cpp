#include <doctest.h>

#include <random>

#include "origin/errors.hpp"
#include "origin/lexer.hpp"

using namespace origin;

namespace {

std::vector<TokenKind> kinds_of(const TokenStream& stream) {
    std::vector<TokenKind> kinds;
    for (const Token& token : stream.tokens) kinds.push_back(token.kind);
    return kinds;
}

bool streams_equal(const TokenStream& a, const TokenStream& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!(a.tokens[i] == b.tokens[i])) return false;
    return true;
}

// Small pseudo-program with identifiers from a fixed pool, for rename checks.
std::string random_program(std::mt19937& rng, const std::vector<std::string>& idents) {
    static const char* shapes[] = {
        "int %0 = %1 + 3;\n",
        "if (%0 < %1) { %2 = %0 * 2; }\n",
        "while (%1 != 0) %0 -= %2;\n",
        "return %0 + \"tag\" + %2;\n",
        "for (int %0 = 0; %0 < 10; ++%0) %1 += %0;\n",
    };
    std::string out;
    const int lines = 3 + static_cast<int>(rng() % 5);
    for (int i = 0; i < lines; ++i) {
        std::string line = shapes[rng() % 5];
        for (char slot = '0'; slot <= '2'; ++slot) {
            const std::string& name = idents[rng() % idents.size()];
            for (size_t pos; (pos = line.find(std::string("%") + slot)) != std::string::npos;)
                line.replace(pos, 2, name);
        }
        out += line;
    }
    return out;
}

} // namespace

TEST_CASE("empty text tokenizes to an empty stream") {
    TokenStream stream = tokenize("");
    CHECK(stream.tokens.empty());
    CHECK(stream.source_len_bytes == 0);
}

TEST_CASE("default profile abstracts identifiers and literals, drops comments") {
    TokenStream stream = tokenize("int x = 42; // hi");
    REQUIRE(stream.size() == 5);
    CHECK(kinds_of(stream) == std::vector<TokenKind>{TokenKind::Keyword, TokenKind::Identifier,
                                                     TokenKind::Operator, TokenKind::Number,
                                                     TokenKind::Punct});
    CHECK(stream.tokens[0].text == "int");
    CHECK(stream.tokens[1].text == "ID");
    CHECK(stream.tokens[2].text == "=");
    CHECK(stream.tokens[3].text == "NUM");
    CHECK(stream.tokens[4].text == ";");
}

TEST_CASE("tokenize is deterministic") {
    const std::string text = "float y = x * 1.5e3; /* block */ char* s = \"abc\";";
    CHECK(streams_equal(tokenize(text), tokenize(text)));
}

TEST_CASE("block comments and string escapes") {
    TokenStream stream = tokenize("a /* one\ntwo */ b = \"q\\\"uote\";");
    REQUIRE(stream.size() == 5); // ID ID = STR ;
    CHECK(stream.tokens[3].kind == TokenKind::String);
    CHECK(stream.tokens[3].text == "STR");
}

TEST_CASE("unknown bytes become single punct tokens") {
    TokenStream stream = tokenize("@ $ `");
    REQUIRE(stream.size() == 3);
    for (const Token& token : stream.tokens) CHECK(token.kind == TokenKind::Punct);
    CHECK(stream.tokens[0].text == "@");
}

TEST_CASE("invalid UTF-8 raises InvalidEncoding") {
    std::string bad = "int x";
    bad += static_cast<char>(0xC3); // truncated two-byte sequence
    CHECK_THROWS_AS(tokenize(bad), Error);
    try {
        tokenize(bad);
    } catch (const Error& error) {
        CHECK(error.code() == Errc::InvalidEncoding);
    }
}

TEST_CASE("spans are in bounds, non-overlapping, strictly increasing") {
    const std::string text = "while (n > 1) { n = n / 2; total += cost[n]; } // done";
    TokenStream stream = tokenize(text);
    uint32_t previous_end = 0;
    for (const Token& token : stream.tokens) {
        CHECK(token.begin >= previous_end);
        CHECK(token.end > token.begin);
        CHECK(token.end <= text.size());
        previous_end = token.end;
    }
}

TEST_CASE("literal profile keeps text; alphabetic runs become words") {
    TokenStream stream = tokenize("write the code for insertion sort in c",
                                  NormalizationProfile::literal());
    REQUIRE(stream.size() == 8);
    for (const Token& token : stream.tokens) {
        // "for" stays a keyword; every other word keeps Word kind
        CHECK((token.kind == TokenKind::Word || token.kind == TokenKind::Keyword));
    }
    CHECK(stream.tokens[3].kind == TokenKind::Keyword);
    CHECK(stream.tokens[4].kind == TokenKind::Word);
    CHECK(stream.tokens[4].text == "insertion");

    TokenStream mixed = tokenize("x1 = 42", NormalizationProfile::literal());
    REQUIRE(mixed.size() == 3);
    CHECK(mixed.tokens[0].kind == TokenKind::Identifier); // digit in name
    CHECK(mixed.tokens[0].text == "x1");
    CHECK(mixed.tokens[2].text == "42");
}

TEST_CASE("rename invariance under the default profile") {
    std::mt19937 rng(20240811);
    const std::vector<std::string> before = {"alpha", "beta", "gamma_ray", "delta2"};
    const std::vector<std::string> after = {"zz_first", "q9", "renamed_thing", "other"};
    for (int round = 0; round < 50; ++round) {
        std::string original = random_program(rng, before);
        std::string renamed = original;
        for (size_t i = 0; i < before.size(); ++i) {
            // whole-token replacement; pool names never overlap textually
            std::string needle = before[i];
            size_t pos = 0;
            while ((pos = renamed.find(needle, pos)) != std::string::npos) {
                renamed.replace(pos, needle.size(), after[i]);
                pos += after[i].size();
            }
        }
        TokenStream a = tokenize(original);
        TokenStream b = tokenize(renamed);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a.tokens[i].kind == b.tokens[i].kind);
            CHECK(a.tokens[i].text == b.tokens[i].text);
        }
    }
}

TEST_CASE("token count of a concatenation is at least the max of the parts") {
    std::mt19937 rng(7);
    const std::vector<std::string> idents = {"alpha", "beta", "gamma"};
    for (int round = 0; round < 25; ++round) {
        std::string left = random_program(rng, idents);
        std::string right = random_program(rng, idents);
        size_t combined = token_count(left + "\n" + right);
        CHECK(combined >= std::max(token_count(left), token_count(right)));
    }
}

TEST_CASE("tokenize is total over arbitrary printable soup") {
    std::mt19937 rng(9090);
    for (int round = 0; round < 200; ++round) {
        std::string soup;
        const size_t length = 1 + rng() % 120;
        for (size_t i = 0; i < length; ++i)
            soup += static_cast<char>(32 + rng() % 95); // printable ASCII
        TokenStream stream = tokenize(soup);
        uint32_t previous_end = 0;
        for (const Token& token : stream.tokens) {
            CHECK(token.begin >= previous_end);
            CHECK(token.end > token.begin);
            CHECK(token.end <= soup.size());
            previous_end = token.end;
        }
    }
}

TEST_CASE("keyword list is configurable") {
    NormalizationProfile profile = NormalizationProfile::code_default();
    profile.keywords = {"frob"};
    TokenStream stream = tokenize("frob int", profile);
    REQUIRE(stream.size() == 2);
    CHECK(stream.tokens[0].kind == TokenKind::Keyword);
    CHECK(stream.tokens[1].kind == TokenKind::Identifier); // "int" not in the custom list
}
