#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace origin {

enum class TokenKind : uint8_t {
    Identifier,
    Keyword,
    Number,
    String,
    Operator,
    Punct,
    Word,
};

const char* token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;      // normalized text (ID / NUM / STR when abstracted)
    uint32_t begin = 0;    // byte span in the original input
    uint32_t end = 0;

    bool operator==(const Token& other) const {
        return kind == other.kind && text == other.text;
    }
};

// Controls how raw text is normalized into tokens. The default profile
// abstracts identifiers and literals so streams are rename-robust.
struct NormalizationProfile {
    bool strip_comments = true;
    bool abstract_identifiers = true;
    bool abstract_literals = true;
    std::vector<std::string> keywords; // sorted; empty means code_default() set

    static NormalizationProfile code_default();
    // Keeps identifier and literal text verbatim. Used when comparing
    // serialized descriptions, where prompt words must stay distinguishable.
    static NormalizationProfile literal();

    bool is_keyword(std::string_view word) const;
};

struct TokenStream {
    size_t source_len_bytes = 0;
    std::vector<Token> tokens;
    NormalizationProfile profile;

    size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Total over any byte sequence that is valid UTF-8; unknown bytes become
// single-character punct tokens. Throws Error(InvalidEncoding) otherwise.
TokenStream tokenize(std::string_view text, const NormalizationProfile& profile = NormalizationProfile::code_default());

// Token count of `text` under the default profile.
size_t token_count(std::string_view text);

} // namespace origin
