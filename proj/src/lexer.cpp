#include "origin/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "origin/errors.hpp"

namespace origin {

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Number: return "number";
        case TokenKind::String: return "string";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punct: return "punct";
        case TokenKind::Word: return "word";
    }
    return "unknown";
}

namespace {

const std::vector<std::string>& default_keywords() {
    static const std::vector<std::string> kw = {
        "auto", "bool", "break", "case", "char", "class", "const", "continue",
        "def", "do", "double", "elif", "else", "enum", "extern", "float",
        "for", "goto", "if", "import", "int", "lambda", "let", "long",
        "new", "nullptr", "pass", "private", "public", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "template", "this",
        "typedef", "union", "unsigned", "var", "void", "volatile", "while",
    };
    return kw;
}

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_';
}

bool is_ident_char(unsigned char c) {
    return std::isalnum(c) || c == '_';
}

// Multi-character operators, longest first per leading character.
const std::array<std::string_view, 26> kMultiOps = {
    "<<=", ">>=", "...", "->*", "::", "->", "++", "--", "<<", ">>",
    "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "=>", "**",
};

bool is_op_char(unsigned char c) {
    static const std::string ops = "+-*/%=<>!&|^.:";
    return ops.find(static_cast<char>(c)) != std::string::npos;
}

void check_utf8(std::string_view text) {
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xE0) == 0xC0) extra = 1;
        else if ((c & 0xF0) == 0xE0) extra = 2;
        else if ((c & 0xF8) == 0xF0) extra = 3;
        else raise(Errc::InvalidEncoding, "invalid UTF-8 lead byte at offset " + std::to_string(i));
        if (i + extra >= n && extra > 0)
            raise(Errc::InvalidEncoding, "truncated UTF-8 sequence at offset " + std::to_string(i));
        for (size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80)
                raise(Errc::InvalidEncoding, "invalid UTF-8 continuation at offset " + std::to_string(i + k));
        }
        i += extra + 1;
    }
}

bool alpha_only(std::string_view word) {
    return std::all_of(word.begin(), word.end(),
                       [](unsigned char c) { return std::isalpha(c); });
}

} // namespace

NormalizationProfile NormalizationProfile::code_default() {
    NormalizationProfile profile;
    profile.keywords = default_keywords();
    return profile;
}

NormalizationProfile NormalizationProfile::literal() {
    NormalizationProfile profile;
    profile.abstract_identifiers = false;
    profile.abstract_literals = false;
    profile.keywords = default_keywords();
    return profile;
}

bool NormalizationProfile::is_keyword(std::string_view word) const {
    const auto& list = keywords.empty() ? default_keywords() : keywords;
    return std::binary_search(list.begin(), list.end(), word);
}

TokenStream tokenize(std::string_view text, const NormalizationProfile& profile) {
    check_utf8(text);

    TokenStream stream;
    stream.source_len_bytes = text.size();
    stream.profile = profile;

    const size_t n = text.size();
    size_t i = 0;
    auto push = [&](TokenKind kind, std::string token_text, size_t begin, size_t end) {
        stream.tokens.push_back(Token{kind, std::move(token_text),
                                      static_cast<uint32_t>(begin),
                                      static_cast<uint32_t>(end)});
    };

    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);

        if (std::isspace(c)) {
            ++i;
            continue;
        }

        // Comments: // to end of line, /* ... */ (unterminated runs to EOF).
        if (c == '/' && i + 1 < n && (text[i + 1] == '/' || text[i + 1] == '*')) {
            size_t begin = i;
            if (text[i + 1] == '/') {
                while (i < n && text[i] != '\n') ++i;
            } else {
                i += 2;
                while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) ++i;
                i = (i + 1 < n) ? i + 2 : n;
            }
            if (!profile.strip_comments)
                push(TokenKind::Punct, std::string(text.substr(begin, i - begin)), begin, i);
            continue;
        }

        if (is_ident_start(c)) {
            size_t begin = i;
            while (i < n && is_ident_char(static_cast<unsigned char>(text[i]))) ++i;
            std::string word(text.substr(begin, i - begin));
            if (profile.is_keyword(word)) {
                push(TokenKind::Keyword, std::move(word), begin, i);
            } else if (profile.abstract_identifiers) {
                push(TokenKind::Identifier, "ID", begin, i);
            } else if (alpha_only(word)) {
                push(TokenKind::Word, std::move(word), begin, i);
            } else {
                push(TokenKind::Identifier, std::move(word), begin, i);
            }
            continue;
        }

        if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            size_t begin = i;
            bool hex = (c == '0' && i + 1 < n && (text[i + 1] == 'x' || text[i + 1] == 'X'));
            if (hex) i += 2;
            while (i < n) {
                unsigned char d = static_cast<unsigned char>(text[i]);
                bool digit = hex ? std::isxdigit(d) : std::isdigit(d);
                bool numeric_tail = digit || d == '.' ||
                    (!hex && (d == 'e' || d == 'E') && i + 1 < n &&
                     (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                      ((text[i + 1] == '+' || text[i + 1] == '-') && i + 2 < n &&
                       std::isdigit(static_cast<unsigned char>(text[i + 2])))));
                if (!numeric_tail) break;
                if (!hex && (d == 'e' || d == 'E')) {
                    ++i;
                    if (text[i] == '+' || text[i] == '-') ++i;
                    continue;
                }
                ++i;
            }
            // trailing suffixes (f, u, l)
            while (i < n && std::strchr("fFuUlL", text[i])) ++i;
            std::string value(text.substr(begin, i - begin));
            push(TokenKind::Number, profile.abstract_literals ? "NUM" : value, begin, i);
            continue;
        }

        if (c == '"' || c == '\'') {
            size_t begin = i;
            char quote = static_cast<char>(c);
            ++i;
            while (i < n && text[i] != quote) {
                if (text[i] == '\\' && i + 1 < n) ++i;
                ++i;
            }
            i = (i < n) ? i + 1 : n;
            std::string value(text.substr(begin, i - begin));
            push(TokenKind::String, profile.abstract_literals ? "STR" : value, begin, i);
            continue;
        }

        if (is_op_char(c)) {
            size_t begin = i;
            std::string_view rest = text.substr(i);
            std::string op;
            for (const auto& multi : kMultiOps) {
                if (rest.substr(0, multi.size()) == multi) {
                    op = std::string(multi);
                    break;
                }
            }
            if (op.empty()) op = std::string(1, static_cast<char>(c));
            i += op.size();
            push(TokenKind::Operator, std::move(op), begin, i);
            continue;
        }

        // Everything else (declared puncts, stray bytes, multibyte UTF-8
        // sequences) becomes a single punct token.
        size_t begin = i;
        size_t len = 1;
        if (c >= 0xF0) len = 4;
        else if (c >= 0xE0) len = 3;
        else if (c >= 0xC0) len = 2;
        len = std::min(len, n - i);
        i += len;
        push(TokenKind::Punct, std::string(text.substr(begin, len)), begin, i);
    }

    return stream;
}

size_t token_count(std::string_view text) {
    return tokenize(text).size();
}

} // namespace origin
