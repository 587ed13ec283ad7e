#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "origin/lexer.hpp"

namespace origin {

class AnswerProvider;

// The finite prompt space: an ordered list of word slots rendered through a
// single template. Prompt ids enumerate word tuples lexicographically with
// the last slot varying fastest.
struct PromptSpace {
    std::vector<std::vector<std::string>> slots; // sorted, unique, lowercase
    std::string template_text;                   // one "{}" per slot

    size_t size() const;
};

struct PromptSpec {
    size_t id = 0;
    std::vector<std::string> words;
    std::string rendered;
    size_t length_tokens = 0;
};

PromptSpace build_prompt_space(std::vector<std::vector<std::string>> slots,
                               std::string template_text);

PromptSpec render_prompt(const PromptSpace& space, size_t id);

// Inverse of render_prompt's id -> words mapping.
size_t prompt_id_of(const PromptSpace& space, const std::vector<std::string>& words);

struct AnswerKey {
    uint32_t prompt_id = 0;
    uint32_t variant = 0;

    auto operator<=>(const AnswerKey&) const = default;
};

struct AnswerRecord {
    uint32_t prompt_id = 0;
    uint32_t variant = 0;
    std::string text;
    TokenStream tokens; // default-profile tokenization of text
    std::string provider_id;
    std::string fetched_at;
};

struct Repository {
    PromptSpace space;
    std::map<AnswerKey, AnswerRecord> answers;
    std::string provenance;

    size_t count() const { return answers.size(); }
    const AnswerRecord* find(AnswerKey key) const;
    // Number of stored variants for one prompt (0..k-1, contiguous when valid).
    uint32_t variants_of(uint32_t prompt_id) const;
};

struct IngestReport {
    Repository repo;
    std::vector<AnswerKey> missing; // keys whose fetch failed
};

// Fetches size(space) * variants answers. Throws ProviderUnavailable if not a
// single fetch succeeded; otherwise failures are listed in `missing` and the
// fetched records are kept.
IngestReport ingest(const PromptSpace& space, AnswerProvider& provider,
                    uint32_t variants, unsigned max_in_flight = 4);

// On-disk layout: space.json, answers/<prompt_id>/<variant>.txt,
// answers/<prompt_id>/meta.json.
void save_repository(const Repository& repo, const std::filesystem::path& dir);
Repository load_repository(const std::filesystem::path& dir);

// space.json only (corpus init writes the space before any ingest).
void save_prompt_space(const PromptSpace& space, const std::filesystem::path& dir);
PromptSpace load_prompt_space(const std::filesystem::path& dir);

// Copy of the repository with every answer tokenized under the given profile.
// Documents and answers must share one normalization or nothing tiles.
Repository retokenized(const Repository& repo, const NormalizationProfile& profile);

} // namespace origin
