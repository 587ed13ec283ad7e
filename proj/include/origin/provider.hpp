#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "origin/corpus.hpp"

namespace origin {

// A source of answers to prompts: the stand-in for live LLM access.
// fetch() must be deterministic for offline and scripted providers; the
// remote provider becomes deterministic after its cache is warm.
class AnswerProvider {
public:
    virtual ~AnswerProvider() = default;

    // Returns non-empty answer text. Throws MissingAnswer / RemoteTimeout /
    // RemoteMalformedResponse on failure.
    virtual std::string fetch(const PromptSpec& prompt, uint32_t variant) = 0;

    virtual std::string id() const = 0;
};

// Plays back answers stored in a repository.
std::unique_ptr<AnswerProvider> make_offline_provider(Repository repo);
std::unique_ptr<AnswerProvider> make_offline_provider(const std::filesystem::path& dir);

struct ScriptedConfig {
    uint64_t seed = 7;
};

// Deterministic pseudo-program generator. Output token structure is
// high-entropy on purpose: under the abstracting default profile, two
// unrelated answers must not share runs of min_match tokens, or coverage
// would bleed between prompts.
std::unique_ptr<AnswerProvider> make_scripted_provider(ScriptedConfig config = {});

struct RemoteConfig {
    std::string endpoint;     // e.g. http://127.0.0.1:8811
    int timeout_ms = 30000;
    int attempts = 3;         // total tries per fetch
    int backoff_ms = 500;     // doubles per retry
    std::string bearer_token; // optional Authorization header
    unsigned max_in_flight = 4;
};

// POST <endpoint>/generate {"prompt": ..., "variant": ...} -> {"answer": ...}.
// Successful fetches are cached; a key never hits the wire twice.
std::unique_ptr<AnswerProvider> make_remote_provider(RemoteConfig config);

// Shared by tests and the ingest CLI: one scripted answer body.
std::string scripted_answer_text(const PromptSpec& prompt, uint32_t variant, uint64_t seed);

} // namespace origin
