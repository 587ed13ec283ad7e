#include "origin/provider.hpp"

#include <chrono>
#include <map>
#include <mutex>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "origin/errors.hpp"
#include "origin/util.hpp"

namespace origin {

using nlohmann::json;

namespace {

class OfflineProvider final : public AnswerProvider {
public:
    explicit OfflineProvider(Repository repo) : repo_(std::move(repo)) {}

    std::string fetch(const PromptSpec& prompt, uint32_t variant) override {
        const AnswerRecord* record = repo_.find({static_cast<uint32_t>(prompt.id), variant});
        if (!record)
            raise(Errc::MissingAnswer,
                  "no stored answer for prompt " + std::to_string(prompt.id) +
                      " variant " + std::to_string(variant));
        return record->text;
    }

    std::string id() const override { return "offline"; }

private:
    Repository repo_;
};

// Vocabulary for scripted pseudo-programs. Entries are drawn nearly uniformly
// so that abstracted token streams of unrelated answers have no shared runs
// of default min_match length except by rare accident.
struct ScriptedVocab {
    std::vector<std::string> keywords = {
        "auto", "bool", "break", "case", "char", "class", "const", "continue",
        "do", "double", "else", "enum", "float", "for", "goto", "if", "int",
        "long", "return", "short", "static", "struct", "switch", "while",
    };
    std::vector<std::string> operators = {
        "+", "-", "*", "/", "%", "=", "==", "!=", "<", ">", "<=", ">=",
        "&&", "||", "<<", ">>", "+=", "-=", "++", "--", "->", "::", "&", "|", "^", "!",
    };
    std::vector<std::string> puncts = {"(", ")", "[", "]", "{", "}", ",", ";"};
};

class ScriptedProvider final : public AnswerProvider {
public:
    explicit ScriptedProvider(ScriptedConfig config) : config_(config) {}

    std::string fetch(const PromptSpec& prompt, uint32_t variant) override {
        return scripted_answer_text(prompt, variant, config_.seed);
    }

    std::string id() const override { return "scripted:" + std::to_string(config_.seed); }

private:
    ScriptedConfig config_;
};

class RemoteProvider final : public AnswerProvider {
public:
    explicit RemoteProvider(RemoteConfig config)
        : config_(std::move(config)),
          in_flight_(static_cast<std::ptrdiff_t>(std::max(1u, config_.max_in_flight))) {}

    std::string fetch(const PromptSpec& prompt, uint32_t variant) override {
        const AnswerKey key{static_cast<uint32_t>(prompt.id), variant};
        {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }

        in_flight_.acquire();
        std::string answer;
        try {
            answer = fetch_wire(prompt, variant);
        } catch (...) {
            in_flight_.release();
            throw;
        }
        in_flight_.release();

        std::lock_guard lock(mutex_);
        return cache_.emplace(key, std::move(answer)).first->second;
    }

    std::string id() const override { return "remote:" + config_.endpoint; }

private:
    std::string fetch_wire(const PromptSpec& prompt, uint32_t variant) {
        json body = {{"prompt", prompt.rendered}, {"variant", variant}};
        const std::string payload = body.dump();

        bool timed_out = false;
        std::string failure = "no attempt made";
        for (int attempt = 0; attempt < std::max(1, config_.attempts); ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(config_.backoff_ms) * (1 << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }

            httplib::Client client(config_.endpoint);
            client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
            client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
            if (!config_.bearer_token.empty())
                client.set_bearer_token_auth(config_.bearer_token);

            auto res = client.Post("/generate", payload, "application/json");
            if (!res) {
                timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                            res.error() == httplib::Error::Read ||
                            res.error() == httplib::Error::Connection;
                failure = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                timed_out = false;
                failure = "status " + std::to_string(res->status);
                continue;
            }
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded() || !parsed.is_object() ||
                !parsed.contains("answer") || !parsed["answer"].is_string()) {
                timed_out = false;
                failure = "body is not {\"answer\": string}";
                continue;
            }
            std::string answer = parsed["answer"].get<std::string>();
            if (answer.empty()) {
                failure = "empty answer";
                continue;
            }
            return answer;
        }

        if (timed_out)
            raise(Errc::RemoteTimeout, "generate timed out after " +
                                           std::to_string(config_.attempts) + " attempts: " + failure);
        raise(Errc::RemoteMalformedResponse, "generate failed: " + failure);
    }

    RemoteConfig config_;
    std::mutex mutex_;
    std::map<AnswerKey, std::string> cache_;
    std::counting_semaphore<64> in_flight_;
};

} // namespace

namespace {

// One pseudo-statement: 6-11 tokens of mixed keywords, operators, puncts,
// names, and literals. Draws are near-uniform over a ~60-symbol alphabet so
// unrelated statements share no 4-token run except by rare accident.
std::string scripted_statement(std::mt19937_64& rng, const std::vector<std::string>& names) {
    static const ScriptedVocab vocab;
    static const char* terminators[3] = {";", "}", ")"};
    auto pick = [&rng](size_t bound) { return static_cast<size_t>(rng() % bound); };

    std::string out;
    const int len = 5 + static_cast<int>(pick(5));
    int prev_class = -1;
    for (int t = 0; t < len; ++t) {
        int cls;
        do {
            size_t roll = pick(60);
            if (roll < 24) cls = 0;
            else if (roll < 44) cls = 1;
            else if (roll < 52) cls = 2;
            else if (roll < 56) cls = 3;
            else if (roll < 59) cls = 4;
            else cls = 5;
        } while (cls >= 3 && cls == prev_class);
        prev_class = cls;

        if (t > 0) out += ' ';
        switch (cls) {
            case 0: out += vocab.keywords[pick(vocab.keywords.size())]; break;
            case 1: out += vocab.operators[pick(vocab.operators.size())]; break;
            case 2: out += vocab.puncts[pick(vocab.puncts.size())]; break;
            case 3: out += names[pick(names.size())]; break;
            case 4: out += std::to_string(pick(100000)); break;
            case 5: out += "\"w" + std::to_string(pick(100000)) + '"'; break;
        }
    }
    out += ' ';
    out += terminators[pick(3)];
    return out;
}

} // namespace

std::string scripted_answer_text(const PromptSpec& prompt, uint32_t variant, uint64_t seed) {
    std::string tag;
    for (const auto& word : prompt.words) tag += word + "/";

    std::vector<std::string> names;
    for (size_t i = 0; i < prompt.words.size(); ++i)
        names.push_back(prompt.words[i] + "_" + std::string(1, char('a' + i % 26)));
    names.push_back("result");
    names.push_back("tmp");

    // The base body depends on the prompt only. A non-zero variant rewrites
    // roughly a third of the statements and appends one of its own, the way
    // re-asking an LLM the same prompt yields a mostly-similar answer.
    std::mt19937_64 base_rng(fnv1a64(tag, seed * 1099511628211ull + 1469598103934665603ull));
    auto base_pick = [&base_rng](size_t bound) { return static_cast<size_t>(base_rng() % bound); };

    const int statements = 12 + static_cast<int>(base_pick(9));
    std::vector<std::string> lines;
    lines.reserve(static_cast<size_t>(statements) + 1);
    for (int i = 0; i < statements; ++i)
        lines.push_back(scripted_statement(base_rng, names));

    if (variant > 0) {
        std::mt19937_64 variant_rng(fnv1a64(tag + "#v" + std::to_string(variant), seed ^ 0x9e3779b97f4a7c15ull));
        const int rewrites = statements / 3;
        for (int i = 0; i < rewrites; ++i) {
            size_t index = static_cast<size_t>(variant_rng() % lines.size());
            lines[index] = scripted_statement(variant_rng, names);
        }
        lines.push_back(scripted_statement(variant_rng, names));
    }

    std::ostringstream out;
    out << "// " << prompt.rendered << " (variant " << variant << ")\n";
    for (const std::string& line : lines) out << line << '\n';
    return out.str();
}

std::unique_ptr<AnswerProvider> make_offline_provider(Repository repo) {
    return std::make_unique<OfflineProvider>(std::move(repo));
}

std::unique_ptr<AnswerProvider> make_offline_provider(const std::filesystem::path& dir) {
    return std::make_unique<OfflineProvider>(load_repository(dir));
}

std::unique_ptr<AnswerProvider> make_scripted_provider(ScriptedConfig config) {
    return std::make_unique<ScriptedProvider>(config);
}

std::unique_ptr<AnswerProvider> make_remote_provider(RemoteConfig config) {
    return std::make_unique<RemoteProvider>(std::move(config));
}

} // namespace origin
