// Shared fixtures for the test suites: temp dirs, composed documents whose
// originality is known by construction, and filler text that can never tile
// against scripted answers.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "origin/corpus.hpp"
#include "origin/detector.hpp"
#include "origin/pairsim.hpp"
#include "origin/provider.hpp"
#include "origin/search.hpp"

namespace testsupport {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0;; ++attempt) {
            path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(attempt));
            std::error_code ec;
            if (std::filesystem::create_directories(path_, ec)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Tokens drawn from an alphabet the scripted provider never emits, so filler
// can't tile against any repository answer. Two disjoint sub-alphabets allow
// fixtures whose residuals must not tile against each other either.
inline std::string filler_text(size_t tokens, uint64_t seed, int alphabet = 0) {
    static const char* kSetA[3] = {"@", "$", "`"};
    static const char* kSetB[3] = {"~", "?", "\\"};
    const char** set = alphabet == 0 ? kSetA : kSetB;
    std::mt19937_64 rng(seed * 2654435761u + 88172645463325252ull);
    std::string out;
    int prev = -1;
    for (size_t i = 0; i < tokens; ++i) {
        int pick;
        do {
            pick = static_cast<int>(rng() % 3);
        } while (pick == prev);
        prev = pick;
        out += set[pick];
        out += ' ';
    }
    return out;
}

inline origin::PromptSpace small_space(size_t prompts) {
    std::vector<std::string> words;
    for (size_t i = 0; i < prompts; ++i) words.push_back("topic" + std::to_string(i));
    return origin::build_prompt_space({words}, "write a {} routine");
}

// 8x2x4 = 64 prompts over algorithm, task, and language words.
inline origin::PromptSpace full_space() {
    return origin::build_prompt_space(
        {{"insertion", "bubble", "merge", "quick", "heap", "selection", "radix", "shell"},
         {"sort", "search"},
         {"c", "cpp", "java", "python"}},
        "write the code for {} {} in {}");
}

inline origin::Repository scripted_repository(const origin::PromptSpace& space,
                                              uint32_t variants, uint64_t seed = 7) {
    auto provider = origin::make_scripted_provider({seed});
    return origin::ingest(space, *provider, variants).repo;
}

// doc = answers[0] + filler + answers[1] + ... ; returns the text and the
// exact fresh-token count so tests can derive the designed originality.
struct ComposedDoc {
    std::string text;
    size_t fresh_tokens = 0;
    std::vector<origin::AnswerKey> parts;
};

// Filler goes between the first and second answer when there are two parts,
// after the answer otherwise.
inline ComposedDoc compose_doc(const origin::Repository& repo,
                               const std::vector<origin::AnswerKey>& parts,
                               size_t fresh_tokens, uint64_t seed, int alphabet = 0) {
    ComposedDoc doc;
    doc.parts = parts;
    doc.fresh_tokens = fresh_tokens;

    for (size_t i = 0; i < parts.size(); ++i) {
        const origin::AnswerRecord* record = repo.find(parts[i]);
        doc.text += record->text;
        doc.text += '\n';
        if (i == 0 && fresh_tokens > 0) {
            doc.text += filler_text(fresh_tokens, seed, alphabet);
            doc.text += '\n';
        }
    }
    if (parts.empty() && fresh_tokens > 0) doc.text += filler_text(fresh_tokens, seed, alphabet);
    return doc;
}

// Description for an explicit selection, built through the public detector ops.
inline origin::Description describe_selection(const origin::TokenStream& doc,
                                              const origin::Repository& repo,
                                              const std::vector<origin::AnswerKey>& keys,
                                              int min_match) {
    origin::Description desc;
    std::vector<origin::TiledSource> sources;
    for (const origin::AnswerKey& key : keys) {
        desc.selections.push_back(origin::Selection{
            key, origin::render_prompt(repo.space, key.prompt_id).length_tokens});
        sources.push_back(origin::TiledSource{
            origin::SourceKey{static_cast<int32_t>(key.prompt_id),
                              static_cast<int32_t>(key.variant)},
            &repo.find(key)->tokens});
    }
    origin::SimilarityResult sim = origin::similarity_against(doc, sources, min_match);
    desc.coverage = sim.coverage;
    desc.residual = origin::residual(doc, desc.coverage);
    desc.u = static_cast<double>(desc.residual.size()) / static_cast<double>(doc.size());
    desc.effort = origin::effort_of(desc);
    return desc;
}

// Brute force over every subset pair whose u is within tau of each side's
// minimum, maximizing pair similarity of the serializations directly.
inline double oracle_max_pair_p(const std::string& text1, const std::string& text2,
                                const origin::Repository& repo,
                                const origin::SearchBudget& budget, double tau) {
    origin::TokenStream doc1 = origin::tokenize(text1);
    origin::TokenStream doc2 = origin::tokenize(text2);

    std::vector<origin::AnswerKey> keys;
    for (const auto& [key, record] : repo.answers) keys.push_back(key);

    auto all_descriptions = [&](const origin::TokenStream& doc) {
        std::vector<std::vector<origin::AnswerKey>> subsets{{}};
        std::vector<origin::AnswerKey> current;
        auto recurse = [&](auto&& self, size_t start, int remaining) -> void {
            if (remaining == 0) return;
            for (size_t i = start; i < keys.size(); ++i) {
                current.push_back(keys[i]);
                subsets.push_back(current);
                self(self, i + 1, remaining - 1);
                current.pop_back();
            }
        };
        recurse(recurse, 0, budget.z);

        std::vector<origin::Description> descriptions;
        double min_u = 1.0;
        for (const auto& subset : subsets) {
            descriptions.push_back(describe_selection(doc, repo, subset, budget.min_match));
            min_u = std::min(min_u, descriptions.back().u);
        }
        std::erase_if(descriptions, [&](const origin::Description& d) {
            return d.u > min_u + tau + 1e-12;
        });
        return descriptions;
    };

    std::vector<origin::Description> side1 = all_descriptions(doc1);
    std::vector<origin::Description> side2 = all_descriptions(doc2);

    const origin::NormalizationProfile literal = origin::NormalizationProfile::literal();
    double best = 0.0;
    for (const origin::Description& a : side1) {
        for (const origin::Description& b : side2) {
            origin::TokenStream sa =
                origin::tokenize(origin::serialize_description(a, repo.space, text1), literal);
            origin::TokenStream sb =
                origin::tokenize(origin::serialize_description(b, repo.space, text2), literal);
            best = std::max(best, origin::pair_similarity(sa, sb, budget.min_match));
        }
    }
    return best;
}

} // namespace testsupport
