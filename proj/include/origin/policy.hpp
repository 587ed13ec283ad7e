#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "origin/corpus.hpp"
#include "origin/lexer.hpp"

namespace origin {

// Trainable categorical distribution over the prompt space. Feedback is the
// detector's similarity, pushed through a score-function (likelihood-ratio)
// update with an EMA baseline. One model is trained per document.
struct PolicyModel {
    std::vector<double> logits;
    uint64_t seed = 7;
    double learning_rate = 0.1;
    double baseline = 0.0;
    std::mt19937_64 rng;
};

PolicyModel init_policy(const PromptSpace& space, uint64_t seed, double learning_rate);

// softmax(logits); sums to 1 within 1e-9.
std::vector<double> policy_probabilities(const PolicyModel& model);

struct TrainStepResult {
    double reward = 0.0;                 // 0.01 * t of the two sampled answers
    AnswerKey first, second;             // the sampled (prompt, variant) pairs
};

// Samples two prompts i.i.d. from the current distribution, a uniform variant
// for each, scores the document against both answers, and ascends the exact
// categorical score-function gradient of expected reward.
TrainStepResult train_step(PolicyModel& model, const TokenStream& doc,
                           const Repository& repo, int min_match);

// f(D) = 1 - covered fraction against the two highest-probability prompts
// (tie-break lower id), variant 0 of each.
double predict_f(const PolicyModel& model, const TokenStream& doc,
                 const Repository& repo, int min_match);

// Non-default alternative: two prompts sampled from the distribution with
// uniform variants. Consumes the model's RNG.
double predict_f_sampled(PolicyModel& model, const TokenStream& doc,
                         const Repository& repo, int min_match);

struct EvalItem {
    std::string file;
    std::string text;
    double label = 0.0; // known originality in [0, 1]
    std::string note;
};

struct EvalSet {
    std::vector<EvalItem> items;
};

// JSON array of {"file", "label", "note"}; file paths resolve relative to the
// labels file's directory.
EvalSet load_eval_set(const std::filesystem::path& labels_path);

// Trains one policy per item (seed = prototype.seed + item index) for
// steps_per_item steps, then returns the mean squared error between labels
// and predictions. workers = 0 means use hardware parallelism. Item documents
// are tokenized with `profile`, which must match the repository's answers.
double evaluate(const PolicyModel& prototype, const EvalSet& eval,
                const Repository& repo, int min_match, int steps_per_item,
                unsigned workers = 0,
                const NormalizationProfile& profile = NormalizationProfile::code_default());

void save_checkpoint(const PolicyModel& model, const std::filesystem::path& path);
PolicyModel load_checkpoint(const std::filesystem::path& path);

} // namespace origin
