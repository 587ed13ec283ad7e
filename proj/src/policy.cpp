#include "origin/policy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "origin/detector.hpp"
#include "origin/errors.hpp"
#include "origin/util.hpp"

namespace origin {

using nlohmann::json;

namespace {

// 53-bit uniform in [0, 1); explicit so sampling is platform-stable.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

size_t sample_categorical(const std::vector<double>& probs, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return i;
    }
    return probs.size() - 1;
}

// Exact covered fraction against the given answers (no percentage rounding).
double covered_fraction(const TokenStream& doc, const Repository& repo,
                        const std::vector<AnswerKey>& keys, int min_match) {
    std::vector<TiledSource> sources;
    for (const AnswerKey& key : keys) {
        const AnswerRecord* record = repo.find(key);
        if (record)
            sources.push_back(TiledSource{SourceKey{static_cast<int32_t>(key.prompt_id),
                                                    static_cast<int32_t>(key.variant)},
                                          &record->tokens});
    }
    SimilarityResult sim = similarity_against(doc, sources, min_match);
    return static_cast<double>(sim.coverage.covered_count()) / static_cast<double>(doc.size());
}

} // namespace

PolicyModel init_policy(const PromptSpace& space, uint64_t seed, double learning_rate) {
    if (learning_rate <= 0.0) raise(Errc::InvalidArgument, "learning_rate must be > 0");
    PolicyModel model;
    model.logits.assign(space.size(), 0.0);
    model.seed = seed;
    model.learning_rate = learning_rate;
    model.baseline = 0.0;
    model.rng.seed(seed);
    return model;
}

std::vector<double> policy_probabilities(const PolicyModel& model) {
    std::vector<double> probs(model.logits.size(), 0.0);
    if (probs.empty()) return probs;
    const double peak = *std::max_element(model.logits.begin(), model.logits.end());
    double total = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::exp(model.logits[i] - peak);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

TrainStepResult train_step(PolicyModel& model, const TokenStream& doc,
                           const Repository& repo, int min_match) {
    if (repo.answers.empty()) raise(Errc::EmptyRepository, "cannot train against an empty repository");
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");
    if (model.logits.size() != repo.space.size())
        raise(Errc::InvalidArgument, "policy size does not match prompt space");

    const std::vector<double> probs = policy_probabilities(model);

    auto draw = [&]() -> AnswerKey {
        uint32_t prompt = static_cast<uint32_t>(sample_categorical(probs, model.rng));
        uint32_t available = repo.variants_of(prompt);
        uint32_t variant = available > 0 ? static_cast<uint32_t>(model.rng() % available) : 0;
        return AnswerKey{prompt, variant};
    };

    TrainStepResult result;
    result.first = draw();
    result.second = draw();

    result.reward = covered_fraction(doc, repo, {result.first, result.second}, min_match);

    const double advantage = result.reward - model.baseline;
    std::vector<int> count(model.logits.size(), 0);
    ++count[result.first.prompt_id];
    ++count[result.second.prompt_id];

    // d/dlogit_j [log pi(p1) + log pi(p2)] = count_j - 2 * pi_j
    const double scale = model.learning_rate * advantage;
    for (size_t j = 0; j < model.logits.size(); ++j)
        model.logits[j] += scale * (static_cast<double>(count[j]) - 2.0 * probs[j]);

    model.baseline = 0.9 * model.baseline + 0.1 * result.reward;
    return result;
}

double predict_f(const PolicyModel& model, const TokenStream& doc,
                 const Repository& repo, int min_match) {
    if (repo.answers.empty()) raise(Errc::EmptyRepository, "cannot predict against an empty repository");
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");

    const std::vector<double> probs = policy_probabilities(model);
    std::vector<size_t> prompt_order(probs.size());
    for (size_t i = 0; i < prompt_order.size(); ++i) prompt_order[i] = i;
    std::stable_sort(prompt_order.begin(), prompt_order.end(),
                     [&](size_t a, size_t b) { return probs[a] > probs[b]; });

    std::vector<AnswerKey> keys;
    for (size_t prompt : prompt_order) {
        if (keys.size() == 2) break;
        AnswerKey key{static_cast<uint32_t>(prompt), 0};
        if (repo.find(key)) keys.push_back(key);
    }
    if (keys.empty()) raise(Errc::EmptyRepository, "no prompt has a variant-0 answer");

    return 1.0 - covered_fraction(doc, repo, keys, min_match);
}

double predict_f_sampled(PolicyModel& model, const TokenStream& doc,
                         const Repository& repo, int min_match) {
    if (repo.answers.empty()) raise(Errc::EmptyRepository, "cannot predict against an empty repository");
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");

    const std::vector<double> probs = policy_probabilities(model);
    std::vector<AnswerKey> keys;
    for (int draw = 0; draw < 2; ++draw) {
        uint32_t prompt = static_cast<uint32_t>(sample_categorical(probs, model.rng));
        uint32_t available = repo.variants_of(prompt);
        uint32_t variant = available > 0 ? static_cast<uint32_t>(model.rng() % available) : 0;
        keys.push_back(AnswerKey{prompt, variant});
    }
    return 1.0 - covered_fraction(doc, repo, keys, min_match);
}

EvalSet load_eval_set(const std::filesystem::path& labels_path) {
    std::ifstream in(labels_path);
    if (!in) raise(Errc::IoFailure, "cannot open " + labels_path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        raise(Errc::SchemaViolation, "labels file must be a JSON array");

    EvalSet eval;
    const auto base = labels_path.parent_path();
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("file") || !entry.contains("label") ||
            !entry["file"].is_string() || !entry["label"].is_number())
            raise(Errc::SchemaViolation, "labels entries must be {\"file\", \"label\", \"note\"?}");

        EvalItem item;
        item.file = entry["file"].get<std::string>();
        item.label = entry["label"].get<double>();
        item.note = entry.value("note", "");
        if (item.label < 0.0 || item.label > 1.0)
            raise(Errc::SchemaViolation, "label out of [0,1] for " + item.file);

        std::filesystem::path file_path(item.file);
        if (file_path.is_relative()) file_path = base / file_path;
        item.text = read_file(file_path.string());
        if (item.text.empty())
            raise(Errc::SchemaViolation, "empty document: " + item.file);
        eval.items.push_back(std::move(item));
    }
    if (eval.items.empty()) raise(Errc::EmptyEvalSet, "labels file lists no items");
    return eval;
}

double evaluate(const PolicyModel& prototype, const EvalSet& eval,
                const Repository& repo, int min_match, int steps_per_item,
                unsigned workers, const NormalizationProfile& profile) {
    if (eval.items.empty()) raise(Errc::EmptyEvalSet, "evaluation set is empty");
    if (repo.answers.empty()) raise(Errc::EmptyRepository, "cannot evaluate against an empty repository");

    std::vector<double> errors(eval.items.size(), 0.0);
    std::atomic<size_t> next{0};

    auto run_item = [&](size_t i) {
        const EvalItem& item = eval.items[i];
        TokenStream doc = tokenize(item.text, profile);
        PolicyModel model = init_policy(repo.space, prototype.seed + i, prototype.learning_rate);
        for (int step = 0; step < steps_per_item; ++step)
            train_step(model, doc, repo, min_match);
        const double f = predict_f(model, doc, repo, min_match);
        const double diff = item.label - f;
        errors[i] = diff * diff;
    };

    unsigned pool_size = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
    pool_size = std::min<unsigned>(pool_size, static_cast<unsigned>(eval.items.size()));

    if (pool_size <= 1) {
        for (size_t i = 0; i < eval.items.size(); ++i) run_item(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < pool_size; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= eval.items.size()) return;
                    run_item(i);
                }
            });
        for (auto& t : pool) t.join();
    }

    double total = 0.0;
    for (double err : errors) total += err;
    return total / static_cast<double>(errors.size());
}

void save_checkpoint(const PolicyModel& model, const std::filesystem::path& path) {
    json doc;
    doc["logits"] = model.logits;
    doc["seed"] = model.seed;
    doc["learning_rate"] = model.learning_rate;
    doc["baseline"] = model.baseline;
    write_file(path.string(), doc.dump(2) + "\n");
}

PolicyModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoFailure, "cannot open " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("logits") ||
        !doc["logits"].is_array() || !doc.contains("seed") ||
        !doc.contains("learning_rate") || !doc.contains("baseline"))
        raise(Errc::SchemaViolation, "checkpoint must be {logits, seed, learning_rate, baseline}");

    PolicyModel model;
    model.logits = doc["logits"].get<std::vector<double>>();
    model.seed = doc["seed"].get<uint64_t>();
    model.learning_rate = doc["learning_rate"].get<double>();
    model.baseline = doc["baseline"].get<double>();
    for (double logit : model.logits)
        if (!std::isfinite(logit))
            raise(Errc::SchemaViolation, "checkpoint logits must be finite");
    if (!std::isfinite(model.baseline) || model.learning_rate <= 0.0)
        raise(Errc::SchemaViolation, "checkpoint baseline/learning_rate invalid");
    model.rng.seed(model.seed);
    return model;
}

} // namespace origin
