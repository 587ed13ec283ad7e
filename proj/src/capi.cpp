#include "origin_ledger.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "origin/corpus.hpp"
#include "origin/errors.hpp"
#include "origin/pairsim.hpp"
#include "origin/policy.hpp"
#include "origin/provider.hpp"
#include "origin/report.hpp"
#include "origin/search.hpp"
#include "origin/util.hpp"
#include "origin/version.hpp"

using namespace origin;
using nlohmann::json;

struct ol_space {
    PromptSpace space;
};

struct ol_repository {
    Repository repo;
};

namespace {

thread_local std::string g_last_error;

ol_status map_errc(Errc code) {
    switch (code) {
        case Errc::EmptySlot:
        case Errc::TemplateArityMismatch:
        case Errc::IdOutOfRange:
        case Errc::InvalidArgument:
        case Errc::InvalidEncoding:
        case Errc::CoverageMismatch:
            return OL_E_INVALID_ARGUMENT;
        case Errc::IoFailure:
            return OL_E_IO;
        case Errc::SchemaViolation:
            return OL_E_SCHEMA;
        case Errc::ProviderUnavailable:
        case Errc::MissingAnswer:
            return OL_E_PROVIDER;
        case Errc::RemoteTimeout:
        case Errc::RemoteMalformedResponse:
            return OL_E_REMOTE;
        case Errc::PartialIngest:
            return OL_E_PARTIAL;
        case Errc::EmptyDocument:
        case Errc::EmptyInput:
        case Errc::EmptyRepository:
        case Errc::EmptyEvalSet:
            return OL_E_EMPTY_INPUT;
        case Errc::BudgetTooLarge:
            return OL_E_BUDGET;
    }
    return OL_E_INTERNAL;
}

template <typename Fn>
ol_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& error) {
        g_last_error = std::string(errc_name(error.code())) + ": " + error.what();
        return map_errc(error.code());
    } catch (const json::exception& error) {
        // wrong value types inside option/config blobs are caller errors
        g_last_error = std::string("InvalidArgument: ") + error.what();
        return OL_E_INVALID_ARGUMENT;
    } catch (const std::exception& error) {
        g_last_error = std::string("internal: ") + error.what();
        return OL_E_INTERNAL;
    } catch (...) {
        g_last_error = "internal: unknown failure";
        return OL_E_INTERNAL;
    }
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

ol_status invalid(const char* what) {
    g_last_error = std::string("InvalidArgument: ") + what;
    return OL_E_INVALID_ARGUMENT;
}

json parse_options(const char* options_json) {
    if (!options_json || !*options_json) return json::object();
    json options = json::parse(options_json, nullptr, false);
    if (options.is_discarded() || !options.is_object())
        raise(Errc::InvalidArgument, "options must be a JSON object");
    return options;
}

struct CommonOptions {
    SearchBudget budget;
    NormalizationProfile profile = NormalizationProfile::code_default();
    double tau = 0.05;
    uint64_t seed = 7;
    ReportFormat format = ReportFormat::Json;
    std::string timestamp;
    int steps = 400;
    double lr = 0.1;
    std::string checkpoint;
    unsigned workers = 0;
    bool sampled = false;
};

CommonOptions read_options(const json& options) {
    CommonOptions out;
    out.budget.z = options.value("z", out.budget.z);
    out.budget.L = options.value("l", out.budget.L);
    out.budget.min_match = options.value("min_match", out.budget.min_match);
    if (options.contains("strategy"))
        out.budget.strategy = parse_strategy(options["strategy"].get<std::string>());
    out.budget.beam_width = options.value("beam_width", out.budget.beam_width);
    if (options.contains("variant_policy"))
        out.budget.variant_policy = parse_variant_policy(options["variant_policy"].get<std::string>());
    out.tau = options.value("tau", out.tau);
    out.seed = options.value("seed", out.seed);
    if (options.contains("format"))
        out.format = parse_report_format(options["format"].get<std::string>());
    out.timestamp = options.value("timestamp", std::string());
    if (out.timestamp.empty()) out.timestamp = iso_timestamp();
    if (options.contains("profile")) {
        const json& profile = options["profile"];
        out.profile.strip_comments = profile.value("strip_comments", out.profile.strip_comments);
        out.profile.abstract_identifiers =
            profile.value("abstract_identifiers", out.profile.abstract_identifiers);
        out.profile.abstract_literals =
            profile.value("abstract_literals", out.profile.abstract_literals);
    }
    out.steps = options.value("steps", out.steps);
    out.lr = options.value("lr", out.lr);
    out.checkpoint = options.value("checkpoint", std::string());
    out.workers = options.value("workers", 0u);
    out.sampled = options.value("sampled", false);
    return out;
}

const Repository& repo_or_empty(const ol_repository* repo) {
    static const Repository empty;
    return repo ? repo->repo : empty;
}

bool is_default_profile(const NormalizationProfile& profile) {
    const NormalizationProfile standard = NormalizationProfile::code_default();
    return profile.strip_comments == standard.strip_comments &&
           profile.abstract_identifiers == standard.abstract_identifiers &&
           profile.abstract_literals == standard.abstract_literals &&
           (profile.keywords.empty() || profile.keywords == standard.keywords);
}

// Holds a re-tokenized repository copy when a non-default profile is in play;
// answers must be normalized the same way as the document or nothing tiles.
struct EffectiveRepo {
    Repository adjusted;
    const Repository* view = nullptr;

    EffectiveRepo(const ol_repository* repo, const NormalizationProfile& profile) {
        const Repository& base = repo_or_empty(repo);
        if (is_default_profile(profile) || base.answers.empty()) {
            view = &base;
        } else {
            adjusted = retokenized(base, profile);
            view = &adjusted;
        }
    }
};

ol_status score_impl(const ol_repository* repo, const std::string& text,
                     const std::string& name, const char* options_json, char** report_out) {
    const CommonOptions options = read_options(parse_options(options_json));
    TokenStream doc = tokenize(text, options.profile);
    EffectiveRepo effective(repo, options.profile);
    Description desc = min_originality(doc, *effective.view, options.budget);
    ScoreReport report = make_score_report(name, doc, text, desc, effective.view->space,
                                           options.budget, options.seed, options.timestamp);
    *report_out = dup_string(emit(report, options.format));
    return OL_OK;
}

} // namespace

const char* ol_version(void) { return kVersion; }

const char* ol_last_error(void) { return g_last_error.c_str(); }

void ol_string_free(char* text) { std::free(text); }

ol_status ol_space_build(const char* slots_json, const char* template_text, ol_space** out) {
    if (!slots_json || !template_text || !out) return invalid("null argument");
    return guarded([&]() -> ol_status {
        json slots = json::parse(slots_json, nullptr, false);
        if (slots.is_discarded() || !slots.is_array())
            raise(Errc::InvalidArgument, "slots must be a JSON array of arrays");
        std::vector<std::vector<std::string>> parsed;
        for (const auto& slot : slots) {
            if (!slot.is_array()) raise(Errc::InvalidArgument, "each slot must be an array");
            parsed.push_back(slot.get<std::vector<std::string>>());
        }
        auto handle = std::make_unique<ol_space>();
        handle->space = build_prompt_space(std::move(parsed), template_text);
        *out = handle.release();
        return OL_OK;
    });
}

ol_status ol_space_load(const char* repo_dir, ol_space** out) {
    if (!repo_dir || !out) return invalid("null argument");
    return guarded([&]() -> ol_status {
        auto handle = std::make_unique<ol_space>();
        handle->space = load_prompt_space(repo_dir);
        *out = handle.release();
        return OL_OK;
    });
}

ol_status ol_space_save(const ol_space* space, const char* repo_dir) {
    if (!space || !repo_dir) return invalid("null argument");
    return guarded([&]() -> ol_status {
        save_prompt_space(space->space, repo_dir);
        return OL_OK;
    });
}

void ol_space_free(ol_space* space) { delete space; }

size_t ol_space_size(const ol_space* space) { return space ? space->space.size() : 0; }

ol_status ol_space_render(const ol_space* space, size_t prompt_id, char** rendered) {
    if (!space || !rendered) return invalid("null argument");
    return guarded([&]() -> ol_status {
        *rendered = dup_string(render_prompt(space->space, prompt_id).rendered);
        return OL_OK;
    });
}

ol_status ol_repository_load(const char* dir, ol_repository** out) {
    if (!dir || !out) return invalid("null argument");
    return guarded([&]() -> ol_status {
        auto handle = std::make_unique<ol_repository>();
        handle->repo = load_repository(dir);
        *out = handle.release();
        return OL_OK;
    });
}

ol_status ol_repository_save(const ol_repository* repo, const char* dir) {
    if (!repo || !dir) return invalid("null argument");
    return guarded([&]() -> ol_status {
        save_repository(repo->repo, dir);
        return OL_OK;
    });
}

void ol_repository_free(ol_repository* repo) { delete repo; }

size_t ol_repository_count(const ol_repository* repo) {
    return repo ? repo->repo.count() : 0;
}

ol_status ol_ingest(const ol_space* space, const char* provider_json, int variants,
                    ol_repository** out, char** missing_json) {
    if (!space || !provider_json || !out) return invalid("null argument");
    return guarded([&]() -> ol_status {
        json config = json::parse(provider_json, nullptr, false);
        if (config.is_discarded() || !config.is_object() || !config.contains("kind"))
            raise(Errc::InvalidArgument, "provider config must be a JSON object with \"kind\"");

        std::unique_ptr<AnswerProvider> provider;
        const std::string kind = config["kind"].get<std::string>();
        if (kind == "offline") {
            if (!config.contains("dir"))
                raise(Errc::InvalidArgument, "offline provider needs \"dir\"");
            provider = make_offline_provider(std::filesystem::path(config["dir"].get<std::string>()));
        } else if (kind == "scripted") {
            ScriptedConfig scripted;
            scripted.seed = config.value("seed", scripted.seed);
            provider = make_scripted_provider(scripted);
        } else if (kind == "remote") {
            RemoteConfig remote;
            remote.endpoint = config.value("endpoint", std::string());
            if (remote.endpoint.empty())
                raise(Errc::InvalidArgument, "remote provider needs \"endpoint\"");
            remote.timeout_ms = config.value("timeout_ms", remote.timeout_ms);
            remote.attempts = config.value("attempts", remote.attempts);
            remote.backoff_ms = config.value("backoff_ms", remote.backoff_ms);
            remote.bearer_token = config.value("bearer_token", std::string());
            remote.max_in_flight = config.value("max_in_flight", remote.max_in_flight);
            provider = make_remote_provider(std::move(remote));
        } else {
            raise(Errc::InvalidArgument, "unknown provider kind: " + kind);
        }

        if (variants < 1) raise(Errc::InvalidArgument, "variants must be >= 1");
        IngestReport ingested = ingest(space->space, *provider, static_cast<uint32_t>(variants));

        auto handle = std::make_unique<ol_repository>();
        handle->repo = std::move(ingested.repo);
        *out = handle.release();

        if (!ingested.missing.empty()) {
            json missing = json::array();
            for (const AnswerKey& key : ingested.missing)
                missing.push_back(json::array({key.prompt_id, key.variant}));
            if (missing_json) *missing_json = dup_string(missing.dump());
            g_last_error = "PartialIngest: " + std::to_string(ingested.missing.size()) +
                           " of " + std::to_string(space->space.size() * static_cast<size_t>(variants)) +
                           " records missing";
            return OL_E_PARTIAL;
        }
        if (missing_json) *missing_json = dup_string("[]");
        return OL_OK;
    });
}

ol_status ol_score_file(const ol_repository* repo, const char* path,
                        const char* options_json, char** report) {
    if (!path || !report) return invalid("null argument");
    return guarded([&]() -> ol_status {
        return score_impl(repo, read_file(path), path, options_json, report);
    });
}

ol_status ol_score_text(const ol_repository* repo, const char* text, const char* name,
                        const char* options_json, char** report) {
    if (!text || !report) return invalid("null argument");
    return guarded([&]() -> ol_status {
        return score_impl(repo, text, name ? name : "(text)", options_json, report);
    });
}

ol_status ol_compare_files(const ol_repository* repo, const char* path1, const char* path2,
                           const char* options_json, char** report) {
    if (!path1 || !path2 || !report) return invalid("null argument");
    return guarded([&]() -> ol_status {
        const CommonOptions options = read_options(parse_options(options_json));
        const std::string text1 = read_file(path1);
        const std::string text2 = read_file(path2);
        TokenStream tokens1 = tokenize(text1, options.profile);
        TokenStream tokens2 = tokenize(text2, options.profile);

        PairDocument doc1{path1, &tokens1, text1};
        PairDocument doc2{path2, &tokens2, text2};
        PairOptions pair_options;
        pair_options.tau = options.tau;

        EffectiveRepo effective(repo, options.profile);
        PairResult pair = max_similarity(doc1, doc2, *effective.view, options.budget, pair_options);
        ScoreReport score = make_compare_report(doc1, doc2, pair, effective.view->space,
                                                options.budget, options.seed, options.timestamp);
        *report = dup_string(emit(score, options.format));
        return OL_OK;
    });
}

ol_status ol_policy_train_file(const ol_repository* repo, const char* path,
                               const char* options_json, char** report) {
    if (!repo || !path || !report) return invalid("null argument");
    return guarded([&]() -> ol_status {
        const CommonOptions options = read_options(parse_options(options_json));
        const std::string text = read_file(path);
        TokenStream doc = tokenize(text, options.profile);
        EffectiveRepo effective(repo, options.profile);

        PolicyModel model = init_policy(effective.view->space, options.seed, options.lr);
        double reward_sum = 0.0;
        double last_reward = 0.0;
        for (int step = 0; step < options.steps; ++step) {
            TrainStepResult result = train_step(model, doc, *effective.view, options.budget.min_match);
            reward_sum += result.reward;
            last_reward = result.reward;
        }
        const double f = options.sampled
                             ? predict_f_sampled(model, doc, *effective.view, options.budget.min_match)
                             : predict_f(model, doc, *effective.view, options.budget.min_match);

        if (!options.checkpoint.empty()) save_checkpoint(model, options.checkpoint);

        char buf[32];
        auto fixed = [&buf](double v, int decimals) {
            std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
            return std::string(buf);
        };
        json summary;
        summary["version"] = kVersion;
        summary["mode"] = "train";
        summary["document"] = path;
        summary["tokens"] = doc.size();
        summary["steps"] = options.steps;
        summary["learning_rate"] = fixed(options.lr, 4);
        summary["seed"] = options.seed;
        summary["f"] = fixed(f, 4);
        summary["f_mode"] = options.sampled ? "sampled" : "argmax";
        summary["mean_reward"] = fixed(options.steps > 0 ? reward_sum / options.steps : 0.0, 4);
        summary["final_reward"] = fixed(last_reward, 4);
        summary["checkpoint"] = options.checkpoint;
        summary["timestamp"] = options.timestamp;
        *report = dup_string(summary.dump(2) + "\n");
        return OL_OK;
    });
}

ol_status ol_policy_eval(const ol_repository* repo, const char* labels_path,
                         const char* options_json, char** report) {
    if (!repo || !labels_path || !report) return invalid("null argument");
    return guarded([&]() -> ol_status {
        const CommonOptions options = read_options(parse_options(options_json));
        EvalSet eval = load_eval_set(labels_path);
        EffectiveRepo effective(repo, options.profile);
        PolicyModel prototype = init_policy(effective.view->space, options.seed, options.lr);
        const double epsilon = evaluate(prototype, eval, *effective.view, options.budget.min_match,
                                        options.steps, options.workers, options.profile);
        ScoreReport score = make_eval_report(labels_path, eval.items.size(), epsilon,
                                             options.steps, options.lr, options.budget.min_match,
                                             options.seed, options.timestamp);
        *report = dup_string(emit(score, options.format));
        return OL_OK;
    });
}
