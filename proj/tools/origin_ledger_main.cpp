// origin-ledger CLI: corpus management, originality scoring, pair comparison,
// and policy training/evaluation on top of the origin_ledger C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "origin_ledger.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOperational = 1;
constexpr int kExitInvalid = 2;

int exit_code_of(ol_status status) {
    switch (status) {
        case OL_OK:
            return kExitOk;
        case OL_E_INVALID_ARGUMENT:
        case OL_E_EMPTY_INPUT:
        case OL_E_BUDGET:
            return kExitInvalid;
        default:
            return kExitOperational;
    }
}

int fail(ol_status status) {
    std::cerr << "origin-ledger: " << ol_last_error() << "\n";
    return exit_code_of(status);
}

// Flag > config file (.origin-ledger.json in the working directory) > default.
json load_config_file() {
    std::ifstream in(".origin-ledger.json");
    if (!in) return json::object();
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
        std::cerr << "origin-ledger: ignoring malformed .origin-ledger.json\n";
        return json::object();
    }
    return config;
}

struct CommonFlags {
    std::optional<int> z, L, min_match, beam_width, steps, workers;
    std::optional<std::string> strategy, variant_policy, format, timestamp, checkpoint;
    std::optional<double> tau, lr;
    std::optional<uint64_t> seed;
    std::optional<std::string> repo;
    bool keep_identifiers = false;
    bool keep_literals = false;
    bool keep_comments = false;
    bool sampled = false;
    std::string report_path;

    void add_budget_flags(CLI::App* cmd) {
        cmd->add_option("--z", z, "max prompts per description");
        cmd->add_option("--L", L, "max rendered prompt length in tokens");
        cmd->add_option("--min-match", min_match, "tiling threshold in tokens");
        cmd->add_option("--strategy", strategy, "exhaustive|greedy|beam");
        cmd->add_option("--beam-width", beam_width, "beam width");
        cmd->add_option("--variant-policy", variant_policy, "all|first");
    }

    void add_output_flags(CLI::App* cmd) {
        cmd->add_option("--report", report_path, "write the report here instead of stdout");
        cmd->add_option("--format", format, "json|md");
        cmd->add_option("--seed", seed, "seed echoed in reports and used for sampling");
        cmd->add_option("--timestamp", timestamp, "pin the report timestamp (ISO-8601)");
        cmd->add_flag("--keep-identifiers", keep_identifiers, "do not abstract identifiers");
        cmd->add_flag("--keep-literals", keep_literals, "do not abstract literals");
        cmd->add_flag("--keep-comments", keep_comments, "tokenize comments too");
    }

    // Builds the options blob the C API expects, honoring precedence.
    std::string options_json(const json& config) const {
        json options = json::object();
        auto pick_int = [&](const char* key, const std::optional<int>& flag) {
            if (flag) options[key] = *flag;
            else if (config.contains(key) && config[key].is_number_integer())
                options[key] = config[key];
        };
        pick_int("z", z);
        pick_int("l", L);
        pick_int("min_match", min_match);
        pick_int("beam_width", beam_width);
        pick_int("steps", steps);
        pick_int("workers", workers);
        auto pick_str = [&](const char* key, const std::optional<std::string>& flag) {
            if (flag) options[key] = *flag;
            else if (config.contains(key) && config[key].is_string()) options[key] = config[key];
        };
        pick_str("strategy", strategy);
        pick_str("variant_policy", variant_policy);
        pick_str("format", format);
        pick_str("timestamp", timestamp);
        pick_str("checkpoint", checkpoint);
        auto pick_num = [&](const char* key, const std::optional<double>& flag) {
            if (flag) options[key] = *flag;
            else if (config.contains(key) && config[key].is_number()) options[key] = config[key];
        };
        pick_num("tau", tau);
        pick_num("lr", lr);
        if (seed) options["seed"] = *seed;
        else if (config.contains("seed") && config["seed"].is_number_unsigned())
            options["seed"] = config["seed"];

        json profile = json::object();
        if (config.contains("profile") && config["profile"].is_object())
            profile = config["profile"];
        if (keep_identifiers) profile["abstract_identifiers"] = false;
        if (keep_literals) profile["abstract_literals"] = false;
        if (keep_comments) profile["strip_comments"] = false;
        if (!profile.empty()) options["profile"] = profile;
        if (sampled) options["sampled"] = true;
        return options.dump();
    }

    std::string repo_dir(const json& config) const {
        if (repo) return *repo;
        if (config.contains("repo") && config["repo"].is_string())
            return config["repo"].get<std::string>();
        return "";
    }
};

int write_report(const std::string& report, const std::string& path) {
    if (path.empty()) {
        std::cout << report;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "origin-ledger: cannot write " << path << "\n";
        return kExitOperational;
    }
    out << report;
    return kExitOk;
}

struct RepoHandle {
    ol_repository* repo = nullptr;
    ~RepoHandle() { ol_repository_free(repo); }
};

struct StringHandle {
    char* text = nullptr;
    ~StringHandle() { ol_string_free(text); }
};

int load_repo_if_any(const std::string& dir, RepoHandle& handle) {
    if (dir.empty()) return kExitOk; // score against an empty repository
    ol_status status = ol_repository_load(dir.c_str(), &handle.repo);
    if (status != OL_OK) return fail(status);
    return kExitOk;
}

std::vector<std::string> read_words(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--slots", "cannot open " + path);
    std::vector<std::string> words;
    std::string word;
    while (in >> word) words.push_back(word);
    return words;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"origin-ledger: originality and similarity scoring for LLM-assisted source code"};
    app.set_version_flag("--version", ol_version());
    app.require_subcommand(1);
    json config = load_config_file();

    // ---- corpus ----
    CLI::App* corpus = app.add_subcommand("corpus", "manage the prompt/answer repository");
    corpus->require_subcommand(1);

    CLI::App* corpus_init = corpus->add_subcommand("init", "create a repository from slot files");
    std::vector<std::string> slot_files;
    std::string template_text, out_dir;
    corpus_init->add_option("--slots", slot_files, "word files, one per slot")->required()->expected(-1);
    corpus_init->add_option("--template", template_text, "prompt template with one {} per slot")->required();
    corpus_init->add_option("--out", out_dir, "repository directory")->required();

    CLI::App* corpus_ingest = corpus->add_subcommand("ingest", "fetch answers for every prompt");
    std::string ingest_repo, provider_kind = "scripted", endpoint, bearer, source_dir;
    int variants = 10;
    std::optional<uint64_t> ingest_seed;
    std::optional<int> timeout_ms;
    corpus_ingest->add_option("--repo", ingest_repo, "repository directory")->required();
    corpus_ingest->add_option("--provider", provider_kind, "offline|scripted|remote")->required();
    corpus_ingest->add_option("--endpoint", endpoint, "remote endpoint URL");
    corpus_ingest->add_option("--bearer-token", bearer, "remote bearer token");
    corpus_ingest->add_option("--timeout-ms", timeout_ms, "remote timeout");
    corpus_ingest->add_option("--source-dir", source_dir, "offline source repository");
    corpus_ingest->add_option("--variants", variants, "answers per prompt");
    corpus_ingest->add_option("--seed", ingest_seed, "scripted generator seed");

    // ---- score ----
    CLI::App* score = app.add_subcommand("score", "originality score of one file");
    std::string score_file;
    CommonFlags score_flags;
    score->add_option("file", score_file, "source file")->required();
    score->add_option("--repo", score_flags.repo, "repository directory");
    score_flags.add_budget_flags(score);
    score_flags.add_output_flags(score);

    // ---- compare ----
    CLI::App* compare = app.add_subcommand("compare", "similarity of two files' descriptions");
    std::string file1, file2;
    CommonFlags compare_flags;
    compare->add_option("file1", file1, "first source file")->required();
    compare->add_option("file2", file2, "second source file")->required();
    compare->add_option("--repo", compare_flags.repo, "repository directory");
    compare->add_option("--tau", compare_flags.tau, "originality slack for candidates");
    compare_flags.add_budget_flags(compare);
    compare_flags.add_output_flags(compare);

    // ---- policy ----
    CLI::App* policy = app.add_subcommand("policy", "train or evaluate the prompt policy");
    policy->require_subcommand(1);

    CLI::App* policy_train = policy->add_subcommand("train", "train a per-document policy");
    std::string train_file;
    CommonFlags train_flags;
    policy_train->add_option("file", train_file, "source file")->required();
    policy_train->add_option("--repo", train_flags.repo, "repository directory");
    policy_train->add_option("--steps", train_flags.steps, "training steps");
    policy_train->add_option("--lr", train_flags.lr, "learning rate");
    policy_train->add_option("--checkpoint", train_flags.checkpoint, "write model JSON here");
    policy_train->add_option("--min-match", train_flags.min_match, "tiling threshold");
    policy_train->add_flag("--sampled", train_flags.sampled,
                           "report f from sampled prompts instead of the top two");
    train_flags.add_output_flags(policy_train);

    CLI::App* policy_eval = policy->add_subcommand("eval", "mean squared error on a labeled set");
    std::string labels_file;
    CommonFlags eval_flags;
    policy_eval->add_option("--labels", labels_file, "JSON array of {file,label,note}")->required();
    policy_eval->add_option("--repo", eval_flags.repo, "repository directory");
    policy_eval->add_option("--steps", eval_flags.steps, "training steps per item");
    policy_eval->add_option("--lr", eval_flags.lr, "learning rate");
    policy_eval->add_option("--min-match", eval_flags.min_match, "tiling threshold");
    policy_eval->add_option("--workers", eval_flags.workers, "worker pool size (0 = all cores)");
    eval_flags.add_output_flags(policy_eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitInvalid;
    }

    if (corpus_init->parsed()) {
        json slots = json::array();
        try {
            for (const std::string& path : slot_files) slots.push_back(read_words(path));
        } catch (const CLI::Error& e) {
            std::cerr << "origin-ledger: " << e.what() << "\n";
            return kExitInvalid;
        }
        ol_space* space = nullptr;
        ol_status status = ol_space_build(slots.dump().c_str(), template_text.c_str(), &space);
        if (status != OL_OK) return fail(status);
        status = ol_space_save(space, out_dir.c_str());
        const size_t size = ol_space_size(space);
        ol_space_free(space);
        if (status != OL_OK) return fail(status);
        std::cout << "initialized prompt space of size " << size << " at " << out_dir << "\n";
        return kExitOk;
    }

    if (corpus_ingest->parsed()) {
        ol_space* space = nullptr;
        ol_status status = ol_space_load(ingest_repo.c_str(), &space);
        if (status != OL_OK) return fail(status);

        if (endpoint.empty() && config.contains("endpoint") && config["endpoint"].is_string())
            endpoint = config["endpoint"].get<std::string>();

        json provider{{"kind", provider_kind}};
        if (!endpoint.empty()) provider["endpoint"] = endpoint;
        if (!bearer.empty()) provider["bearer_token"] = bearer;
        if (timeout_ms) provider["timeout_ms"] = *timeout_ms;
        if (!source_dir.empty()) provider["dir"] = source_dir;
        if (ingest_seed) provider["seed"] = *ingest_seed;

        ol_repository* repo = nullptr;
        StringHandle missing;
        status = ol_ingest(space, provider.dump().c_str(), variants, &repo, &missing.text);
        ol_space_free(space);
        if (status != OL_OK && status != OL_E_PARTIAL) return fail(status);

        ol_status save_status = ol_repository_save(repo, ingest_repo.c_str());
        const size_t count = ol_repository_count(repo);
        ol_repository_free(repo);
        if (save_status != OL_OK) return fail(save_status);

        if (status == OL_E_PARTIAL) {
            std::cerr << "origin-ledger: partial ingest; missing keys: "
                      << (missing.text ? missing.text : "[]") << "\n";
            std::cout << "ingested " << count << " records (incomplete) into " << ingest_repo << "\n";
            return kExitOperational;
        }
        std::cout << "ingested " << count << " records into " << ingest_repo << "\n";
        return kExitOk;
    }

    if (score->parsed()) {
        RepoHandle repo;
        int code = load_repo_if_any(score_flags.repo_dir(config), repo);
        if (code != kExitOk) return code;
        StringHandle report;
        ol_status status = ol_score_file(repo.repo, score_file.c_str(),
                                         score_flags.options_json(config).c_str(), &report.text);
        if (status != OL_OK) return fail(status);
        return write_report(report.text, score_flags.report_path);
    }

    if (compare->parsed()) {
        RepoHandle repo;
        int code = load_repo_if_any(compare_flags.repo_dir(config), repo);
        if (code != kExitOk) return code;
        StringHandle report;
        ol_status status = ol_compare_files(repo.repo, file1.c_str(), file2.c_str(),
                                            compare_flags.options_json(config).c_str(), &report.text);
        if (status != OL_OK) return fail(status);
        return write_report(report.text, compare_flags.report_path);
    }

    if (policy_train->parsed()) {
        RepoHandle repo;
        const std::string dir = train_flags.repo_dir(config);
        if (dir.empty()) {
            std::cerr << "origin-ledger: policy train needs --repo (or repo in config)\n";
            return kExitInvalid;
        }
        int code = load_repo_if_any(dir, repo);
        if (code != kExitOk) return code;
        StringHandle report;
        ol_status status = ol_policy_train_file(repo.repo, train_file.c_str(),
                                                train_flags.options_json(config).c_str(), &report.text);
        if (status != OL_OK) return fail(status);
        return write_report(report.text, train_flags.report_path);
    }

    if (policy_eval->parsed()) {
        RepoHandle repo;
        const std::string dir = eval_flags.repo_dir(config);
        if (dir.empty()) {
            std::cerr << "origin-ledger: policy eval needs --repo (or repo in config)\n";
            return kExitInvalid;
        }
        int code = load_repo_if_any(dir, repo);
        if (code != kExitOk) return code;
        StringHandle report;
        ol_status status = ol_policy_eval(repo.repo, labels_file.c_str(),
                                          eval_flags.options_json(config).c_str(), &report.text);
        if (status != OL_OK) return fail(status);
        return write_report(report.text, eval_flags.report_path);
    }

    return kExitInvalid;
}
