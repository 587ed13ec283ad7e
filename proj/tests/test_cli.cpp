#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "origin/corpus.hpp"
#include "origin/provider.hpp"
#include "origin/util.hpp"
#include "support.hpp"

using nlohmann::json;
using testsupport::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs through /bin/sh so tests can set cwd and environment per call.
RunResult run(const std::string& command) {
    RunResult result;
    FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

const std::string cli = ORIGIN_CLI_BIN;

std::string repo_fixture(const TempDir& dir) {
    origin::Repository repo =
        testsupport::scripted_repository(testsupport::small_space(4), 2);
    origin::save_repository(repo, dir.path() / "repo");
    return (dir.path() / "repo").string();
}

} // namespace

TEST_CASE("score with no repository reports originality 1.0") {
    TempDir dir("cli-score-empty");
    origin::write_file((dir.path() / "hello.c").string(), "int main() { return 0; }\n");

    RunResult result = run("cd " + dir.path().string() + " && " + cli + " score hello.c");
    CHECK(result.exit_code == 0);
    json report = json::parse(result.out);
    CHECK(report["originality"] == "1.0000");
    CHECK(report["mode"] == "score");
}

TEST_CASE("compare a file against itself gives s = 1.0") {
    TempDir dir("cli-compare-self");
    origin::write_file((dir.path() / "f.c").string(), "int twice(int n) { return n + n; }\n");

    RunResult result =
        run("cd " + dir.path().string() + " && " + cli + " compare f.c f.c --tau 0");
    CHECK(result.exit_code == 0);
    json report = json::parse(result.out);
    CHECK(report["similarity_s"] == "1.0000");
}

TEST_CASE("invalid flags exit with code 2") {
    TempDir dir("cli-invalid");
    origin::write_file((dir.path() / "f.c").string(), "int x = 1;\n");

    CHECK(run(cli + " score").exit_code == 2);                       // missing argument
    CHECK(run(cli + " frobnicate").exit_code == 2);                  // unknown subcommand
    RunResult bogus = run("cd " + dir.path().string() + " && " + cli +
                          " score f.c --strategy bogus");
    CHECK(bogus.exit_code == 2); // strategy rejected by the library
}

TEST_CASE("missing input files exit with code 1") {
    CHECK(run(cli + " score /nonexistent/never.c").exit_code == 1);
}

TEST_CASE("reports are byte-identical across runs when the timestamp is pinned") {
    TempDir dir("cli-determinism");
    const std::string repo = repo_fixture(dir);
    auto composed = testsupport::compose_doc(
        testsupport::scripted_repository(testsupport::small_space(4), 2),
        {origin::AnswerKey{1, 0}}, 8, 21);
    origin::write_file((dir.path() / "doc.c").string(), composed.text);

    const std::string command = "cd " + dir.path().string() +
                                " && SOURCE_DATE_EPOCH=1700000000 " + cli +
                                " score doc.c --repo " + repo;
    RunResult first = run(command);
    RunResult second = run(command);
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(!first.out.empty());
}

TEST_CASE("corpus init, ingest, score, and --report work end to end") {
    TempDir dir("cli-flow");
    origin::write_file((dir.path() / "A.txt").string(), "merge quick\n");
    origin::write_file((dir.path() / "B.txt").string(), "sort\n");

    RunResult init = run("cd " + dir.path().string() + " && " + cli +
                         " corpus init --slots A.txt B.txt --template \"write {} {} code\" --out repo");
    CHECK(init.exit_code == 0);

    RunResult ingest = run("cd " + dir.path().string() + " && " + cli +
                           " corpus ingest --repo repo --provider scripted --variants 2");
    CHECK(ingest.exit_code == 0);
    CHECK(ingest.out.find("4 records") != std::string::npos);

    origin::Repository repo = origin::load_repository(dir.path() / "repo");
    auto composed = testsupport::compose_doc(repo, {origin::AnswerKey{0, 0}}, 10, 5);
    origin::write_file((dir.path() / "doc.c").string(), composed.text);

    RunResult score = run("cd " + dir.path().string() + " && SOURCE_DATE_EPOCH=1700000000 " + cli +
                          " score doc.c --repo repo --z 1 --report out.json && cat out.json");
    CHECK(score.exit_code == 0);
    json report = json::parse(score.out);
    CHECK(report["budget"]["z"] == 1);
    REQUIRE(report["prompts"].size() == 1);
    CHECK(report["prompts"][0]["id"] == 0);
    const double originality = std::stod(report["originality"].get<std::string>());
    const double tokens = report["tokens"].get<double>();
    CHECK(originality == doctest::Approx(10.0 / tokens).epsilon(1e-3));
}

TEST_CASE("config file supplies defaults and flags override it") {
    TempDir dir("cli-config");
    const std::string repo = repo_fixture(dir);
    origin::write_file((dir.path() / "doc.c").string(), "int main() { return 7; }\n");
    origin::write_file((dir.path() / ".origin-ledger.json").string(),
                       "{\"z\": 1, \"seed\": 3, \"repo\": \"" + repo + "\"}");

    RunResult from_config = run("cd " + dir.path().string() + " && " + cli + " score doc.c");
    CHECK(from_config.exit_code == 0);
    json report = json::parse(from_config.out);
    CHECK(report["budget"]["z"] == 1);
    CHECK(report["seed"] == 3);

    RunResult overridden =
        run("cd " + dir.path().string() + " && " + cli + " score doc.c --z 2 --seed 11");
    json report2 = json::parse(overridden.out);
    CHECK(report2["budget"]["z"] == 2);
    CHECK(report2["seed"] == 11);
}

TEST_CASE("policy train and eval run through the CLI") {
    TempDir dir("cli-policy");
    const std::string repo = repo_fixture(dir);
    origin::Repository loaded = origin::load_repository(repo);
    origin::write_file((dir.path() / "doc.c").string(),
                       loaded.find(origin::AnswerKey{2, 0})->text);
    origin::write_file((dir.path() / "labels.json").string(),
                       "[{\"file\": \"doc.c\", \"label\": 0.0, \"note\": \"verbatim answer\"}]");

    RunResult train = run("cd " + dir.path().string() + " && " + cli +
                          " policy train doc.c --repo " + repo +
                          " --steps 80 --lr 0.1 --seed 7 --checkpoint model.json");
    CHECK(train.exit_code == 0);
    json summary = json::parse(train.out);
    CHECK(summary["mode"] == "train");
    CHECK(std::filesystem::exists(dir.path() / "model.json"));

    RunResult eval = run("cd " + dir.path().string() + " && " + cli +
                         " policy eval --labels labels.json --repo " + repo +
                         " --steps 80 --seed 7");
    CHECK(eval.exit_code == 0);
    json report = json::parse(eval.out);
    CHECK(report["mode"] == "eval");
    CHECK(report["items"] == 1);
    const double epsilon = std::stod(report["epsilon"].get<std::string>());
    CHECK(epsilon <= 0.05); // verbatim answer should be found quickly
}

TEST_CASE("policy subcommands require a repository") {
    TempDir dir("cli-policy-norepo");
    origin::write_file((dir.path() / "doc.c").string(), "int main() { return 0; }\n");
    RunResult result = run("cd " + dir.path().string() + " && " + cli + " policy train doc.c");
    CHECK(result.exit_code == 2);
}

TEST_CASE("offline ingest replays another repository") {
    TempDir dir("cli-offline");
    const std::string source = repo_fixture(dir); // 4 prompts x 2 variants

    origin::save_prompt_space(testsupport::small_space(4), dir.path() / "mirror");
    RunResult ingest = run("cd " + dir.path().string() + " && " + cli +
                           " corpus ingest --repo mirror --provider offline --source-dir " +
                           source + " --variants 2");
    CHECK(ingest.exit_code == 0);

    origin::Repository original = origin::load_repository(source);
    origin::Repository mirror = origin::load_repository(dir.path() / "mirror");
    REQUIRE(mirror.count() == original.count());
    for (const auto& [key, record] : original.answers)
        CHECK(mirror.find(key)->text == record.text);
}

TEST_CASE("remote ingest without an endpoint is rejected") {
    TempDir dir("cli-remote");
    origin::write_file((dir.path() / "A.txt").string(), "merge\n");
    RunResult init = run("cd " + dir.path().string() + " && " + cli +
                         " corpus init --slots A.txt --template \"write {}\" --out repo");
    REQUIRE(init.exit_code == 0);
    RunResult ingest = run("cd " + dir.path().string() + " && " + cli +
                           " corpus ingest --repo repo --provider remote --variants 1");
    CHECK(ingest.exit_code == 2);
}

TEST_CASE("invalid UTF-8 input exits with code 2") {
    TempDir dir("cli-badutf8");
    std::string bad = "int x";
    bad += static_cast<char>(0xC3); // truncated sequence
    origin::write_file((dir.path() / "bad.c").string(), bad);
    RunResult result = run("cd " + dir.path().string() + " && " + cli + " score bad.c");
    CHECK(result.exit_code == 2);
}

TEST_CASE("comparing documents shorter than min_match still reports") {
    TempDir dir("cli-tiny");
    origin::write_file((dir.path() / "tiny.c").string(), "@ $\n");
    RunResult result =
        run("cd " + dir.path().string() + " && " + cli + " compare tiny.c tiny.c --tau 0");
    CHECK(result.exit_code == 0);
    json report = json::parse(result.out);
    CHECK(report.contains("warnings"));
    CHECK(report["similarity_s"] == "1.0000"); // identical degenerate docs
}

TEST_CASE("markdown format is selectable") {
    TempDir dir("cli-md");
    origin::write_file((dir.path() / "doc.c").string(), "int main() { return 0; }\n");
    RunResult result =
        run("cd " + dir.path().string() + " && " + cli + " score doc.c --format md");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("# Originality report") != std::string::npos);
}
