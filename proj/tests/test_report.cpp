#include <doctest.h>

#include <json.hpp>

#include "origin/errors.hpp"
#include "origin/pairsim.hpp"
#include "origin/report.hpp"
#include "origin/search.hpp"
#include "support.hpp"

using namespace origin;
using nlohmann::json;

namespace {

SearchBudget default_budget() { return SearchBudget{}; }

ScoreReport no_cover_report(const Repository& repo, const std::string& text,
                            const TokenStream& doc) {
    Description desc = min_originality(doc, repo, default_budget());
    return make_score_report("fixture.c", doc, text, desc, repo.space, default_budget(), 7,
                             "2024-01-01T00:00:00Z");
}

} // namespace

TEST_CASE("a no-cover report carries t 0.00, originality 1.0000, no prompts") {
    Repository repo;
    repo.space = testsupport::small_space(2);
    const std::string text = "int main() { return 0; }\n";
    TokenStream doc = tokenize(text);

    std::string emitted = emit(no_cover_report(repo, text, doc), ReportFormat::Json);
    json parsed = json::parse(emitted);
    CHECK(parsed["mode"] == "score");
    CHECK(parsed["t_percent"] == "0.00");
    CHECK(parsed["originality"] == "1.0000");
    CHECK(parsed["prompts"].empty());
    CHECK(parsed["tokens"] == doc.size());
    CHECK(parsed["effort_tokens"] == doc.size());
    CHECK(parsed["budget"]["strategy"] == "greedy");
    CHECK(parsed["seed"] == 7);
}

TEST_CASE("emitting then parsing preserves field values") {
    Repository repo = testsupport::scripted_repository(testsupport::small_space(3), 1);
    auto composed = testsupport::compose_doc(repo, {AnswerKey{1, 0}}, 10, 6);
    TokenStream doc = tokenize(composed.text);
    Description desc = min_originality(doc, repo, default_budget());
    ScoreReport report = make_score_report("doc.c", doc, composed.text, desc, repo.space,
                                           default_budget(), 11, "2024-01-01T00:00:00Z");

    json parsed = json::parse(emit(report, ReportFormat::Json));
    CHECK(parsed["document"] == "doc.c");
    CHECK(parsed["seed"] == 11);
    CHECK(parsed["timestamp"] == "2024-01-01T00:00:00Z");
    REQUIRE(parsed["prompts"].size() == desc.selections.size());
    for (size_t i = 0; i < desc.selections.size(); ++i) {
        CHECK(parsed["prompts"][i]["id"] == desc.selections[i].key.prompt_id);
        CHECK(parsed["prompts"][i]["variant"] == desc.selections[i].key.variant);
        CHECK(!parsed["prompts"][i]["rendered"].get<std::string>().empty());
    }
    const double originality = std::stod(parsed["originality"].get<std::string>());
    CHECK(originality == doctest::Approx(desc.u).epsilon(1e-3));

    // spans are sorted, disjoint, and within the file
    size_t previous = 0;
    for (const auto& span : parsed["residual_spans"]) {
        const size_t begin = span[0], end = span[1];
        CHECK(begin >= previous);
        CHECK(end > begin);
        CHECK(end <= composed.text.size());
        previous = end;
    }
}

TEST_CASE("emitting the same report twice is byte-identical") {
    Repository repo = testsupport::scripted_repository(testsupport::small_space(3), 1);
    auto composed = testsupport::compose_doc(repo, {AnswerKey{0, 0}}, 7, 9);
    TokenStream doc = tokenize(composed.text);
    Description desc = min_originality(doc, repo, default_budget());
    ScoreReport report = make_score_report("doc.c", doc, composed.text, desc, repo.space,
                                           default_budget(), 7, "2024-01-01T00:00:00Z");
    CHECK(emit(report, ReportFormat::Json) == emit(report, ReportFormat::Json));
    CHECK(emit(report, ReportFormat::Markdown) == emit(report, ReportFormat::Markdown));
}

TEST_CASE("compare reports render both descriptions' prompt lists") {
    Repository repo = testsupport::scripted_repository(testsupport::small_space(4), 1);
    auto composed = testsupport::compose_doc(repo, {AnswerKey{2, 0}}, 10, 3);
    TokenStream doc = tokenize(composed.text);

    PairDocument d1{"left.c", &doc, composed.text};
    PairDocument d2{"right.c", &doc, composed.text};
    PairOptions options;
    options.tau = 0.0;
    PairResult pair = max_similarity(d1, d2, repo, default_budget(), options);
    REQUIRE(pair.s == 1.0);

    ScoreReport report = make_compare_report(d1, d2, pair, repo.space, default_budget(), 7,
                                             "2024-01-01T00:00:00Z");
    std::string markdown = emit(report, ReportFormat::Markdown);
    CHECK(markdown.find("Description 1") != std::string::npos);
    CHECK(markdown.find("Description 2") != std::string::npos);
    CHECK(markdown.find("similarity s: 1.0000") != std::string::npos);
    for (const Selection& sel : pair.desc1.selections) {
        const std::string rendered = render_prompt(repo.space, sel.key.prompt_id).rendered;
        CHECK(markdown.find(rendered) != std::string::npos);
    }

    json parsed = json::parse(emit(report, ReportFormat::Json));
    CHECK(parsed["mode"] == "compare");
    CHECK(parsed["similarity_s"] == "1.0000");
    CHECK(parsed["p_percent"] == "100.00");
    CHECK(parsed["documents"].size() == 2);
    CHECK(parsed["descriptions"].size() == 2);
}

TEST_CASE("markdown score reports quote residual excerpts") {
    Repository repo = testsupport::scripted_repository(testsupport::small_space(3), 1);
    auto composed = testsupport::compose_doc(repo, {AnswerKey{1, 0}}, 12, 4);
    TokenStream doc = tokenize(composed.text);
    Description desc = min_originality(doc, repo, default_budget());
    ScoreReport report = make_score_report("doc.c", doc, composed.text, desc, repo.space,
                                           default_budget(), 7, "2024-01-01T00:00:00Z");

    std::string markdown = emit(report, ReportFormat::Markdown);
    CHECK(markdown.find("Residual excerpts") != std::string::npos);
    CHECK(markdown.find("@") != std::string::npos); // filler text shows up
}

TEST_CASE("invalid reports never emit") {
    Repository repo;
    repo.space = testsupport::small_space(2);
    const std::string text = "int main() { return 0; }\n";
    TokenStream doc = tokenize(text);

    ScoreReport broken = no_cover_report(repo, text, doc);
    broken.docs[0].originality = 0.5; // breaks u = 1 - 0.01 t
    CHECK_THROWS_AS(emit(broken, ReportFormat::Json), Error);

    ScoreReport bad_spans = no_cover_report(repo, text, doc);
    bad_spans.docs[0].residual_spans = {{10, 20}, {5, 12}}; // overlapping, unsorted
    CHECK_THROWS_AS(emit(bad_spans, ReportFormat::Json), Error);

    ScoreReport bad_mode = no_cover_report(repo, text, doc);
    bad_mode.mode = "bogus";
    CHECK_THROWS_AS(emit(bad_mode, ReportFormat::Json), Error);

    try {
        emit(broken, ReportFormat::Json);
    } catch (const Error& error) {
        CHECK(error.code() == Errc::SchemaViolation);
    }
}

TEST_CASE("eval reports carry epsilon with three decimals") {
    ScoreReport report = make_eval_report("labels.json", 50, 0.2994, 400, 0.1, 4, 7,
                                          "2024-01-01T00:00:00Z");
    json parsed = json::parse(emit(report, ReportFormat::Json));
    CHECK(parsed["mode"] == "eval");
    CHECK(parsed["epsilon"] == "0.299");
    CHECK(parsed["items"] == 50);
    CHECK(parsed["steps"] == 400);

    std::string markdown = emit(report, ReportFormat::Markdown);
    CHECK(markdown.find("mean squared error: 0.299") != std::string::npos);
}

TEST_CASE("degenerate short documents produce a warning in the report") {
    Repository repo = testsupport::scripted_repository(testsupport::small_space(2), 1);
    const std::string text = "@ $";
    TokenStream doc = tokenize(text);
    Description desc = min_originality(doc, repo, default_budget());
    ScoreReport report = make_score_report("tiny.c", doc, text, desc, repo.space,
                                           default_budget(), 7, "2024-01-01T00:00:00Z");
    REQUIRE(!report.warnings.empty());
    json parsed = json::parse(emit(report, ReportFormat::Json));
    CHECK(parsed.contains("warnings"));
}
