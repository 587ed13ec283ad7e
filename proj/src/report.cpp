#include "origin/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "origin/detector.hpp"
#include "origin/errors.hpp"
#include "origin/version.hpp"

namespace origin {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string excerpt_of(std::string_view source, size_t begin, size_t end) {
    constexpr size_t kMaxExcerpt = 120;
    std::string text(source.substr(begin, std::min(end - begin, kMaxExcerpt)));
    if (end - begin > kMaxExcerpt) text += "...";
    return text;
}

json doc_block_json(const DocBlock& block) {
    json prompts = json::array();
    for (const PromptEntry& entry : block.prompts) {
        prompts.push_back({
            {"id", entry.id},
            {"variant", entry.variant},
            {"rendered", entry.rendered},
            {"tokens", entry.tokens},
        });
    }
    json spans = json::array();
    for (const auto& [begin, end] : block.residual_spans)
        spans.push_back(json::array({begin, end}));

    return json{
        {"document", block.document},
        {"tokens", block.tokens},
        {"t_percent", fixed(block.t_percent, 2)},
        {"originality", fixed(block.originality, 4)},
        {"effort_tokens", block.effort_tokens},
        {"prompts", prompts},
        {"residual_spans", spans},
    };
}

json budget_json(const BudgetEcho& budget) {
    return json{
        {"z", budget.z},
        {"l", budget.L},
        {"min_match", budget.min_match},
        {"strategy", budget.strategy},
        {"beam_width", budget.beam_width},
        {"variant_policy", budget.variant_policy},
    };
}

void render_doc_markdown(std::ostringstream& out, const DocBlock& block) {
    out << "- document: `" << block.document << "`\n";
    out << "- tokens: " << block.tokens << "\n";
    out << "- similarity t: " << fixed(block.t_percent, 2) << "%\n";
    out << "- originality u: " << fixed(block.originality, 4) << "\n";
    out << "- effort e: " << block.effort_tokens << " tokens\n";
    out << "- prompts:\n";
    if (block.prompts.empty()) out << "  - (none)\n";
    for (const PromptEntry& entry : block.prompts)
        out << "  - [" << entry.id << "/" << entry.variant << "] \"" << entry.rendered
            << "\" (" << entry.tokens << " tokens)\n";
}

} // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "md" || name == "markdown") return ReportFormat::Markdown;
    raise(Errc::InvalidArgument, "unknown report format: " + name);
}

DocBlock make_doc_block(const std::string& name, const TokenStream& doc,
                        std::string_view doc_source, const Description& desc,
                        const PromptSpace& space) {
    DocBlock block;
    block.document = name;
    block.tokens = doc.size();
    const size_t covered = desc.coverage.covered_count();
    block.t_percent = round2(100.0 * static_cast<double>(covered) / static_cast<double>(doc.size()));
    block.originality = desc.u;
    block.effort_tokens = desc.effort;

    for (const Selection& sel : desc.selections) {
        PromptEntry entry;
        entry.id = sel.key.prompt_id;
        entry.variant = sel.key.variant;
        entry.rendered = render_prompt(space, sel.key.prompt_id).rendered;
        entry.tokens = sel.prompt_tokens;
        block.prompts.push_back(std::move(entry));
    }

    // Maximal uncovered runs, as byte spans into the original document.
    size_t i = 0;
    while (i < doc.size()) {
        if (desc.coverage.covered[i]) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < doc.size() && !desc.coverage.covered[j + 1]) ++j;
        block.residual_spans.emplace_back(doc.tokens[i].begin, doc.tokens[j].end);
        i = j + 1;
    }
    for (const auto& [begin, end] : block.residual_spans) {
        if (block.residual_excerpts.size() == 10) break;
        block.residual_excerpts.push_back(excerpt_of(doc_source, begin, end));
    }
    return block;
}

ScoreReport make_score_report(const std::string& name, const TokenStream& doc,
                              std::string_view doc_source, const Description& desc,
                              const PromptSpace& space, const SearchBudget& budget,
                              uint64_t seed, const std::string& timestamp) {
    ScoreReport report;
    report.version = kVersion;
    report.mode = "score";
    report.docs.push_back(make_doc_block(name, doc, doc_source, desc, space));
    report.budget = BudgetEcho{budget.z, budget.L, budget.min_match,
                               strategy_name(budget.strategy), budget.beam_width,
                               variant_policy_name(budget.variant_policy)};
    report.seed = seed;
    report.timestamp = timestamp;
    if (desc.degenerate_short_doc)
        report.warnings.push_back("document shorter than min_match; originality fixed at 1.0");
    return report;
}

ScoreReport make_compare_report(const PairDocument& doc1, const PairDocument& doc2,
                                const PairResult& pair, const PromptSpace& space,
                                const SearchBudget& budget, uint64_t seed,
                                const std::string& timestamp) {
    ScoreReport report;
    report.version = kVersion;
    report.mode = "compare";
    report.docs.push_back(make_doc_block(doc1.name, *doc1.tokens, doc1.source_text, pair.desc1, space));
    report.docs.push_back(make_doc_block(doc2.name, *doc2.tokens, doc2.source_text, pair.desc2, space));
    report.similarity_s = pair.s;
    report.p_percent = pair.p;
    report.tau = pair.tau;
    report.budget = BudgetEcho{budget.z, budget.L, budget.min_match,
                               strategy_name(budget.strategy), budget.beam_width,
                               variant_policy_name(budget.variant_policy)};
    report.seed = seed;
    report.timestamp = timestamp;
    if (pair.desc1.degenerate_short_doc || pair.desc2.degenerate_short_doc)
        report.warnings.push_back("document shorter than min_match; originality fixed at 1.0");
    return report;
}

ScoreReport make_eval_report(const std::string& labels_path, size_t items, double epsilon,
                             int steps, double learning_rate, int min_match,
                             uint64_t seed, const std::string& timestamp) {
    ScoreReport report;
    report.version = kVersion;
    report.mode = "eval";
    report.labels_path = labels_path;
    report.eval_items = items;
    report.epsilon = epsilon;
    report.steps = steps;
    report.learning_rate = learning_rate;
    report.budget.min_match = min_match;
    report.seed = seed;
    report.timestamp = timestamp;
    return report;
}

void validate_report(const ScoreReport& report) {
    auto fail = [](const std::string& why) { raise(Errc::SchemaViolation, "invalid report: " + why); };

    if (report.version.empty()) fail("missing version");
    if (report.timestamp.empty()) fail("missing timestamp");
    if (report.mode != "score" && report.mode != "compare" && report.mode != "eval")
        fail("unknown mode " + report.mode);

    if (report.mode == "score" && report.docs.size() != 1) fail("score mode needs one document");
    if (report.mode == "compare") {
        if (report.docs.size() != 2) fail("compare mode needs two documents");
        if (!report.similarity_s || !report.p_percent) fail("compare mode needs similarity_s");
        if (*report.similarity_s < 0.0 || *report.similarity_s > 1.0) fail("similarity_s out of range");
        if (std::abs(*report.similarity_s - 0.01 * *report.p_percent) > 1e-9)
            fail("similarity_s must equal 0.01 * p");
    }
    if (report.mode == "eval") {
        if (!report.epsilon || !report.eval_items) fail("eval mode needs epsilon and items");
        if (*report.epsilon < 0.0 || *report.epsilon > 1.0) fail("epsilon out of range");
        return;
    }

    for (const DocBlock& block : report.docs) {
        if (block.document.empty()) fail("missing document name");
        if (block.tokens == 0) fail("document with zero tokens");
        if (block.t_percent < 0.0 || block.t_percent > 100.0) fail("t out of range");
        if (block.originality < 0.0 || block.originality > 1.0) fail("originality out of range");
        if (std::abs(block.originality - (1.0 - 0.01 * block.t_percent)) > 0.0001)
            fail("originality does not match 1 - 0.01 * t");
        size_t previous_end = 0;
        bool first = true;
        for (const auto& [begin, end] : block.residual_spans) {
            if (end <= begin) fail("empty residual span");
            if (!first && begin < previous_end) fail("residual spans overlap or are unsorted");
            previous_end = end;
            first = false;
        }
    }
}

std::string emit(const ScoreReport& report, ReportFormat format) {
    validate_report(report);

    if (format == ReportFormat::Json) {
        json doc;
        doc["version"] = report.version;
        doc["mode"] = report.mode;
        doc["seed"] = report.seed;
        doc["timestamp"] = report.timestamp;
        if (!report.warnings.empty()) doc["warnings"] = report.warnings;

        if (report.mode == "score") {
            const DocBlock& block = report.docs.front();
            json block_json = doc_block_json(block);
            for (auto& [key, value] : block_json.items()) doc[key] = value;
            doc["budget"] = budget_json(report.budget);
        } else if (report.mode == "compare") {
            doc["documents"] = json::array({report.docs[0].document, report.docs[1].document});
            doc["tokens"] = json::array({report.docs[0].tokens, report.docs[1].tokens});
            doc["similarity_s"] = fixed(*report.similarity_s, 4);
            doc["p_percent"] = fixed(*report.p_percent, 2);
            doc["tau"] = fixed(*report.tau, 4);
            doc["descriptions"] = json::array({doc_block_json(report.docs[0]),
                                               doc_block_json(report.docs[1])});
            doc["budget"] = budget_json(report.budget);
        } else {
            doc["labels"] = report.labels_path;
            doc["items"] = *report.eval_items;
            doc["epsilon"] = fixed(*report.epsilon, 3);
            doc["steps"] = *report.steps;
            doc["learning_rate"] = fixed(*report.learning_rate, 4);
            doc["min_match"] = report.budget.min_match;
        }
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    if (report.mode == "score") {
        const DocBlock& block = report.docs.front();
        out << "# Originality report\n\n";
        render_doc_markdown(out, block);
        for (const std::string& warning : report.warnings)
            out << "- warning: " << warning << "\n";
        out << "\n## Residual excerpts\n\n";
        if (block.residual_excerpts.empty()) out << "(no residual)\n";
        size_t index = 0;
        for (const std::string& text : block.residual_excerpts) {
            const auto& span = block.residual_spans[index++];
            out << "- bytes " << span.first << ".." << span.second << ":\n\n";
            out << "```\n" << text << "\n```\n";
        }
    } else if (report.mode == "compare") {
        out << "# Similarity report\n\n";
        out << "- similarity s: " << fixed(*report.similarity_s, 4) << "\n";
        out << "- pair percentage p: " << fixed(*report.p_percent, 2) << "%\n";
        out << "- tau: " << fixed(*report.tau, 4) << "\n\n";
        out << "## Description 1\n\n";
        render_doc_markdown(out, report.docs[0]);
        out << "\n## Description 2\n\n";
        render_doc_markdown(out, report.docs[1]);
    } else {
        out << "# Policy evaluation\n\n";
        out << "- labels: `" << report.labels_path << "`\n";
        out << "- items: " << *report.eval_items << "\n";
        out << "- mean squared error: " << fixed(*report.epsilon, 3) << "\n";
        out << "- steps per item: " << *report.steps << "\n";
    }
    out << "\n---\nseed " << report.seed << " | strategy " << report.budget.strategy
        << " | generated " << report.timestamp << " | v" << report.version << "\n";
    return out.str();
}

} // namespace origin
