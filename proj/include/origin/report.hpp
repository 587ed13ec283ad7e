#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "origin/pairsim.hpp"
#include "origin/search.hpp"

namespace origin {

enum class ReportFormat { Json, Markdown };
ReportFormat parse_report_format(const std::string& name);

struct PromptEntry {
    uint32_t id = 0;
    uint32_t variant = 0;
    std::string rendered;
    size_t tokens = 0;
};

struct DocBlock {
    std::string document;
    size_t tokens = 0;
    double t_percent = 0.0;
    double originality = 1.0;
    size_t effort_tokens = 0;
    std::vector<PromptEntry> prompts;
    std::vector<std::pair<size_t, size_t>> residual_spans; // byte ranges, sorted
    std::vector<std::string> residual_excerpts;            // up to 10, for markdown
};

struct BudgetEcho {
    int z = 2;
    int L = 16;
    int min_match = 4;
    std::string strategy = "greedy";
    int beam_width = 8;
    std::string variant_policy = "all";
};

struct ScoreReport {
    std::string version;
    std::string mode; // "score" | "compare" | "eval"
    std::vector<DocBlock> docs;
    std::optional<double> similarity_s;
    std::optional<double> p_percent;
    std::optional<double> tau;
    std::optional<double> epsilon;
    std::optional<size_t> eval_items;
    std::string labels_path;
    std::optional<int> steps;
    std::optional<double> learning_rate;
    BudgetEcho budget;
    uint64_t seed = 7;
    std::string timestamp;
    std::vector<std::string> warnings;
};

DocBlock make_doc_block(const std::string& name, const TokenStream& doc,
                        std::string_view doc_source, const Description& desc,
                        const PromptSpace& space);

ScoreReport make_score_report(const std::string& name, const TokenStream& doc,
                              std::string_view doc_source, const Description& desc,
                              const PromptSpace& space, const SearchBudget& budget,
                              uint64_t seed, const std::string& timestamp);

ScoreReport make_compare_report(const PairDocument& doc1, const PairDocument& doc2,
                                const PairResult& pair, const PromptSpace& space,
                                const SearchBudget& budget, uint64_t seed,
                                const std::string& timestamp);

ScoreReport make_eval_report(const std::string& labels_path, size_t items, double epsilon,
                             int steps, double learning_rate, int min_match,
                             uint64_t seed, const std::string& timestamp);

// Throws SchemaViolation; called by emit, so invalid reports never reach disk.
void validate_report(const ScoreReport& report);

// JSON output is canonical: sorted keys, fixed-decimal score strings.
// Emitting the same report twice yields byte-identical text.
std::string emit(const ScoreReport& report, ReportFormat format);

} // namespace origin
