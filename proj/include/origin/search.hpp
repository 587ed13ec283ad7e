#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "origin/corpus.hpp"
#include "origin/detector.hpp"

namespace origin {

enum class Strategy { Exhaustive, Greedy, Beam };
enum class VariantPolicy { All, First };

const char* strategy_name(Strategy s);
const char* variant_policy_name(VariantPolicy p);
Strategy parse_strategy(const std::string& name);          // InvalidArgument on unknown
VariantPolicy parse_variant_policy(const std::string& name);

struct SearchBudget {
    int z = 2;              // max prompts per description
    int L = 16;             // max rendered-prompt token length
    int min_match = 4;      // tiling threshold
    Strategy strategy = Strategy::Greedy;
    int beam_width = 8;
    VariantPolicy variant_policy = VariantPolicy::All;
    size_t exhaustive_cap = 2'000'000; // refuse larger enumerations
};

struct Selection {
    AnswerKey key;
    size_t prompt_tokens = 0; // length_tokens of the rendered prompt
};

// A description of the document: selected prompts plus the residual original
// contribution left uncovered by their answers.
struct Description {
    std::vector<Selection> selections;
    TokenStream residual;
    CoverageMap coverage;
    double u = 1.0;     // |residual| / |doc|, exact
    size_t effort = 0;  // sum of prompt tokens + |residual|
    bool degenerate_short_doc = false;
};

// Chooses at most z prompts (distinct (prompt, variant) pairs) minimizing u.
// Exhaustive enumerates every subset and is optimal for the detector; greedy
// adds the best marginal candidate per round; beam keeps beam_width partial
// selections. Documents shorter than min_match score u = 1.0 with the
// degenerate flag set instead of failing.
Description min_originality(const TokenStream& doc, const Repository& repo,
                            const SearchBudget& budget);

// e(D) recomputed from the description's own fields.
size_t effort_of(const Description& desc);

// Near-minimal descriptions for pair similarity: every state the configured
// strategies evaluated whose u is within tau of the minimum, best-u first,
// capped. Includes a full exhaustive sweep when the subset count is small.
std::vector<Description> candidate_descriptions(const TokenStream& doc,
                                                const Repository& repo,
                                                const SearchBudget& budget,
                                                double tau, size_t cap = 64);

} // namespace origin
