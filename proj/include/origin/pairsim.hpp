#pragma once

#include <string>
#include <string_view>

#include "origin/search.hpp"

namespace origin {

// Separates prompt segments and the residual inside a serialized description.
// Tokenizes to a single punct token that real code never produces.
inline constexpr char kDescriptionSentinel = '\x1f';

struct PairOptions {
    double tau = 0.05;        // originality slack for candidate descriptions
    size_t candidate_cap = 64;
};

struct PairDocument {
    std::string name;
    const TokenStream* tokens = nullptr;
    std::string_view source_text; // needed to reconstruct residual spans
};

struct PairResult {
    double s = 0.0;  // 0.01 * p
    double p = 0.0;  // pair similarity percentage of the winning pair
    Description desc1, desc2;
    size_t candidates_considered = 0; // cross-product size
    double tau = 0.0;
};

// Canonical text form of a description: rendered prompts sorted by
// (prompt_id, variant) joined by the sentinel, then the sentinel, then the
// residual reconstructed from its spans.
std::string serialize_description(const Description& desc, const PromptSpace& space,
                                  std::string_view doc_source);

// Maximizes s = 0.01 * pair_similarity over near-minimal descriptions of both
// documents (u within tau of each side's minimum).
PairResult max_similarity(const PairDocument& doc1, const PairDocument& doc2,
                          const Repository& repo, const SearchBudget& budget,
                          const PairOptions& options = {});

} // namespace origin
