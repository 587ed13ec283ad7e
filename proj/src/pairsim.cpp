#include "origin/pairsim.hpp"

#include <algorithm>

#include "origin/detector.hpp"
#include "origin/errors.hpp"

namespace origin {

namespace {

bool selections_less(const Description& a, const Description& b) {
    const size_t n = std::min(a.selections.size(), b.selections.size());
    for (size_t i = 0; i < n; ++i) {
        if (a.selections[i].key != b.selections[i].key)
            return a.selections[i].key < b.selections[i].key;
    }
    return a.selections.size() < b.selections.size();
}

} // namespace

std::string serialize_description(const Description& desc, const PromptSpace& space,
                                  std::string_view doc_source) {
    std::vector<Selection> ordered = desc.selections;
    std::sort(ordered.begin(), ordered.end(),
              [](const Selection& a, const Selection& b) { return a.key < b.key; });

    std::string out;
    for (const Selection& sel : ordered) {
        out += render_prompt(space, sel.key.prompt_id).rendered;
        out += ' ';
        out += kDescriptionSentinel;
        out += ' ';
    }
    if (ordered.empty()) {
        out += kDescriptionSentinel;
        out += ' ';
    }

    bool first = true;
    for (const Token& token : desc.residual.tokens) {
        if (!first) out += ' ';
        first = false;
        out.append(doc_source.substr(token.begin, token.end - token.begin));
    }
    return out;
}

PairResult max_similarity(const PairDocument& doc1, const PairDocument& doc2,
                          const Repository& repo, const SearchBudget& budget,
                          const PairOptions& options) {
    std::vector<Description> side1 =
        candidate_descriptions(*doc1.tokens, repo, budget, options.tau, options.candidate_cap);
    std::vector<Description> side2 =
        candidate_descriptions(*doc2.tokens, repo, budget, options.tau, options.candidate_cap);

    // Serializations are compared with literal normalization: abstracting
    // identifiers would collapse every prompt to the same token run and make
    // the score degenerate.
    const NormalizationProfile profile = NormalizationProfile::literal();
    auto streams_of = [&](const std::vector<Description>& side, std::string_view source) {
        std::vector<TokenStream> streams;
        streams.reserve(side.size());
        for (const Description& desc : side)
            streams.push_back(tokenize(serialize_description(desc, repo.space, source), profile));
        return streams;
    };
    const std::vector<TokenStream> streams1 = streams_of(side1, doc1.source_text);
    const std::vector<TokenStream> streams2 = streams_of(side2, doc2.source_text);

    PairResult result;
    result.tau = options.tau;
    result.candidates_considered = side1.size() * side2.size();

    bool have_best = false;
    size_t best_i = 0, best_j = 0;
    for (size_t i = 0; i < side1.size(); ++i) {
        for (size_t j = 0; j < side2.size(); ++j) {
            const double p = pair_similarity(streams1[i], streams2[j], budget.min_match);
            bool better = false;
            if (!have_best || p > result.p) {
                better = true;
            } else if (p == result.p) {
                const double u_sum = side1[i].u + side2[j].u;
                const double best_u_sum = side1[best_i].u + side2[best_j].u;
                if (u_sum < best_u_sum) {
                    better = true;
                } else if (u_sum == best_u_sum) {
                    if (selections_less(side1[i], side1[best_i]) ||
                        (!selections_less(side1[best_i], side1[i]) &&
                         selections_less(side2[j], side2[best_j])))
                        better = true;
                }
            }
            if (better) {
                result.p = p;
                best_i = i;
                best_j = j;
                have_best = true;
            }
        }
    }

    result.desc1 = side1[best_i];
    result.desc2 = side2[best_j];
    result.s = 0.01 * result.p;
    return result;
}

} // namespace origin
