#include "origin/search.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "origin/errors.hpp"

namespace origin {

namespace {

struct Candidate {
    AnswerKey key;
    size_t prompt_tokens = 0;
    const TokenStream* answer = nullptr;
};

// Prompts longer than L are excluded before any strategy runs.
std::vector<Candidate> eligible_candidates(const Repository& repo, const SearchBudget& budget) {
    std::vector<Candidate> out;
    const size_t space_size = repo.space.size();
    std::vector<size_t> prompt_tokens(space_size, 0);
    std::vector<bool> prompt_ok(space_size, false);

    for (const auto& [key, record] : repo.answers) {
        if (budget.variant_policy == VariantPolicy::First && key.variant != 0) continue;
        if (!prompt_ok[key.prompt_id]) {
            PromptSpec spec = render_prompt(repo.space, key.prompt_id);
            prompt_tokens[key.prompt_id] = spec.length_tokens;
            prompt_ok[key.prompt_id] = true;
        }
        if (prompt_tokens[key.prompt_id] > static_cast<size_t>(budget.L)) continue;
        out.push_back(Candidate{key, prompt_tokens[key.prompt_id], &record.tokens});
    }
    return out;
}

size_t coverage_of(const TokenStream& doc, const std::vector<Candidate>& candidates,
                   const std::vector<size_t>& picked, int min_match) {
    std::vector<TiledSource> sources;
    sources.reserve(picked.size());
    for (size_t index : picked) {
        const Candidate& c = candidates[index];
        sources.push_back(TiledSource{SourceKey{static_cast<int32_t>(c.key.prompt_id),
                                                static_cast<int32_t>(c.key.variant)},
                                      c.answer});
    }
    return similarity_against(doc, sources, min_match).coverage.covered_count();
}

struct LightState {
    std::vector<size_t> picked; // candidate indices, ascending
    size_t covered = 0;
};

// (covered desc, fewer selections, lexicographically smaller keys) is the
// total order every strategy reduces with.
bool state_better(const LightState& a, const LightState& b,
                  const std::vector<Candidate>& candidates) {
    if (a.covered != b.covered) return a.covered > b.covered;
    if (a.picked.size() != b.picked.size()) return a.picked.size() < b.picked.size();
    for (size_t i = 0; i < a.picked.size(); ++i) {
        const AnswerKey& ka = candidates[a.picked[i]].key;
        const AnswerKey& kb = candidates[b.picked[i]].key;
        if (ka != kb) return ka < kb;
    }
    return false;
}

using StateSink = std::function<void(const LightState&)>;

void run_exhaustive(const TokenStream& doc, const std::vector<Candidate>& candidates,
                    const SearchBudget& budget, const StateSink& sink) {
    const size_t n = candidates.size();

    size_t total = 1; // empty selection
    size_t choose = 1;
    for (int k = 1; k <= budget.z && static_cast<size_t>(k) <= n; ++k) {
        choose = choose * (n - static_cast<size_t>(k) + 1) / static_cast<size_t>(k);
        total += choose;
        if (total > budget.exhaustive_cap)
            raise(Errc::BudgetTooLarge,
                  "exhaustive enumeration exceeds cap of " + std::to_string(budget.exhaustive_cap) +
                      " selections");
    }

    LightState empty;
    sink(empty);

    std::vector<size_t> picked;
    auto recurse = [&](auto&& self, size_t start, int remaining) -> void {
        if (remaining == 0) return;
        for (size_t i = start; i < n; ++i) {
            picked.push_back(i);
            LightState state{picked, coverage_of(doc, candidates, picked, budget.min_match)};
            sink(state);
            self(self, i + 1, remaining - 1);
            picked.pop_back();
        }
    };
    recurse(recurse, 0, budget.z);
}

void run_greedy(const TokenStream& doc, const std::vector<Candidate>& candidates,
                const SearchBudget& budget, const StateSink& sink) {
    LightState current;
    sink(current);

    std::vector<bool> used(candidates.size(), false);
    for (int round = 0; round < budget.z; ++round) {
        bool found = false;
        LightState round_best;
        for (size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            std::vector<size_t> trial = current.picked;
            trial.insert(std::lower_bound(trial.begin(), trial.end(), i), i);
            LightState state{std::move(trial), 0};
            state.covered = coverage_of(doc, candidates, state.picked, budget.min_match);
            sink(state);
            // Candidates are iterated in ascending key order, so strictly
            // greater coverage implements the (lower id, lower variant) tie.
            if (!found || state.covered > round_best.covered) {
                round_best = std::move(state);
                found = true;
            }
        }
        if (!found || round_best.covered <= current.covered) break; // no marginal gain
        for (size_t i : round_best.picked) used[i] = true;
        current = std::move(round_best);
    }
}

void run_beam(const TokenStream& doc, const std::vector<Candidate>& candidates,
              const SearchBudget& budget, const StateSink& sink) {
    LightState empty;
    sink(empty);

    std::vector<LightState> beam{empty};
    std::map<std::vector<size_t>, bool> seen;
    seen[empty.picked] = true;

    for (int round = 0; round < budget.z; ++round) {
        std::vector<LightState> expansions;
        for (const LightState& state : beam) {
            for (size_t i = 0; i < candidates.size(); ++i) {
                if (std::binary_search(state.picked.begin(), state.picked.end(), i)) continue;
                std::vector<size_t> trial = state.picked;
                trial.insert(std::lower_bound(trial.begin(), trial.end(), i), i);
                if (seen.count(trial)) continue;
                seen[trial] = true;
                LightState next{std::move(trial), 0};
                next.covered = coverage_of(doc, candidates, next.picked, budget.min_match);
                sink(next);
                expansions.push_back(std::move(next));
            }
        }
        if (expansions.empty()) break;
        std::sort(expansions.begin(), expansions.end(),
                  [&](const LightState& a, const LightState& b) {
                      return state_better(a, b, candidates);
                  });
        if (expansions.size() > static_cast<size_t>(budget.beam_width))
            expansions.resize(static_cast<size_t>(budget.beam_width));
        beam = std::move(expansions);
    }
}

void run_strategy(const TokenStream& doc, const std::vector<Candidate>& candidates,
                  const SearchBudget& budget, const StateSink& sink) {
    switch (budget.strategy) {
        case Strategy::Exhaustive: run_exhaustive(doc, candidates, budget, sink); return;
        case Strategy::Greedy: run_greedy(doc, candidates, budget, sink); return;
        case Strategy::Beam: run_beam(doc, candidates, budget, sink); return;
    }
}

Description materialize(const TokenStream& doc, const std::vector<Candidate>& candidates,
                        const LightState& state, const SearchBudget& budget,
                        bool degenerate) {
    Description desc;
    desc.degenerate_short_doc = degenerate;

    std::vector<TiledSource> sources;
    for (size_t index : state.picked) {
        const Candidate& c = candidates[index];
        desc.selections.push_back(Selection{c.key, c.prompt_tokens});
        sources.push_back(TiledSource{SourceKey{static_cast<int32_t>(c.key.prompt_id),
                                                static_cast<int32_t>(c.key.variant)},
                                      c.answer});
    }

    SimilarityResult sim = similarity_against(doc, sources, budget.min_match);
    desc.coverage = std::move(sim.coverage);
    desc.residual = residual(doc, desc.coverage);
    desc.u = static_cast<double>(desc.residual.size()) / static_cast<double>(doc.size());
    desc.effort = effort_of(desc);
    return desc;
}

} // namespace

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Exhaustive: return "exhaustive";
        case Strategy::Greedy: return "greedy";
        case Strategy::Beam: return "beam";
    }
    return "unknown";
}

const char* variant_policy_name(VariantPolicy p) {
    return p == VariantPolicy::All ? "all" : "first";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "exhaustive") return Strategy::Exhaustive;
    if (name == "greedy") return Strategy::Greedy;
    if (name == "beam") return Strategy::Beam;
    raise(Errc::InvalidArgument, "unknown strategy: " + name);
}

VariantPolicy parse_variant_policy(const std::string& name) {
    if (name == "all") return VariantPolicy::All;
    if (name == "first") return VariantPolicy::First;
    raise(Errc::InvalidArgument, "unknown variant policy: " + name);
}

Description min_originality(const TokenStream& doc, const Repository& repo,
                            const SearchBudget& budget) {
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");
    if (budget.z < 0 || budget.L < 1 || budget.beam_width < 1 || budget.min_match < 1)
        raise(Errc::InvalidArgument, "invalid search budget");

    std::vector<Candidate> candidates = eligible_candidates(repo, budget);

    const bool degenerate = doc.size() < static_cast<size_t>(budget.min_match);
    if (degenerate || candidates.empty() || budget.z == 0)
        return materialize(doc, candidates, LightState{}, budget, degenerate);

    LightState best;
    bool have_best = false;
    run_strategy(doc, candidates, budget, [&](const LightState& state) {
        if (!have_best || state_better(state, best, candidates)) {
            best = state;
            have_best = true;
        }
    });
    return materialize(doc, candidates, best, budget, false);
}

size_t effort_of(const Description& desc) {
    size_t prompt_total = 0;
    for (const Selection& sel : desc.selections) prompt_total += sel.prompt_tokens;
    return prompt_total + desc.residual.size();
}

std::vector<Description> candidate_descriptions(const TokenStream& doc,
                                                const Repository& repo,
                                                const SearchBudget& budget,
                                                double tau, size_t cap) {
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");
    if (tau < 0.0) raise(Errc::InvalidArgument, "tau must be >= 0");

    std::vector<Candidate> candidates = eligible_candidates(repo, budget);
    std::map<std::vector<size_t>, size_t> states; // picked -> covered

    auto sink = [&](const LightState& state) { states.emplace(state.picked, state.covered); };

    const bool degenerate = doc.size() < static_cast<size_t>(budget.min_match);
    if (degenerate || candidates.empty() || budget.z == 0) {
        return {materialize(doc, candidates, LightState{}, budget, degenerate)};
    }

    // Every strategy contributes its evaluated states; a full sweep is added
    // whenever the subset count is small enough to afford.
    SearchBudget local = budget;
    local.strategy = Strategy::Greedy;
    run_strategy(doc, candidates, local, sink);
    local.strategy = Strategy::Beam;
    run_strategy(doc, candidates, local, sink);

    size_t subsets = 1, choose = 1;
    const size_t n = candidates.size();
    for (int k = 1; k <= budget.z && static_cast<size_t>(k) <= n; ++k) {
        choose = choose * (n - static_cast<size_t>(k) + 1) / static_cast<size_t>(k);
        subsets += choose;
        if (subsets > 4096) break;
    }
    if (subsets <= 4096) {
        local.strategy = Strategy::Exhaustive;
        run_strategy(doc, candidates, local, sink);
    }

    const double doc_tokens = static_cast<double>(doc.size());
    double best_u = 1.0;
    for (const auto& [picked, covered] : states)
        best_u = std::min(best_u, (doc_tokens - static_cast<double>(covered)) / doc_tokens);

    std::vector<LightState> kept;
    for (const auto& [picked, covered] : states) {
        double u = (doc_tokens - static_cast<double>(covered)) / doc_tokens;
        if (u <= best_u + tau + 1e-12) kept.push_back(LightState{picked, covered});
    }
    std::sort(kept.begin(), kept.end(), [&](const LightState& a, const LightState& b) {
        return state_better(a, b, candidates);
    });
    if (kept.size() > cap) kept.resize(cap);

    std::vector<Description> out;
    out.reserve(kept.size());
    for (const LightState& state : kept)
        out.push_back(materialize(doc, candidates, state, budget, false));
    return out;
}

} // namespace origin
