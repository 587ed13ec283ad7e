#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "origin/lexer.hpp"

namespace origin {

// Identifies where a tile's source text came from. prompt_id < 0 marks the
// peer document in pairwise mode.
struct SourceKey {
    int32_t prompt_id = -1;
    int32_t variant = -1;

    auto operator<=>(const SourceKey&) const = default;
    static SourceKey peer() { return {-1, -1}; }
};

struct Tile {
    uint32_t doc_start = 0;
    uint32_t src_start = 0;
    uint32_t length = 0;
    SourceKey source;
};

struct CoverageMap {
    size_t doc_token_count = 0;
    std::vector<Tile> tiles;
    std::vector<bool> covered; // exactly the union of tile doc-ranges

    size_t covered_count() const;
};

struct TiledSource {
    SourceKey key;
    const TokenStream* stream = nullptr;
};

struct SimilarityResult {
    double t_percent = 0.0; // 2-decimal, round-half-up
    CoverageMap coverage;
};

// Round-half-up to 2 decimals; all reported percentages go through this.
double round2(double value);

// Greedy string tiling of doc against every source: repeatedly take the
// longest common token run (>= min_match) between uncovered doc positions and
// uncovered positions of any source. Ties break on (earlier doc_start, lower
// source key, lower src_start). t = 100 * covered / doc tokens.
SimilarityResult similarity_against(const TokenStream& doc,
                                    std::span<const TiledSource> sources,
                                    int min_match);

// Uncovered tokens of doc, order and spans preserved.
TokenStream residual(const TokenStream& doc, const CoverageMap& coverage);

// Symmetric Dice-style score: 100 * 2C / (|a| + |b|) with C the tiled token
// count of greedy tiling between a and b. Exactly symmetric in its arguments.
double pair_similarity(const TokenStream& a, const TokenStream& b, int min_match);

} // namespace origin
