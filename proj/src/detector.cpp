#include "origin/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "origin/errors.hpp"

namespace origin {

namespace {

// Interns (kind, text) pairs so tiling compares int ids.
class TokenInterner {
public:
    std::vector<int32_t> intern(const TokenStream& stream) {
        std::vector<int32_t> ids;
        ids.reserve(stream.size());
        for (const Token& token : stream.tokens) {
            std::string key;
            key.reserve(token.text.size() + 1);
            key.push_back(static_cast<char>(token.kind));
            key.append(token.text);
            auto [it, inserted] = map_.emplace(std::move(key), next_);
            if (inserted) ++next_;
            ids.push_back(it->second);
        }
        return ids;
    }

private:
    std::unordered_map<std::string, int32_t> map_;
    int32_t next_ = 0;
};

struct Match {
    uint32_t length = 0;
    uint32_t doc_start = 0;
    size_t source_order = 0; // index into key-sorted source order
    uint32_t src_start = 0;

    bool better_than(const Match& other) const {
        if (length != other.length) return length > other.length;
        if (doc_start != other.doc_start) return doc_start < other.doc_start;
        if (source_order != other.source_order) return source_order < other.source_order;
        return src_start < other.src_start;
    }
};

struct TilingState {
    std::vector<int32_t> doc_ids;
    std::vector<std::vector<int32_t>> src_ids;
    std::vector<bool> doc_covered;
    std::vector<std::vector<bool>> src_covered;
    // per source: token id -> positions
    std::vector<std::unordered_map<int32_t, std::vector<uint32_t>>> positions;
};

CoverageMap run_tiling(const TokenStream& doc, std::span<const TiledSource> sources,
                       int min_match) {
    TilingState state;
    TokenInterner interner;
    state.doc_ids = interner.intern(doc);
    const size_t n = state.doc_ids.size();
    state.doc_covered.assign(n, false);

    // Tie-break requires visiting sources in ascending key order.
    std::vector<size_t> order(sources.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return sources[a].key < sources[b].key;
    });

    state.src_ids.resize(sources.size());
    state.src_covered.resize(sources.size());
    state.positions.resize(sources.size());
    for (size_t s = 0; s < sources.size(); ++s) {
        state.src_ids[s] = interner.intern(*sources[s].stream);
        state.src_covered[s].assign(state.src_ids[s].size(), false);
        for (uint32_t j = 0; j < state.src_ids[s].size(); ++j)
            state.positions[s][state.src_ids[s][j]].push_back(j);
    }

    CoverageMap map;
    map.doc_token_count = n;
    map.covered.assign(n, false);

    for (;;) {
        Match best;
        for (size_t rank = 0; rank < order.size(); ++rank) {
            const size_t s = order[rank];
            const auto& src = state.src_ids[s];
            const auto& src_cov = state.src_covered[s];
            for (uint32_t i = 0; i < n; ++i) {
                if (state.doc_covered[i]) continue;
                if (best.length > 0 && i + best.length > n) break;
                auto pos_it = state.positions[s].find(state.doc_ids[i]);
                if (pos_it == state.positions[s].end()) continue;
                for (uint32_t j : pos_it->second) {
                    if (src_cov[j]) continue;
                    uint32_t k = 0;
                    while (i + k < n && j + k < src.size() &&
                           !state.doc_covered[i + k] && !src_cov[j + k] &&
                           state.doc_ids[i + k] == src[j + k])
                        ++k;
                    Match candidate{k, i, rank, j};
                    if (candidate.better_than(best)) best = candidate;
                }
            }
        }
        if (best.length < static_cast<uint32_t>(min_match)) break;

        const size_t s = order[best.source_order];
        for (uint32_t k = 0; k < best.length; ++k) {
            state.doc_covered[best.doc_start + k] = true;
            state.src_covered[s][best.src_start + k] = true;
            map.covered[best.doc_start + k] = true;
        }
        map.tiles.push_back(Tile{best.doc_start, best.src_start, best.length, sources[s].key});
    }

    std::sort(map.tiles.begin(), map.tiles.end(),
              [](const Tile& a, const Tile& b) { return a.doc_start < b.doc_start; });
    return map;
}

bool stream_less(const TokenStream& a, const TokenStream& b) {
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        const Token& ta = a.tokens[i];
        const Token& tb = b.tokens[i];
        if (ta.kind != tb.kind) return ta.kind < tb.kind;
        if (ta.text != tb.text) return ta.text < tb.text;
    }
    return a.size() < b.size();
}

} // namespace

size_t CoverageMap::covered_count() const {
    return static_cast<size_t>(std::count(covered.begin(), covered.end(), true));
}

double round2(double value) {
    return std::floor(value * 100.0 + 0.5) / 100.0;
}

SimilarityResult similarity_against(const TokenStream& doc,
                                    std::span<const TiledSource> sources,
                                    int min_match) {
    if (doc.empty()) raise(Errc::EmptyDocument, "document has no tokens");
    if (min_match < 1) raise(Errc::InvalidArgument, "min_match must be >= 1");

    SimilarityResult result;
    result.coverage = run_tiling(doc, sources, min_match);
    result.t_percent = round2(100.0 * static_cast<double>(result.coverage.covered_count()) /
                              static_cast<double>(doc.size()));
    return result;
}

TokenStream residual(const TokenStream& doc, const CoverageMap& coverage) {
    if (coverage.doc_token_count != doc.size() || coverage.covered.size() != doc.size())
        raise(Errc::CoverageMismatch, "coverage map does not belong to this document");

    TokenStream out;
    out.source_len_bytes = doc.source_len_bytes;
    out.profile = doc.profile;
    for (size_t i = 0; i < doc.size(); ++i)
        if (!coverage.covered[i]) out.tokens.push_back(doc.tokens[i]);
    return out;
}

double pair_similarity(const TokenStream& a, const TokenStream& b, int min_match) {
    if (a.empty() || b.empty()) raise(Errc::EmptyInput, "pair similarity needs two non-empty streams");
    if (min_match < 1) raise(Errc::InvalidArgument, "min_match must be >= 1");

    // The identity p(x, x) = 100 must hold for any non-empty x, so streams
    // shorter than min_match clamp the effective threshold.
    const size_t shorter = std::min(a.size(), b.size());
    const int effective = static_cast<int>(std::min<size_t>(static_cast<size_t>(min_match), shorter));

    // Canonical orientation keeps the score exactly symmetric.
    const TokenStream* doc = &a;
    const TokenStream* src = &b;
    if (stream_less(*src, *doc)) std::swap(doc, src);

    TiledSource peer{SourceKey::peer(), src};
    CoverageMap map = run_tiling(*doc, std::span<const TiledSource>(&peer, 1), effective);
    const double tiled = static_cast<double>(map.covered_count());
    return round2(100.0 * 2.0 * tiled / static_cast<double>(a.size() + b.size()));
}

} // namespace origin
