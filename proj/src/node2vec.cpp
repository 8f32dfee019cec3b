#include "kgrank/node2vec.hpp"

#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "kgrank/rng.hpp"

namespace kgrank {

std::vector<std::pair<int, double>> transition_weights(int prev, int curr,
                                                       const KnowledgeGraph& graph,
                                                       const WalkConfig& cfg) {
    const auto& neigh = graph.neighbors(curr);
    if (neigh.empty()) {
        throw std::invalid_argument("transition_weights: node '" + graph.label(curr) +
                                    "' has no neighbors");
    }
    std::vector<std::pair<int, double>> out;
    out.reserve(neigh.size());
    for (int x : neigh) {
        double w = 1.0;
        if (prev != kWalkStart) {
            if (x == prev) {
                w = 1.0 / cfg.return_param_p;
            } else if (!graph.adjacent(x, prev)) {
                w = 1.0 / cfg.inout_param_q;
            }
        }
        out.emplace_back(x, w);
    }
    return out;
}

namespace {

// Cumulative weights for one (prev, curr) context. Cached only for
// high-degree nodes; low-degree contexts are cheap to recompute.
constexpr std::size_t kCacheDegreeThreshold = 64;

std::vector<double> cumulative(const std::vector<std::pair<int, double>>& weights) {
    std::vector<double> cum(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i].second;
        cum[i] = total;
    }
    return cum;
}

int sample_next(int prev, int curr, const KnowledgeGraph& graph, const WalkConfig& cfg,
                SplitMix64& rng,
                std::unordered_map<std::uint64_t, std::vector<double>>& cache) {
    const auto& neigh = graph.neighbors(curr);
    auto weights = transition_weights(prev, curr, graph, cfg);

    const std::vector<double>* cum = nullptr;
    std::vector<double> local;
    if (neigh.size() >= kCacheDegreeThreshold) {
        std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(prev)) << 32) |
                            static_cast<std::uint32_t>(curr);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, cumulative(weights)).first;
        cum = &it->second;
    } else {
        local = cumulative(weights);
        cum = &local;
    }

    double r = rng.next_double() * cum->back();
    std::size_t i = 0;
    while (i + 1 < cum->size() && r >= (*cum)[i]) ++i;
    return weights[i].first;
}

}  // namespace

std::vector<std::vector<int>> generate_walks(const KnowledgeGraph& graph, const WalkConfig& cfg) {
    if (graph.concept_count() == 0) throw std::invalid_argument("generate_walks: empty graph");

    std::vector<std::vector<int>> walks;
    std::unordered_map<std::uint64_t, std::vector<double>> cache;
    for (int node = 0; node < graph.concept_count(); ++node) {
        if (graph.is_isolated(node)) continue;
        for (int w = 0; w < cfg.walks_per_node; ++w) {
            SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(node),
                                    static_cast<std::uint64_t>(w)));
            std::vector<int> walk;
            walk.reserve(cfg.walk_length);
            walk.push_back(node);
            int prev = kWalkStart;
            while (static_cast<int>(walk.size()) < cfg.walk_length) {
                int curr = walk.back();
                if (graph.is_isolated(curr)) break;
                int next = sample_next(prev, curr, graph, cfg, rng, cache);
                prev = curr;
                walk.push_back(next);
            }
            walks.push_back(std::move(walk));
        }
    }
    return walks;
}

}  // namespace kgrank
