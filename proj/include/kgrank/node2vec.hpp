#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kgrank/kg.hpp"

namespace kgrank {

struct WalkConfig {
    int walks_per_node = 10;
    int walk_length = 40;       // nodes per walk, including the start
    double return_param_p = 1.0;
    double inout_param_q = 1.0;
    std::uint64_t seed = 1;
};

// `prev` sentinel for the first step of a walk.
inline constexpr int kWalkStart = -1;

// Second-order bias over the neighbors of `curr`: 1/p back to `prev`, 1 to
// nodes adjacent to `prev`, 1/q otherwise. All 1 at the walk start.
// Throws std::invalid_argument when `curr` has no neighbors.
std::vector<std::pair<int, double>> transition_weights(int prev, int curr,
                                                       const KnowledgeGraph& graph,
                                                       const WalkConfig& cfg);

// walks_per_node walks from every non-isolated node, ordered by start node
// then walk index. Each walk owns a seed derived from (cfg.seed, node, walk
// index), so the output is reproducible and independent of scheduling.
std::vector<std::vector<int>> generate_walks(const KnowledgeGraph& graph, const WalkConfig& cfg);

}  // namespace kgrank
