#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgrank/embedding.hpp"
#include "kgrank/vec.hpp"

namespace kgrank {

struct TrainConfig {
    std::size_t dim = 128;
    int window = 5;              // context radius
    int negatives = 5;
    double learning_rate = 0.025;
    double min_learning_rate = 1e-4;
    int epochs = 5;
    std::uint64_t seed = 1;
};

// (center, context) pairs within `window` positions, in walk order.
std::vector<std::pair<int, int>> context_pairs(const std::vector<int>& walk, int window);

// Loss and gradients for one negative-sampling update:
//   L = -log sigmoid(ctx.center) - sum_n log sigmoid(-neg_n.center)
struct SkipgramPairGrad {
    double loss = 0.0;
    Vec d_center;
    Vec d_context;
    std::vector<Vec> d_negatives;
};

SkipgramPairGrad skipgram_pair_loss_grad(const Vec& center, const Vec& context,
                                         const std::vector<const Vec*>& negatives);

struct SkipgramResult {
    EmbeddingTable table;            // input vectors, one row per node seen in walks
    std::vector<double> epoch_loss;  // mean pair loss per epoch
};

// SGD on the negative-sampling objective over all context pairs of all
// walks. Noise distribution is unigram over node frequency in the walks
// raised to 0.75. Single-threaded and bitwise reproducible for a fixed seed.
// Throws std::runtime_error when the loss goes non-finite.
SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks,
                              const std::vector<std::string>& node_labels,
                              const TrainConfig& cfg);

}  // namespace kgrank
