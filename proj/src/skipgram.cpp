#include "kgrank/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgrank/rng.hpp"

namespace kgrank {

std::vector<std::pair<int, int>> context_pairs(const std::vector<int>& walk, int window) {
    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(walk.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - window);
        int hi = std::min(n - 1, i + window);
        for (int j = lo; j <= hi; ++j) {
            if (j == i) continue;
            pairs.emplace_back(walk[i], walk[j]);
        }
    }
    return pairs;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log sigmoid(x), stable for large |x|
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

}  // namespace

SkipgramPairGrad skipgram_pair_loss_grad(const Vec& center, const Vec& context,
                                         const std::vector<const Vec*>& negatives) {
    SkipgramPairGrad g;
    g.d_center.assign(center.size(), 0.0);
    g.d_context.assign(context.size(), 0.0);

    double z = dot(context, center);
    g.loss = -log_sigmoid(z);
    double coef = sigmoid(z) - 1.0;  // dL/dz
    axpy(coef, context, g.d_center);
    g.d_context = center;
    scale(g.d_context, coef);

    g.d_negatives.reserve(negatives.size());
    for (const Vec* neg : negatives) {
        double zn = dot(*neg, center);
        g.loss -= log_sigmoid(-zn);
        double cn = sigmoid(zn);  // dL/dzn
        axpy(cn, *neg, g.d_center);
        Vec dn = center;
        scale(dn, cn);
        g.d_negatives.push_back(std::move(dn));
    }
    return g;
}

SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks,
                              const std::vector<std::string>& node_labels,
                              const TrainConfig& cfg) {
    if (walks.empty()) throw std::invalid_argument("train_skipgram: no walks");
    if (cfg.dim < 2) throw std::invalid_argument("train_skipgram: dim must be >= 2");

    // vocabulary: nodes seen in the walks, in node-id order
    std::vector<std::int64_t> count(node_labels.size(), 0);
    for (const auto& walk : walks) {
        for (int node : walk) count.at(static_cast<std::size_t>(node)) += 1;
    }
    std::vector<int> vocab;  // node ids
    std::vector<int> slot(node_labels.size(), -1);
    for (std::size_t n = 0; n < count.size(); ++n) {
        if (count[n] > 0) {
            slot[n] = static_cast<int>(vocab.size());
            vocab.push_back(static_cast<int>(n));
        }
    }

    // noise distribution: frequency^0.75, sampled through the cumulative sums
    std::vector<double> noise_cum(vocab.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        total += std::pow(static_cast<double>(count[vocab[i]]), 0.75);
        noise_cum[i] = total;
    }

    const std::size_t dim = cfg.dim;
    std::vector<Vec> syn0(vocab.size(), Vec(dim, 0.0));
    std::vector<Vec> syn1(vocab.size(), Vec(dim, 0.0));
    SplitMix64 init_rng(derive_seed(cfg.seed, "init"));
    const double bound = 0.5 / static_cast<double>(dim);
    for (auto& row : syn0) {
        for (double& x : row) x = init_rng.uniform(-bound, bound);
    }

    std::size_t pairs_per_epoch = 0;
    for (const auto& walk : walks) pairs_per_epoch += context_pairs(walk, cfg.window).size();
    const double total_updates =
        static_cast<double>(pairs_per_epoch) * std::max(1, cfg.epochs);

    SplitMix64 noise_rng(derive_seed(cfg.seed, "negatives"));
    auto sample_noise = [&]() {
        double r = noise_rng.next_double() * total;
        auto it = std::upper_bound(noise_cum.begin(), noise_cum.end(), r);
        std::size_t i = static_cast<std::size_t>(it - noise_cum.begin());
        if (i >= vocab.size()) i = vocab.size() - 1;
        return static_cast<int>(i);
    };

    SkipgramResult result;
    result.epoch_loss.reserve(cfg.epochs);
    std::size_t processed = 0;
    std::vector<const Vec*> neg_ptrs;
    std::vector<int> neg_slots;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t loss_n = 0;
        for (const auto& walk : walks) {
            for (auto [center, context] : context_pairs(walk, cfg.window)) {
                double lr = cfg.learning_rate *
                            (1.0 - static_cast<double>(processed) / total_updates);
                lr = std::max(lr, cfg.min_learning_rate);
                ++processed;

                int c_slot = slot[center];
                int o_slot = slot[context];
                neg_ptrs.clear();
                neg_slots.clear();
                for (int k = 0; k < cfg.negatives; ++k) {
                    int ns = sample_noise();
                    if (ns == o_slot) continue;  // never contrast a word with itself
                    neg_slots.push_back(ns);
                    neg_ptrs.push_back(&syn1[ns]);
                }

                SkipgramPairGrad g =
                    skipgram_pair_loss_grad(syn0[c_slot], syn1[o_slot], neg_ptrs);
                if (!std::isfinite(g.loss)) {
                    throw std::runtime_error(
                        "train_skipgram: non-finite loss at epoch " + std::to_string(epoch) +
                        "; lower the learning rate");
                }
                loss_sum += g.loss;
                ++loss_n;

                axpy(-lr, g.d_center, syn0[c_slot]);
                axpy(-lr, g.d_context, syn1[o_slot]);
                for (std::size_t k = 0; k < neg_slots.size(); ++k) {
                    axpy(-lr, g.d_negatives[k], syn1[neg_slots[k]]);
                }
            }
        }
        result.epoch_loss.push_back(loss_n == 0 ? 0.0 : loss_sum / static_cast<double>(loss_n));
    }

    EmbeddingTable table(dim);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        table.insert(node_labels[vocab[i]], syn0[i]);
    }
    result.table = std::move(table);
    return result;
}

}  // namespace kgrank
