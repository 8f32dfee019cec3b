#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgrank/embedding.hpp"
#include "kgrank/vec.hpp"

namespace kgrank {

// ---------------------------------------------------------------------------
// Prefix approximation
// ---------------------------------------------------------------------------

struct PrefixIndex {
    std::size_t min_prefix_len = 2;
    std::size_t dim = 0;
    std::vector<std::pair<std::string, Vec>> entries;  // sorted by label

    static PrefixIndex build(const EmbeddingTable& table, std::size_t min_prefix_len = 2);
};

// Mean of the embeddings sharing the longest common prefix with `term`.
// In-vocabulary terms return their exact vector; when the best prefix is
// shorter than min_prefix_len the mean of the whole vocabulary is returned.
Vec prefix_embed(std::string_view term, const PrefixIndex& index);

// ---------------------------------------------------------------------------
// Character-level LSTM regressor
// ---------------------------------------------------------------------------

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

// All trainable tensors. Doubles as the gradient container.
struct CharLstmParams {
    Matrix char_embed;              // n_chars x c_dim, row 0 = unknown char
    Matrix wi, wf, wo, wg;          // h_dim x c_dim
    Matrix ui, uf, uo, ug;          // h_dim x h_dim
    Vec bi, bf, bo, bg;             // h_dim
    Matrix proj;                    // out_dim x h_dim
    Vec proj_bias;                  // out_dim

    std::vector<std::vector<double>*> tensors();
    std::vector<const std::vector<double>*> tensors() const;
    double global_norm() const;
    void scale_all(double s);
    void add_scaled(const CharLstmParams& other, double s);
};

struct CharLstmModel {
    std::size_t c_dim = 16;
    std::size_t h_dim = 64;
    std::size_t out_dim = 0;
    std::vector<char> chars;                  // index i+1 is chars[i]; 0 = unknown
    std::unordered_map<char, int> char_index;
    CharLstmParams p;

    // Case-insensitive, consistent with label normalization.
    int index_of(char c) const;
};

// Zero-parameter model over the given character set.
CharLstmModel make_charlstm(const std::vector<char>& chars, std::size_t c_dim, std::size_t h_dim,
                            std::size_t out_dim);
// Uniform [-0.1, 0.1] init of every parameter.
void randomize_charlstm(CharLstmModel& model, std::uint64_t seed);

// Per-step activations kept for backpropagation.
struct CharLstmForwardResult {
    Vec output;
    std::vector<int> char_ids;
    std::vector<Vec> gate_i, gate_f, gate_o, gate_g;
    std::vector<Vec> cell, hidden;
};

// Single-layer LSTM over the term's characters, final hidden state affinely
// projected to out_dim. Throws std::invalid_argument on an empty term.
CharLstmForwardResult charlstm_forward(std::string_view term, const CharLstmModel& model);

enum class OovLoss { mse, cosine };

struct CharLstmLossGrad {
    double loss = 0.0;
    CharLstmParams grad;
};

// Loss against a target vector plus gradients for every parameter.
// mse: 0.5 * |y - target|^2;  cosine: 1 - cos(y, target).
CharLstmLossGrad charlstm_loss_grad(const CharLstmModel& model, std::string_view term,
                                    const Vec& target, OovLoss loss = OovLoss::mse);

struct OovTrainConfig {
    double learning_rate = 0.05;
    int epochs = 30;
    std::size_t batch_size = 8;
    double gradient_clip_norm = 1.0;
    std::uint64_t seed = 1;
    OovLoss loss = OovLoss::mse;
    std::size_t c_dim = 16;
    std::size_t h_dim = 64;
};

struct CharLstmTrainResult {
    CharLstmModel model;
    std::vector<double> epoch_loss;  // mean per-example loss
};

// Mini-batch SGD with global-norm gradient clipping; regression targets are
// the table's own vectors. Throws std::runtime_error on a non-finite loss.
CharLstmTrainResult train_charlstm(const EmbeddingTable& table, const OovTrainConfig& cfg);

// Versioned text format, lossless for doubles (shortest round-trip printing).
void save_charlstm(const CharLstmModel& model, const std::string& path);
CharLstmModel load_charlstm(const std::string& path);

// ---------------------------------------------------------------------------
// Strategy dispatch
// ---------------------------------------------------------------------------

enum class OovStrategy { prefix, charlstm };

struct OovResources {
    OovStrategy strategy = OovStrategy::prefix;
    const PrefixIndex* prefix = nullptr;
    const CharLstmModel* charlstm = nullptr;
};

// In-vocabulary terms always get their exact table vector; everything else
// goes through the configured strategy.
Vec oov_embed(const std::string& term, const EmbeddingTable& table, const OovResources& res);

}  // namespace kgrank
