#pragma once

#include <cstdint>
#include <string>

#include "kgrank/bm25.hpp"
#include "kgrank/node2vec.hpp"
#include "kgrank/oov.hpp"
#include "kgrank/skipgram.hpp"

namespace kgrank {

// Everything the CLI stages need, populated from a line-oriented
// `key = value` file with [section] headers. Unknown keys and sections are
// rejected. All stage seeds derive from the single top-level seed.
struct EngineConfig {
    // unsectioned path keys
    std::string kg_path;
    std::string corpus_path;
    std::string queries_path;
    std::string qrels_path;
    std::string embeddings_path;
    std::string model_path;       // charlstm model artifact
    std::string contextual_path;  // optional contextual token embeddings
    std::string index_dir;

    std::uint64_t seed = 42;

    // [graph_embed]
    WalkConfig walk;
    TrainConfig train;

    // [oov]
    OovStrategy oov_strategy = OovStrategy::prefix;
    std::size_t min_prefix_len = 2;
    OovTrainConfig oov_train;

    // [keywords]
    std::size_t keyword_k = 20;
    bool filter_stopwords = true;

    // [bm25]
    Bm25Params bm25;

    // [retriever]
    std::size_t run_depth = 1000;
    bool minmax_normalize = false;
    bool l2_normalize = false;
    std::string run_tag = "kgrank";

    // [evalx]
    std::size_t p_cutoff = 10;
    std::size_t ndcg_cutoff = 10;
    std::size_t r_cutoff = 1000;
    bool exponential_gain = false;
};

// Throws ConfigError (with path:line) on unknown keys/sections or bad values.
EngineConfig load_config(const std::string& path);

// `section.key` (or a bare path key) override, same validation as the file
// parser. Used for CLI --set flags.
void apply_override(EngineConfig& cfg, const std::string& dotted_key, const std::string& value);

// Stage seeds derived from cfg.seed; called automatically by load_config and
// by apply_override when the seed changes.
void derive_stage_seeds(EngineConfig& cfg);

}  // namespace kgrank
