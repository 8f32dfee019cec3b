#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgrank/bm25.hpp"
#include "kgrank/embedding.hpp"
#include "kgrank/evalx.hpp"
#include "kgrank/keywords.hpp"
#include "kgrank/kg.hpp"
#include "kgrank/oov.hpp"
#include "kgrank/vec.hpp"

namespace kgrank {

// Keyword tokens of one document resolved to vectors (concept embedding when
// the keyword links to an embedded concept, OOV embedding otherwise).
struct DocKeywordEmbeddings {
    std::string doc_id;
    std::vector<std::pair<std::string, Vec>> vectors;
};

struct QueryEmbedding {
    std::string query_id;
    std::vector<std::string> tokens;
    std::vector<Vec> vectors;  // one per token
};

struct ScoredDoc {
    std::string doc_id;
    double kg_score = 0.0;
    std::optional<double> bm25_score;  // engaged iff the doc holds >= 1 query token
    double fused = 0.0;
};

struct RankedRun {
    std::map<std::string, std::vector<ScoredDoc>> queries;

    EvalRun doc_lists() const;
};

// Sum over query vectors of the maximum dot product against the keyword
// vectors. Empty keyword set scores 0 (the document is unreachable through
// this branch).
double maxsim_score(const QueryEmbedding& q, const DocKeywordEmbeddings& d);

// Which keyword vector maximized each query token, for inspection output.
struct MaxSimMatch {
    std::string query_token;
    std::string keyword;
    double score = 0.0;
};
std::vector<MaxSimMatch> maxsim_explain(const QueryEmbedding& q, const DocKeywordEmbeddings& d);

// Tokenize, drop stopwords (when the filter is on), then per token prefer the
// linked concept's embedding and fall back to the OOV strategy. Throws
// std::invalid_argument("empty query...") when nothing survives the filter.
QueryEmbedding embed_query(const std::string& query_id, const std::string& text,
                           const KnowledgeGraph& graph, const EmbeddingTable& table,
                           const OovResources& oov, bool filter_stopwords = true);

// Piecewise score fusion: docs scored by both branches add them; docs seen by
// only one branch keep that branch's score (kg_score reported as 0 for
// BM25-only docs). Optional per-query min-max normalization of each branch
// before adding (all-equal branches map to 1). Result sorted by fused
// descending, doc_id ascending.
std::vector<ScoredDoc> fuse(const std::map<std::string, double>& kg_scores,
                            const std::map<std::string, double>& bm25_candidates,
                            bool minmax_normalize = false);

// Resolve a document's keywords to vectors; concept link first, then OOV.
DocKeywordEmbeddings resolve_keywords(const KeywordSet& keywords, const KnowledgeGraph& graph,
                                      const EmbeddingTable& table, const OovResources& oov);

// Immutable state for retrieval; safe to share across queries.
struct Engine {
    KnowledgeGraph graph;
    EmbeddingTable table;
    InvertedIndex index;
    Bm25Params bm25;
    std::map<std::string, KeywordSet> keywords;
    std::map<std::string, DocKeywordEmbeddings> doc_vectors;  // docs with >= 1 keyword vector
    OovStrategy strategy = OovStrategy::prefix;
    PrefixIndex prefix;
    CharLstmModel charlstm;
    bool filter_stopwords = true;
    bool minmax_normalize = false;

    OovResources oov() const { return {strategy, &prefix, &charlstm}; }
};

// MaxSim against every keyworded document, BM25 candidates at run_depth,
// fused and truncated to run_depth.
std::vector<ScoredDoc> retrieve(const Engine& engine, const std::string& query_text,
                                std::size_t run_depth);

// TREC run format: `query_id Q0 doc_id rank score tag`, scores at 6 decimals.
void save_run(const RankedRun& run, const std::string& path, const std::string& tag);
RankedRun load_run(const std::string& path);

// Index-time artifacts (keyword sets and their resolved vectors).
void save_keyword_sets(const std::map<std::string, KeywordSet>& sets, const std::string& path);
std::map<std::string, KeywordSet> load_keyword_sets(const std::string& path);
void save_doc_vectors(const std::map<std::string, DocKeywordEmbeddings>& docs,
                      const std::string& path);
std::map<std::string, DocKeywordEmbeddings> load_doc_vectors(const std::string& path);

}  // namespace kgrank
