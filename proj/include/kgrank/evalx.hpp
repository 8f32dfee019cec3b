#pragma once

#include <map>
#include <string>
#include <vector>

namespace kgrank {

// query_id -> doc_id -> relevance grade (>= 0)
using Qrels = std::map<std::string, std::map<std::string, int>>;

// query_id -> doc ids in rank order
using EvalRun = std::map<std::string, std::vector<std::string>>;

// Tab-separated `query-id<TAB>corpus-id<TAB>score` with an optional header
// line (detected by a non-integer score field). Duplicate pairs are an error.
Qrels load_qrels(const std::string& path);

struct MetricResult {
    std::map<std::string, double> per_query;
    double macro = 0.0;
};

// Queries are the qrels queries; a query missing from the run scores 0.
// Reciprocal rank of the first doc with grade > 0, at full run depth.
// Throws std::invalid_argument when run and qrels share no query.
MetricResult mrr(const EvalRun& run, const Qrels& qrels);

// |top-k docs with grade > 0| / k (always divided by k).
MetricResult precision_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k);

// DCG@k = sum grade_i / log2(i+1) over run order; IDCG@k over the query's
// grades sorted descending; 0 when IDCG is 0. Exponential gain (2^grade - 1)
// behind the flag; default is the linear trec_eval convention.
MetricResult ndcg_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k,
                       bool exponential_gain = false);

// |relevant in top-k| / |relevant overall|; queries with no relevant doc are
// skipped entirely.
MetricResult recall_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k);

struct MetricsReport {
    MetricResult mrr;
    MetricResult p_at_k;
    MetricResult ndcg_at_k;
    MetricResult r_at_k;
    std::size_t p_cutoff = 10;
    std::size_t ndcg_cutoff = 10;
    std::size_t r_cutoff = 1000;
};

MetricsReport evaluate(const EvalRun& run, const Qrels& qrels, std::size_t p_k,
                       std::size_t ndcg_k, std::size_t r_k, bool exponential_gain = false);

// One row of macro-averages with metric names as column headers.
std::string format_report_table(const MetricsReport& report, const std::string& run_name);

// One JSON object per line: {"metric": ..., "query_id": ..., "value": ...};
// macro averages use query_id "all".
std::string format_report_jsonl(const MetricsReport& report);

}  // namespace kgrank
