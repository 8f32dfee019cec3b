#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kgrank {

// Lowercase, split on non-alphanumeric bytes, drop empties. The same pipeline
// is used for documents, queries, and keyword candidates.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::size_t doc = 0;  // dense index into doc_ids
    int tf = 0;
};

struct InvertedIndex {
    std::vector<std::string> doc_ids;  // sorted; dense index == rank here
    std::vector<int> doc_lengths;      // token counts, parallel to doc_ids
    double avg_doc_length = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings;  // sorted by doc

    std::size_t doc_count() const { return doc_ids.size(); }
    // Dense index for a doc_id, or npos when absent.
    std::size_t find_doc(const std::string& doc_id) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Tokenizes and indexes the corpus. Duplicate doc ids and an empty corpus are
// errors.
InvertedIndex build_index(const std::vector<std::pair<std::string, std::string>>& corpus);

// Okapi BM25 with the +1-smoothed IDF:
//   score = sum over query tokens t of
//           idf(t) * tf * (k1+1) / (tf + k1 * (1 - b + b * dl/avgdl))
//   idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)
// Duplicate query tokens contribute once per occurrence. Unknown doc_id is an
// error.
double bm25_score(const std::vector<std::string>& query_tokens, const std::string& doc_id,
                  const InvertedIndex& index, const Bm25Params& params);

// Only documents containing at least one query token appear; sorted by score
// descending, ties by doc_id ascending; at most k results.
std::vector<std::pair<std::string, double>> bm25_topk(const std::vector<std::string>& query_tokens,
                                                      const InvertedIndex& index,
                                                      const Bm25Params& params, std::size_t k);

// Versioned text format; round-trips the index exactly.
void save_index(const InvertedIndex& index, const std::string& path);
InvertedIndex load_index(const std::string& path);

// JSON-lines corpus with `_id`, `title`, `text` fields per line; title and
// text are concatenated with a space.
std::vector<std::pair<std::string, std::string>> load_corpus(const std::string& path);

}  // namespace kgrank
