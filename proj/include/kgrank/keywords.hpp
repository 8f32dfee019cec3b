#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgrank/vec.hpp"

namespace kgrank {

struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
};

// Per-token vectors plus one summary vector for the whole document.
struct TokenEmbeddingDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::vector<Vec> token_vectors;  // same length as tokens
    Vec summary_vector;
    std::size_t dim = 0;
};

struct Keyword {
    std::string token;
    double score = 0.0;
};

struct KeywordSet {
    std::string doc_id;
    std::vector<Keyword> keywords;  // scores non-increasing, tokens unique
};

// Built-in English stopword list (~150 words, lowercase).
const std::unordered_set<std::string>& stopword_set();
bool is_stopword(const std::string& token);

// Cosine of each token vector against the summary vector; duplicate token
// strings keep their maximum score; stopwords are dropped when the filter is
// on; top k by score, ties broken by earlier document position. An empty
// token list yields an empty set.
KeywordSet extract_keywords(const TokenEmbeddingDoc& doc, std::size_t k,
                            bool filter_stopwords = true);

// Summary surrogate when no contextual encoder output is available: embed
// every token with the supplied function (tokens it cannot embed are dropped)
// and use the mean of the token vectors as the summary vector.
// Throws std::invalid_argument when no token is embeddable.
TokenEmbeddingDoc centroid_summary(const TokenizedDoc& doc,
                                   const std::function<std::optional<Vec>(const std::string&)>& embed);

// Contextual-embedding file: per document a header `#doc <doc_id> <n> <dim>`,
// one `S <f...>` summary row, then n rows `T <token> <f...>`. Doubles are
// written in shortest round-trip form, so a round trip is lossless.
void save_contextual_embeddings(const std::map<std::string, TokenEmbeddingDoc>& docs,
                                const std::string& path);
std::map<std::string, TokenEmbeddingDoc> load_contextual_embeddings(const std::string& path);

}  // namespace kgrank
