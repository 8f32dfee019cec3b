#include "kgrank/bm25.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kgrank/errors.hpp"

namespace kgrank {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (std::isalnum(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::size_t InvertedIndex::find_doc(const std::string& doc_id) const {
    auto it = std::lower_bound(doc_ids.begin(), doc_ids.end(), doc_id);
    if (it == doc_ids.end() || *it != doc_id) return npos;
    return static_cast<std::size_t>(it - doc_ids.begin());
}

InvertedIndex build_index(const std::vector<std::pair<std::string, std::string>>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("build_index: empty corpus");

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return corpus[a].first < corpus[b].first; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (corpus[order[i - 1]].first == corpus[order[i]].first) {
            throw std::invalid_argument("build_index: duplicate doc id '" +
                                        corpus[order[i]].first + "'");
        }
    }

    InvertedIndex index;
    index.doc_ids.reserve(corpus.size());
    index.doc_lengths.reserve(corpus.size());
    long long total_len = 0;
    std::unordered_map<std::string, int> tf;  // reused per document
    for (std::size_t dense = 0; dense < order.size(); ++dense) {
        const auto& [doc_id, text] = corpus[order[dense]];
        std::vector<std::string> tokens = tokenize(text);
        index.doc_ids.push_back(doc_id);
        index.doc_lengths.push_back(static_cast<int>(tokens.size()));
        total_len += static_cast<long long>(tokens.size());

        tf.clear();
        for (std::string& t : tokens) ++tf[std::move(t)];
        for (auto& [term, count] : tf) {
            index.postings[term].push_back({dense, count});
        }
    }
    // postings stay sorted by dense index because documents were visited in
    // doc_id order
    index.avg_doc_length = static_cast<double>(total_len) / static_cast<double>(corpus.size());
    return index;
}

namespace {

double idf(const InvertedIndex& index, std::size_t df) {
    double n = static_cast<double>(index.doc_count());
    double d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

double term_weight(int tf, int doc_len, const InvertedIndex& index, const Bm25Params& params) {
    double norm_len = 1.0 - params.b + params.b * doc_len / index.avg_doc_length;
    return tf * (params.k1 + 1.0) / (tf + params.k1 * norm_len);
}

// One accumulation path shared by bm25_score and bm25_topk, so ranking all
// documents and scoring one document agree to the last bit.
double score_dense(const std::vector<std::string>& query_tokens, std::size_t dense,
                   const InvertedIndex& index, const Bm25Params& params) {
    double score = 0.0;
    for (const std::string& t : query_tokens) {
        auto it = index.postings.find(t);
        if (it == index.postings.end()) continue;
        const auto& plist = it->second;
        auto pit = std::lower_bound(plist.begin(), plist.end(), dense,
                                    [](const Posting& p, std::size_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != dense) continue;
        score += idf(index, plist.size()) *
                 term_weight(pit->tf, index.doc_lengths[dense], index, params);
    }
    return score;
}

}  // namespace

double bm25_score(const std::vector<std::string>& query_tokens, const std::string& doc_id,
                  const InvertedIndex& index, const Bm25Params& params) {
    std::size_t dense = index.find_doc(doc_id);
    if (dense == InvertedIndex::npos) {
        throw std::invalid_argument("bm25_score: unknown doc id '" + doc_id + "'");
    }
    return score_dense(query_tokens, dense, index, params);
}

std::vector<std::pair<std::string, double>> bm25_topk(const std::vector<std::string>& query_tokens,
                                                      const InvertedIndex& index,
                                                      const Bm25Params& params, std::size_t k) {
    if (k == 0) throw std::invalid_argument("bm25_topk: k must be >= 1");

    // candidates: every document holding at least one query token
    std::vector<std::size_t> candidates;
    for (const std::string& t : query_tokens) {
        auto it = index.postings.find(t);
        if (it == index.postings.end()) continue;
        for (const Posting& p : it->second) candidates.push_back(p.doc);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<std::pair<std::size_t, double>> scored;
    scored.reserve(candidates.size());
    for (std::size_t dense : candidates) {
        scored.emplace_back(dense, score_dense(query_tokens, dense, index, params));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // dense order == doc_id order
    });
    if (scored.size() > k) scored.resize(k);

    std::vector<std::pair<std::string, double>> out;
    out.reserve(scored.size());
    for (const auto& [dense, score] : scored) out.emplace_back(index.doc_ids[dense], score);
    return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kIndexMagic = "kgrank-bm25";
constexpr int kIndexVersion = 1;
}  // namespace

void save_index(const InvertedIndex& index, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write index file: " + path);
    out << kIndexMagic << ' ' << kIndexVersion << '\n';
    out << index.doc_count() << '\n';
    for (std::size_t i = 0; i < index.doc_count(); ++i) {
        out << index.doc_ids[i] << ' ' << index.doc_lengths[i] << '\n';
    }
    std::vector<const std::string*> terms;
    terms.reserve(index.postings.size());
    for (const auto& [term, plist] : index.postings) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    out << terms.size() << '\n';
    for (const std::string* term : terms) {
        const auto& plist = index.postings.at(*term);
        out << *term << ' ' << plist.size();
        for (const Posting& p : plist) out << ' ' << p.doc << ' ' << p.tf;
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

InvertedIndex load_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open index file: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kIndexMagic || version != kIndexVersion) {
        throw ParseError(path + ": not a bm25 index file (version " +
                         std::to_string(kIndexVersion) + " expected)");
    }
    std::size_t docs = 0;
    if (!(in >> docs) || docs == 0) throw ParseError(path + ": bad document count");

    InvertedIndex index;
    index.doc_ids.resize(docs);
    index.doc_lengths.resize(docs);
    long long total_len = 0;
    for (std::size_t i = 0; i < docs; ++i) {
        if (!(in >> index.doc_ids[i] >> index.doc_lengths[i])) {
            throw ParseError(path + ": truncated document table");
        }
        total_len += index.doc_lengths[i];
    }
    index.avg_doc_length = static_cast<double>(total_len) / static_cast<double>(docs);

    std::size_t terms = 0;
    if (!(in >> terms)) throw ParseError(path + ": bad term count");
    for (std::size_t i = 0; i < terms; ++i) {
        std::string term;
        std::size_t n = 0;
        if (!(in >> term >> n)) throw ParseError(path + ": truncated postings");
        std::vector<Posting> plist(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (!(in >> plist[j].doc >> plist[j].tf)) {
                throw ParseError(path + ": truncated postings for term '" + term + "'");
            }
            if (plist[j].doc >= docs) {
                throw ParseError(path + ": posting refers to unknown document");
            }
        }
        index.postings.emplace(std::move(term), std::move(plist));
    }
    return index;
}

std::vector<std::pair<std::string, std::string>> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file: " + path);
    std::vector<std::pair<std::string, std::string>> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!obj.contains("_id")) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing '_id' field");
        }
        std::string doc_id = obj["_id"].is_string() ? obj["_id"].get<std::string>()
                                                    : obj["_id"].dump();
        if (doc_id.empty() || doc_id.find_first_of(" \t") != std::string::npos) {
            // ids end up in TREC run lines and TSV artifacts
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": '_id' must be non-empty and whitespace-free");
        }
        std::string title = obj.value("title", "");
        std::string text = obj.value("text", "");
        corpus.emplace_back(std::move(doc_id),
                            title.empty() ? std::move(text) : title + " " + text);
    }
    return corpus;
}

}  // namespace kgrank
