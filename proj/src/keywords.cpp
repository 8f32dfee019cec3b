#include "kgrank/keywords.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "kgrank/errors.hpp"

namespace kgrank {

KeywordSet extract_keywords(const TokenEmbeddingDoc& doc, std::size_t k, bool filter_stopwords) {
    if (k == 0) throw std::invalid_argument("extract_keywords: k must be >= 1");
    if (doc.tokens.size() != doc.token_vectors.size()) {
        throw std::invalid_argument("extract_keywords: token/vector count mismatch in doc " +
                                    doc.doc_id);
    }

    KeywordSet out;
    out.doc_id = doc.doc_id;
    if (doc.tokens.empty()) return out;

    struct Candidate {
        double score;
        std::size_t position;  // earliest occurrence attaining the max score
    };
    std::unordered_map<std::string, Candidate> best;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        const std::string& tok = doc.tokens[i];
        if (filter_stopwords && is_stopword(tok)) continue;
        double score = cosine(doc.token_vectors[i], doc.summary_vector);
        auto [it, inserted] = best.emplace(tok, Candidate{score, i});
        if (!inserted && score > it->second.score) it->second = Candidate{score, i};
    }

    std::vector<std::pair<std::string, Candidate>> ranked(best.begin(), best.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.score != b.second.score) return a.second.score > b.second.score;
        return a.second.position < b.second.position;
    });
    if (ranked.size() > k) ranked.resize(k);
    out.keywords.reserve(ranked.size());
    for (auto& [tok, cand] : ranked) out.keywords.push_back({std::move(tok), cand.score});
    return out;
}

TokenEmbeddingDoc centroid_summary(
    const TokenizedDoc& doc,
    const std::function<std::optional<Vec>(const std::string&)>& embed) {
    TokenEmbeddingDoc out;
    out.doc_id = doc.doc_id;
    for (const std::string& tok : doc.tokens) {
        std::optional<Vec> v = embed(tok);
        if (!v) continue;
        if (out.dim == 0) {
            out.dim = v->size();
        } else if (v->size() != out.dim) {
            throw std::invalid_argument("centroid_summary: embedding dim mismatch for token '" +
                                        tok + "' in doc " + doc.doc_id);
        }
        out.tokens.push_back(tok);
        out.token_vectors.push_back(std::move(*v));
    }
    if (out.tokens.empty()) {
        throw std::invalid_argument("centroid_summary: no embeddable tokens in doc " + doc.doc_id);
    }
    out.summary_vector.assign(out.dim, 0.0);
    for (const Vec& v : out.token_vectors) axpy(1.0, v, out.summary_vector);
    scale(out.summary_vector, 1.0 / static_cast<double>(out.token_vectors.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Contextual-embedding file
// ---------------------------------------------------------------------------

namespace {

void write_vector(std::ostream& out, const Vec& v) {
    char buf[64];
    for (double x : v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), x);
        out << ' ';
        out.write(buf, res.ptr - buf);
    }
    out << '\n';
}

Vec parse_vector(std::istringstream& ss, std::size_t dim, const std::string& path,
                 std::size_t lineno) {
    Vec v;
    v.reserve(dim);
    std::string field;
    while (ss >> field) {
        double x = 0.0;
        auto res = std::from_chars(field.data(), field.data() + field.size(), x);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
        }
        v.push_back(x);
    }
    if (v.size() != dim) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(dim) + " components, found " + std::to_string(v.size()));
    }
    return v;
}

}  // namespace

void save_contextual_embeddings(const std::map<std::string, TokenEmbeddingDoc>& docs,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write contextual embeddings: " + path);
    for (const auto& [doc_id, doc] : docs) {
        if (doc.tokens.size() != doc.token_vectors.size()) {
            throw std::invalid_argument("save_contextual_embeddings: token/vector mismatch in " +
                                        doc_id);
        }
        out << "#doc " << doc_id << ' ' << doc.tokens.size() << ' ' << doc.dim << '\n';
        out << "S";
        write_vector(out, doc.summary_vector);
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            out << "T " << doc.tokens[i];
            write_vector(out, doc.token_vectors[i]);
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, TokenEmbeddingDoc> load_contextual_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open contextual embeddings: " + path);

    std::map<std::string, TokenEmbeddingDoc> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream hs(line);
        std::string tag;
        hs >> tag;
        if (tag != "#doc") {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected '#doc' header");
        }
        TokenEmbeddingDoc doc;
        std::size_t n_tokens = 0;
        if (!(hs >> doc.doc_id >> n_tokens >> doc.dim)) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad '#doc' header");
        }

        if (!std::getline(in, line)) {
            throw ParseError(path + ":" + std::to_string(lineno + 1) + ": missing summary row");
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        ss >> tag;
        if (tag != "S") {
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing summary row");
        }
        doc.summary_vector = parse_vector(ss, doc.dim, path, lineno);

        for (std::size_t i = 0; i < n_tokens; ++i) {
            if (!std::getline(in, line)) {
                throw ParseError(path + ":" + std::to_string(lineno + 1) +
                                 ": expected " + std::to_string(n_tokens) + " token rows, found " +
                                 std::to_string(i));
            }
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream ts(line);
            std::string token;
            ts >> tag >> token;
            if (tag != "T" || token.empty()) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'T <token>' row");
            }
            doc.tokens.push_back(token);
            doc.token_vectors.push_back(parse_vector(ts, doc.dim, path, lineno));
        }

        if (!docs.emplace(doc.doc_id, std::move(doc)).second) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate doc id");
        }
    }
    return docs;
}

}  // namespace kgrank
