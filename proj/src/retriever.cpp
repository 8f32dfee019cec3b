#include "kgrank/retriever.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kgrank/errors.hpp"

namespace kgrank {

EvalRun RankedRun::doc_lists() const {
    EvalRun out;
    for (const auto& [qid, docs] : queries) {
        std::vector<std::string>& ids = out[qid];
        ids.reserve(docs.size());
        for (const ScoredDoc& d : docs) ids.push_back(d.doc_id);
    }
    return out;
}

double maxsim_score(const QueryEmbedding& q, const DocKeywordEmbeddings& d) {
    if (d.vectors.empty()) return 0.0;
    double total = 0.0;
    for (const Vec& qv : q.vectors) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [token, dv] : d.vectors) {
            best = std::max(best, dot(qv, dv));
        }
        total += best;
    }
    return total;
}

std::vector<MaxSimMatch> maxsim_explain(const QueryEmbedding& q, const DocKeywordEmbeddings& d) {
    std::vector<MaxSimMatch> matches;
    if (d.vectors.empty()) return matches;
    matches.reserve(q.tokens.size());
    for (std::size_t i = 0; i < q.vectors.size(); ++i) {
        MaxSimMatch m;
        m.query_token = q.tokens[i];
        m.score = -std::numeric_limits<double>::infinity();
        for (const auto& [token, dv] : d.vectors) {
            double s = dot(q.vectors[i], dv);
            if (s > m.score) {
                m.score = s;
                m.keyword = token;
            }
        }
        matches.push_back(std::move(m));
    }
    return matches;
}

QueryEmbedding embed_query(const std::string& query_id, const std::string& text,
                           const KnowledgeGraph& graph, const EmbeddingTable& table,
                           const OovResources& oov, bool filter_stopwords) {
    QueryEmbedding qe;
    qe.query_id = query_id;
    for (std::string& tok : tokenize(text)) {
        if (filter_stopwords && is_stopword(tok)) continue;
        qe.tokens.push_back(std::move(tok));
    }
    if (qe.tokens.empty()) {
        throw std::invalid_argument("empty query after tokenization/stopword filter: '" + text +
                                    "'");
    }
    qe.vectors.reserve(qe.tokens.size());
    for (const std::string& tok : qe.tokens) {
        const Vec* concept_vec = nullptr;
        if (std::optional<int> cid = link_term(tok, graph)) {
            concept_vec = table.find(graph.label(*cid));
        }
        qe.vectors.push_back(concept_vec ? *concept_vec : oov_embed(tok, table, oov));
    }
    return qe;
}

namespace {

std::map<std::string, double> minmax_branch(const std::map<std::string, double>& scores) {
    std::map<std::string, double> out;
    if (scores.empty()) return out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [doc, s] : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    for (const auto& [doc, s] : scores) {
        out[doc] = hi > lo ? (s - lo) / (hi - lo) : 1.0;
    }
    return out;
}

}  // namespace

std::vector<ScoredDoc> fuse(const std::map<std::string, double>& kg_scores,
                            const std::map<std::string, double>& bm25_candidates,
                            bool minmax_normalize) {
    std::map<std::string, double> kg_store, bm_store;
    if (minmax_normalize) {
        kg_store = minmax_branch(kg_scores);
        bm_store = minmax_branch(bm25_candidates);
    }
    const auto& kg_use = minmax_normalize ? kg_store : kg_scores;
    const auto& bm_use = minmax_normalize ? bm_store : bm25_candidates;

    std::vector<ScoredDoc> out;
    out.reserve(kg_use.size() + bm_use.size());
    for (const auto& [doc, s] : kg_use) {
        ScoredDoc sd;
        sd.doc_id = doc;
        sd.kg_score = s;
        auto it = bm_use.find(doc);
        if (it != bm_use.end()) {
            sd.bm25_score = it->second;
            sd.fused = s + it->second;
        } else {
            sd.fused = s;
        }
        out.push_back(std::move(sd));
    }
    for (const auto& [doc, s] : bm_use) {
        if (kg_use.count(doc)) continue;
        ScoredDoc sd;
        sd.doc_id = doc;
        sd.kg_score = 0.0;
        sd.bm25_score = s;
        sd.fused = s;
        out.push_back(std::move(sd));
    }
    std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.fused != b.fused) return a.fused > b.fused;
        return a.doc_id < b.doc_id;
    });
    return out;
}

DocKeywordEmbeddings resolve_keywords(const KeywordSet& keywords, const KnowledgeGraph& graph,
                                      const EmbeddingTable& table, const OovResources& oov) {
    DocKeywordEmbeddings out;
    out.doc_id = keywords.doc_id;
    out.vectors.reserve(keywords.keywords.size());
    for (const Keyword& kw : keywords.keywords) {
        const Vec* concept_vec = nullptr;
        if (std::optional<int> cid = link_term(kw.token, graph)) {
            concept_vec = table.find(graph.label(*cid));
        }
        out.vectors.emplace_back(kw.token,
                                 concept_vec ? *concept_vec : oov_embed(kw.token, table, oov));
    }
    return out;
}

std::vector<ScoredDoc> retrieve(const Engine& engine, const std::string& query_text,
                                std::size_t run_depth) {
    if (run_depth == 0) throw std::invalid_argument("retrieve: run_depth must be >= 1");
    QueryEmbedding qe = embed_query("", query_text, engine.graph, engine.table, engine.oov(),
                                    engine.filter_stopwords);

    std::map<std::string, double> kg_scores;
    for (const auto& [doc_id, dke] : engine.doc_vectors) {
        if (dke.vectors.empty()) continue;
        kg_scores[doc_id] = maxsim_score(qe, dke);
    }

    // BM25 sees the full token stream; the stopword filter only guards the
    // embedding branch.
    std::map<std::string, double> bm25_scores;
    for (auto& [doc_id, score] : bm25_topk(tokenize(query_text), engine.index, engine.bm25,
                                           run_depth)) {
        bm25_scores.emplace(std::move(doc_id), score);
    }

    std::vector<ScoredDoc> fused = fuse(kg_scores, bm25_scores, engine.minmax_normalize);
    if (fused.size() > run_depth) fused.resize(run_depth);
    return fused;
}

// ---------------------------------------------------------------------------
// Run files
// ---------------------------------------------------------------------------

void save_run(const RankedRun& run, const std::string& path, const std::string& tag) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write run file: " + path);
    char buf[64];
    for (const auto& [qid, docs] : run.queries) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f", docs[i].fused);
            out << qid << " Q0 " << docs[i].doc_id << ' ' << i + 1 << ' ' << buf << ' ' << tag
                << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

RankedRun load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open run file: " + path);
    RankedRun run;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, q0, doc_id, tag;
        long rank = 0;
        double score = 0.0;
        if (!(ss >> qid >> q0 >> doc_id >> rank >> score >> tag)) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected `qid Q0 docid rank score tag`");
        }
        ScoredDoc sd;
        sd.doc_id = doc_id;
        sd.fused = score;
        run.queries[qid].push_back(std::move(sd));
    }
    return run;
}

// ---------------------------------------------------------------------------
// Index-time artifacts
// ---------------------------------------------------------------------------

namespace {

void write_double(std::ostream& out, double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
}

double parse_double_field(const std::string& field, const std::string& path, std::size_t lineno) {
    double x = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), x);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
    }
    return x;
}

}  // namespace

void save_keyword_sets(const std::map<std::string, KeywordSet>& sets, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write keyword file: " + path);
    out << "kgrank-keywords 1\n";
    for (const auto& [doc_id, set] : sets) {
        for (const Keyword& kw : set.keywords) {
            out << doc_id << '\t' << kw.token << '\t';
            write_double(out, kw.score);
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, KeywordSet> load_keyword_sets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open keyword file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("kgrank-keywords 1", 0) != 0) {
        throw ParseError(path + ":1: not a keyword file");
    }
    std::map<std::string, KeywordSet> sets;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected `doc_id<TAB>token<TAB>score`");
        }
        std::string doc_id = line.substr(0, t1);
        std::string token = line.substr(t1 + 1, t2 - t1 - 1);
        double score = parse_double_field(line.substr(t2 + 1), path, lineno);
        KeywordSet& set = sets[doc_id];
        set.doc_id = doc_id;
        set.keywords.push_back({std::move(token), score});
    }
    return sets;
}

void save_doc_vectors(const std::map<std::string, DocKeywordEmbeddings>& docs,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write doc-vector file: " + path);
    out << "kgrank-docvecs 1\n";
    for (const auto& [doc_id, dke] : docs) {
        std::size_t dim = dke.vectors.empty() ? 0 : dke.vectors.front().second.size();
        out << "#doc " << doc_id << ' ' << dke.vectors.size() << ' ' << dim << '\n';
        for (const auto& [token, v] : dke.vectors) {
            out << token;
            for (double x : v) {
                out << ' ';
                write_double(out, x);
            }
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, DocKeywordEmbeddings> load_doc_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open doc-vector file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("kgrank-docvecs 1", 0) != 0) {
        throw ParseError(path + ":1: not a doc-vector file");
    }
    std::map<std::string, DocKeywordEmbeddings> docs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream hs(line);
        std::string tag, doc_id;
        std::size_t n = 0, dim = 0;
        hs >> tag >> doc_id >> n >> dim;
        if (tag != "#doc" || doc_id.empty()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected '#doc' header");
        }
        DocKeywordEmbeddings dke;
        dke.doc_id = doc_id;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(in, line)) {
                throw ParseError(path + ":" + std::to_string(lineno + 1) +
                                 ": unexpected end of file");
            }
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream ss(line);
            std::string token, field;
            ss >> token;
            Vec v;
            v.reserve(dim);
            while (ss >> field) v.push_back(parse_double_field(field, path, lineno));
            if (token.empty() || v.size() != dim) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected token plus " +
                                 std::to_string(dim) + " components");
            }
            dke.vectors.emplace_back(std::move(token), std::move(v));
        }
        if (!docs.emplace(doc_id, std::move(dke)).second) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate doc id");
        }
    }
    return docs;
}

}  // namespace kgrank
