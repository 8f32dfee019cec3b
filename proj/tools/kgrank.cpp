#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgrank/config.hpp"
#include "kgrank/errors.hpp"
#include "kgrank/evalx.hpp"
#include "kgrank/node2vec.hpp"
#include "kgrank/retriever.hpp"
#include "kgrank/rng.hpp"
#include "kgrank/skipgram.hpp"

namespace fs = std::filesystem;
using namespace kgrank;

namespace {

void require_input(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("no " + what + " path configured");
    if (!fs::exists(path)) throw ConfigError(what + " path does not exist: " + path);
}

void require_output(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("no " + what + " path configured");
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::exists(parent)) {
        throw ConfigError(what + " directory does not exist: " + parent.string());
    }
}

fs::path artifact(const EngineConfig& cfg, const char* name) {
    return fs::path(cfg.index_dir) / name;
}

// ---------------------------------------------------------------------------
// embed-kg
// ---------------------------------------------------------------------------

int cmd_embed_kg(const EngineConfig& cfg) {
    require_input(cfg.kg_path, "kg");
    require_output(cfg.embeddings_path, "embeddings");

    KgLoadStats stats;
    KnowledgeGraph graph = load_kg(cfg.kg_path, &stats);
    std::cout << "kg: " << graph.concept_count() << " concepts, " << graph.edge_count()
              << " edges";
    if (stats.self_loops_dropped || stats.duplicates_dropped) {
        std::cout << " (dropped " << stats.self_loops_dropped << " self-loops, "
                  << stats.duplicates_dropped << " duplicate edges)";
    }
    std::cout << '\n';

    std::vector<std::vector<int>> walks = generate_walks(graph, cfg.walk);
    std::cout << "walks: " << walks.size() << " of length " << cfg.walk.walk_length << '\n';

    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(graph.concept_count()));
    for (int id = 0; id < graph.concept_count(); ++id) labels.push_back(graph.label(id));

    SkipgramResult trained = train_skipgram(walks, labels, cfg.train);
    for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
        std::printf("epoch %zu loss %.6f\n", e + 1, trained.epoch_loss[e]);
    }

    save_embeddings(trained.table, cfg.embeddings_path);
    std::cout << "wrote " << trained.table.size() << " embeddings (dim " << trained.table.dim()
              << ") to " << cfg.embeddings_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// index
// ---------------------------------------------------------------------------

// OOV resources owned by the command (the Engine's pointers alias these).
struct OovSetup {
    PrefixIndex prefix;
    CharLstmModel charlstm;
};

OovSetup prepare_oov(const EngineConfig& cfg, const EmbeddingTable& table, bool allow_train) {
    OovSetup setup;
    if (cfg.oov_strategy == OovStrategy::prefix) {
        setup.prefix = PrefixIndex::build(table, cfg.min_prefix_len);
        return setup;
    }
    if (cfg.model_path.empty()) {
        throw ConfigError("oov strategy is charlstm but no model path configured");
    }
    if (fs::exists(cfg.model_path)) {
        setup.charlstm = load_charlstm(cfg.model_path);
        if (setup.charlstm.out_dim != table.dim()) {
            throw std::runtime_error("charlstm model dim " +
                                     std::to_string(setup.charlstm.out_dim) +
                                     " does not match embeddings dim " +
                                     std::to_string(table.dim()));
        }
        return setup;
    }
    if (!allow_train) {
        throw ConfigError("charlstm model not found: " + cfg.model_path + " (run `index` first)");
    }
    std::cout << "training charlstm oov model on " << table.size() << " labels\n";
    CharLstmTrainResult trained = train_charlstm(table, cfg.oov_train);
    for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
        std::printf("oov epoch %zu loss %.6f\n", e + 1, trained.epoch_loss[e]);
    }
    save_charlstm(trained.model, cfg.model_path);
    std::cout << "wrote charlstm model to " << cfg.model_path << '\n';
    setup.charlstm = std::move(trained.model);
    return setup;
}

int cmd_index(const EngineConfig& cfg) {
    require_input(cfg.corpus_path, "corpus");
    require_input(cfg.embeddings_path, "embeddings");
    require_input(cfg.kg_path, "kg");
    if (!cfg.contextual_path.empty()) require_input(cfg.contextual_path, "contextual");
    if (cfg.index_dir.empty()) throw ConfigError("no index_dir configured");
    fs::create_directories(cfg.index_dir);

    KnowledgeGraph graph = load_kg(cfg.kg_path);
    EmbeddingTable table = load_embeddings(cfg.embeddings_path);
    if (cfg.l2_normalize) table.l2_normalize();

    auto corpus = load_corpus(cfg.corpus_path);
    InvertedIndex index = build_index(corpus);
    save_index(index, artifact(cfg, "bm25.idx").string());
    std::cout << "bm25 index: " << index.doc_count() << " docs, " << index.postings.size()
              << " terms\n";

    OovSetup oov_setup = prepare_oov(cfg, table, /*allow_train=*/true);
    OovResources oov{cfg.oov_strategy, &oov_setup.prefix, &oov_setup.charlstm};

    std::map<std::string, TokenEmbeddingDoc> contextual;
    if (!cfg.contextual_path.empty()) {
        contextual = load_contextual_embeddings(cfg.contextual_path);
        std::cout << "contextual embeddings for " << contextual.size() << " docs\n";
    }

    auto embed_token = [&](const std::string& tok) -> std::optional<Vec> {
        if (std::optional<int> cid = link_term(tok, graph)) {
            if (const Vec* v = table.find(graph.label(*cid))) return *v;
        }
        return oov_embed(tok, table, oov);
    };

    std::map<std::string, KeywordSet> keyword_sets;
    std::map<std::string, DocKeywordEmbeddings> doc_vectors;
    std::vector<std::string> unkeyworded;
    for (const auto& [doc_id, text] : corpus) {
        KeywordSet set;
        auto ctx = contextual.find(doc_id);
        if (ctx != contextual.end()) {
            set = extract_keywords(ctx->second, cfg.keyword_k, cfg.filter_stopwords);
            set.doc_id = doc_id;  // contextual files may key docs loosely
        } else {
            TokenizedDoc tdoc{doc_id, tokenize(text)};
            if (tdoc.tokens.empty()) {
                unkeyworded.push_back(doc_id);
                continue;
            }
            TokenEmbeddingDoc edoc = centroid_summary(tdoc, embed_token);
            set = extract_keywords(edoc, cfg.keyword_k, cfg.filter_stopwords);
        }
        if (set.keywords.empty()) {
            unkeyworded.push_back(doc_id);
            continue;
        }
        DocKeywordEmbeddings dke = resolve_keywords(set, graph, table, oov);
        keyword_sets.emplace(doc_id, std::move(set));
        doc_vectors.emplace(doc_id, std::move(dke));
    }

    save_keyword_sets(keyword_sets, artifact(cfg, "keywords.tsv").string());
    save_doc_vectors(doc_vectors, artifact(cfg, "doc_vectors.txt").string());
    std::cout << "keyword sets: " << keyword_sets.size() << " docs (K=" << cfg.keyword_k << ")\n";
    if (!unkeyworded.empty()) {
        std::cout << "warning: " << unkeyworded.size()
                  << " docs have no keywords (reachable through bm25 only):";
        for (std::size_t i = 0; i < unkeyworded.size() && i < 10; ++i) {
            std::cout << ' ' << unkeyworded[i];
        }
        if (unkeyworded.size() > 10) std::cout << " ...";
        std::cout << '\n';
    }
    std::cout << "index artifacts written to " << cfg.index_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

Engine load_engine(const EngineConfig& cfg) {
    require_input(cfg.kg_path, "kg");
    require_input(cfg.embeddings_path, "embeddings");
    if (cfg.index_dir.empty()) throw ConfigError("no index_dir configured");
    require_input(artifact(cfg, "bm25.idx").string(), "bm25 index (run `index` first)");
    require_input(artifact(cfg, "keywords.tsv").string(), "keyword artifact");
    require_input(artifact(cfg, "doc_vectors.txt").string(), "doc-vector artifact");

    Engine engine;
    engine.graph = load_kg(cfg.kg_path);
    engine.table = load_embeddings(cfg.embeddings_path);
    if (cfg.l2_normalize) engine.table.l2_normalize();
    engine.index = load_index(artifact(cfg, "bm25.idx").string());
    engine.bm25 = cfg.bm25;
    engine.keywords = load_keyword_sets(artifact(cfg, "keywords.tsv").string());
    engine.doc_vectors = load_doc_vectors(artifact(cfg, "doc_vectors.txt").string());
    engine.strategy = cfg.oov_strategy;
    engine.filter_stopwords = cfg.filter_stopwords;
    engine.minmax_normalize = cfg.minmax_normalize;

    OovSetup setup = prepare_oov(cfg, engine.table, /*allow_train=*/false);
    engine.prefix = std::move(setup.prefix);
    engine.charlstm = std::move(setup.charlstm);
    return engine;
}

void print_single_query(const Engine& engine, const std::string& query,
                        const std::vector<ScoredDoc>& ranked) {
    QueryEmbedding qe =
        embed_query("", query, engine.graph, engine.table, engine.oov(), engine.filter_stopwords);
    std::cout << "query: " << query << '\n';
    std::size_t shown = std::min<std::size_t>(10, ranked.size());
    for (std::size_t i = 0; i < shown; ++i) {
        const ScoredDoc& d = ranked[i];
        std::printf("%2zu. %-16s fused %.6f  kg %.6f  bm25 ", i + 1, d.doc_id.c_str(), d.fused,
                    d.kg_score);
        if (d.bm25_score) {
            std::printf("%.6f\n", *d.bm25_score);
        } else {
            std::printf("-\n");
        }
        auto it = engine.doc_vectors.find(d.doc_id);
        if (it == engine.doc_vectors.end()) {
            std::cout << "      (no keyword vectors; lexical match only)\n";
            continue;
        }
        for (const MaxSimMatch& m : maxsim_explain(qe, it->second)) {
            std::printf("      %s -> %s (%.6f)\n", m.query_token.c_str(), m.keyword.c_str(),
                        m.score);
        }
    }
}

int cmd_search(const EngineConfig& cfg, const std::string& query, std::string queries_path,
               const std::string& output) {
    Engine engine = load_engine(cfg);

    if (!query.empty()) {
        std::vector<ScoredDoc> ranked = retrieve(engine, query, cfg.run_depth);
        print_single_query(engine, query, ranked);
        if (!output.empty()) {
            RankedRun run;
            run.queries.emplace("single", std::move(ranked));
            save_run(run, output, cfg.run_tag);
            std::cout << "wrote run to " << output << '\n';
        }
        return 0;
    }

    if (queries_path.empty()) queries_path = cfg.queries_path;
    require_input(queries_path, "queries");
    if (output.empty()) throw ConfigError("batch search needs --output");
    require_output(output, "run output");

    RankedRun run;
    for (const auto& [qid, text] : load_corpus(queries_path)) {
        run.queries.emplace(qid, retrieve(engine, text, cfg.run_depth));
    }
    save_run(run, output, cfg.run_tag);
    std::cout << "wrote " << run.queries.size() << " queries to " << output << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const EngineConfig& cfg, const std::string& run_path, const std::string& jsonl_path) {
    require_input(run_path, "run");
    require_input(cfg.qrels_path, "qrels");

    RankedRun run = load_run(run_path);
    Qrels qrels = load_qrels(cfg.qrels_path);

    MetricsReport report;
    report.p_cutoff = cfg.p_cutoff;
    report.ndcg_cutoff = cfg.ndcg_cutoff;
    report.r_cutoff = cfg.r_cutoff;
    if (run.queries.empty()) {
        // empty runs score zero everywhere rather than erroring on the
        // disjoint-query check
        for (const auto& [qid, judged] : qrels) {
            report.mrr.per_query[qid] = 0.0;
            report.p_at_k.per_query[qid] = 0.0;
            report.ndcg_at_k.per_query[qid] = 0.0;
        }
    } else {
        report = evaluate(run.doc_lists(), qrels, cfg.p_cutoff, cfg.ndcg_cutoff, cfg.r_cutoff,
                          cfg.exponential_gain);
    }

    std::cout << format_report_table(report, cfg.run_tag);
    if (!jsonl_path.empty()) {
        require_output(jsonl_path, "jsonl output");
        std::ofstream out(jsonl_path);
        if (!out) throw std::runtime_error("cannot write jsonl report: " + jsonl_path);
        out << format_report_jsonl(report);
        std::cout << "wrote per-query metrics to " << jsonl_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot retrieval fusing knowledge-graph embeddings with BM25"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (`key = value` with [sections])");
    app.add_option("--set", overrides, "override a config entry, e.g. --set bm25.k1=1.5");

    CLI::App* embed_cmd = app.add_subcommand("embed-kg", "train concept embeddings from the KG");
    CLI::App* index_cmd = app.add_subcommand("index", "build bm25 + keyword artifacts");

    CLI::App* search_cmd = app.add_subcommand("search", "rank documents for queries");
    std::string query, queries_path, output;
    search_cmd->add_option("--query", query, "single query text (prints top-10 with provenance)");
    search_cmd->add_option("--queries", queries_path, "JSONL queries file (batch mode)");
    search_cmd->add_option("--output", output, "TREC run file to write");

    CLI::App* eval_cmd = app.add_subcommand("eval", "score a run file against qrels");
    std::string run_path, jsonl_path;
    eval_cmd->add_option("--run", run_path, "TREC run file")->required();
    eval_cmd->add_option("--jsonl", jsonl_path, "also write per-query metrics as JSON lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors are exit 2
    }

    try {
        EngineConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else {
            derive_stage_seeds(cfg);
        }
        for (const std::string& kv : overrides) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects section.key=value, got '" + kv + "'");
            }
            apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }

        if (embed_cmd->parsed()) return cmd_embed_kg(cfg);
        if (index_cmd->parsed()) return cmd_index(cfg);
        if (search_cmd->parsed()) return cmd_search(cfg, query, queries_path, output);
        if (eval_cmd->parsed()) return cmd_eval(cfg, run_path, jsonl_path);
        return 2;  // unreachable: require_subcommand enforces one
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
