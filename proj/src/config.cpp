#include "kgrank/config.hpp"

#include <charconv>
#include <fstream>

#include "kgrank/errors.hpp"
#include "kgrank/rng.hpp"

namespace kgrank {

void derive_stage_seeds(EngineConfig& cfg) {
    cfg.walk.seed = derive_seed(cfg.seed, "walks");
    cfg.train.seed = derive_seed(cfg.seed, "graph_embed");
    cfg.oov_train.seed = derive_seed(cfg.seed, "oov");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

double to_double(const std::string& where, const std::string& v) {
    double x = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        bad(where, "expected a number, got '" + v + "'");
    }
    return x;
}

long long to_int(const std::string& where, const std::string& v) {
    long long x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        bad(where, "expected an integer, got '" + v + "'");
    }
    return x;
}

std::size_t to_size(const std::string& where, const std::string& v, std::size_t min_value = 0) {
    long long x = to_int(where, v);
    if (x < 0 || static_cast<std::size_t>(x) < min_value) {
        bad(where, "value out of range: '" + v + "'");
    }
    return static_cast<std::size_t>(x);
}

std::uint64_t to_u64(const std::string& where, const std::string& v) {
    std::uint64_t x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        bad(where, "expected an unsigned integer, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string& where, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(where, "expected a boolean, got '" + v + "'");
}

// Shared by the file parser ("" section = unsectioned keys) and --set
// overrides.
void set_key(EngineConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value, const std::string& where) {
    if (value.empty()) bad(where, "empty value for key '" + key + "'");

    if (section.empty()) {
        if (key == "kg") cfg.kg_path = value;
        else if (key == "corpus") cfg.corpus_path = value;
        else if (key == "queries") cfg.queries_path = value;
        else if (key == "qrels") cfg.qrels_path = value;
        else if (key == "embeddings") cfg.embeddings_path = value;
        else if (key == "model") cfg.model_path = value;
        else if (key == "contextual") cfg.contextual_path = value;
        else if (key == "index_dir") cfg.index_dir = value;
        else if (key == "seed") {
            cfg.seed = to_u64(where, value);
            derive_stage_seeds(cfg);
        } else {
            bad(where, "unknown key '" + key + "'");
        }
        return;
    }

    if (section == "graph_embed") {
        if (key == "walks_per_node") cfg.walk.walks_per_node = static_cast<int>(to_size(where, value, 1));
        else if (key == "walk_length") cfg.walk.walk_length = static_cast<int>(to_size(where, value, 1));
        else if (key == "p") cfg.walk.return_param_p = to_double(where, value);
        else if (key == "q") cfg.walk.inout_param_q = to_double(where, value);
        else if (key == "dim") cfg.train.dim = to_size(where, value, 1);
        else if (key == "window") cfg.train.window = static_cast<int>(to_size(where, value, 1));
        else if (key == "negatives") cfg.train.negatives = static_cast<int>(to_size(where, value, 1));
        else if (key == "learning_rate") cfg.train.learning_rate = to_double(where, value);
        else if (key == "min_learning_rate") cfg.train.min_learning_rate = to_double(where, value);
        else if (key == "epochs") cfg.train.epochs = static_cast<int>(to_size(where, value, 1));
        else bad(where, "unknown key '" + key + "' in [graph_embed]");
        return;
    }
    if (section == "oov") {
        if (key == "strategy") {
            if (value == "prefix") cfg.oov_strategy = OovStrategy::prefix;
            else if (value == "charlstm") cfg.oov_strategy = OovStrategy::charlstm;
            else bad(where, "unknown oov strategy '" + value + "'");
        } else if (key == "min_prefix_len") cfg.min_prefix_len = to_size(where, value, 1);
        else if (key == "c_dim") cfg.oov_train.c_dim = to_size(where, value, 1);
        else if (key == "h_dim") cfg.oov_train.h_dim = to_size(where, value, 1);
        else if (key == "learning_rate") cfg.oov_train.learning_rate = to_double(where, value);
        else if (key == "epochs") cfg.oov_train.epochs = static_cast<int>(to_size(where, value, 1));
        else if (key == "batch_size") cfg.oov_train.batch_size = to_size(where, value, 1);
        else if (key == "gradient_clip_norm") cfg.oov_train.gradient_clip_norm = to_double(where, value);
        else if (key == "loss") {
            if (value == "mse") cfg.oov_train.loss = OovLoss::mse;
            else if (value == "cosine") cfg.oov_train.loss = OovLoss::cosine;
            else bad(where, "unknown oov loss '" + value + "'");
        } else bad(where, "unknown key '" + key + "' in [oov]");
        return;
    }
    if (section == "keywords") {
        if (key == "k") cfg.keyword_k = to_size(where, value, 1);
        else if (key == "filter_stopwords") cfg.filter_stopwords = to_bool(where, value);
        else bad(where, "unknown key '" + key + "' in [keywords]");
        return;
    }
    if (section == "bm25") {
        if (key == "k1") {
            cfg.bm25.k1 = to_double(where, value);
            if (cfg.bm25.k1 < 0.0) bad(where, "k1 must be >= 0");
        } else if (key == "b") {
            cfg.bm25.b = to_double(where, value);
            if (cfg.bm25.b < 0.0 || cfg.bm25.b > 1.0) bad(where, "b must be in [0, 1]");
        } else bad(where, "unknown key '" + key + "' in [bm25]");
        return;
    }
    if (section == "retriever") {
        if (key == "run_depth") cfg.run_depth = to_size(where, value, 1);
        else if (key == "minmax_normalize") cfg.minmax_normalize = to_bool(where, value);
        else if (key == "l2_normalize") cfg.l2_normalize = to_bool(where, value);
        else if (key == "tag") cfg.run_tag = value;
        else bad(where, "unknown key '" + key + "' in [retriever]");
        return;
    }
    if (section == "evalx") {
        if (key == "p_cutoff") cfg.p_cutoff = to_size(where, value, 1);
        else if (key == "ndcg_cutoff") cfg.ndcg_cutoff = to_size(where, value, 1);
        else if (key == "r_cutoff") cfg.r_cutoff = to_size(where, value, 1);
        else if (key == "exponential_gain") cfg.exponential_gain = to_bool(where, value);
        else bad(where, "unknown key '" + key + "' in [evalx]");
        return;
    }
    bad(where, "unknown section [" + section + "]");
}

}  // namespace

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    EngineConfig cfg;
    derive_stage_seeds(cfg);

    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        std::string where = path + ":" + std::to_string(lineno);

        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) bad(where, "malformed section header");
            section = t.substr(1, t.size() - 2);
            // validate the section name eagerly so a typo fails even when empty
            if (section != "graph_embed" && section != "oov" && section != "keywords" &&
                section != "bm25" && section != "retriever" && section != "evalx") {
                bad(where, "unknown section [" + section + "]");
            }
            continue;
        }

        std::size_t eq = t.find('=');
        if (eq == std::string::npos) bad(where, "expected `key = value`");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) bad(where, "empty key");
        set_key(cfg, section, key, value, where);
    }
    return cfg;
}

void apply_override(EngineConfig& cfg, const std::string& dotted_key, const std::string& value) {
    std::string where = "--set " + dotted_key;
    std::size_t dotpos = dotted_key.find('.');
    std::string section = dotpos == std::string::npos ? "" : dotted_key.substr(0, dotpos);
    std::string key = dotpos == std::string::npos ? dotted_key : dotted_key.substr(dotpos + 1);
    set_key(cfg, section, key, trim(value), where);
}

}  // namespace kgrank
