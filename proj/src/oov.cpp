#include "kgrank/oov.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kgrank/errors.hpp"
#include "kgrank/rng.hpp"

namespace kgrank {

// ---------------------------------------------------------------------------
// Prefix approximation
// ---------------------------------------------------------------------------

PrefixIndex PrefixIndex::build(const EmbeddingTable& table, std::size_t min_prefix_len) {
    if (table.empty()) throw std::invalid_argument("PrefixIndex: empty embedding table");
    PrefixIndex idx;
    idx.min_prefix_len = min_prefix_len;
    idx.dim = table.dim();
    idx.entries = table.entries();
    std::sort(idx.entries.begin(), idx.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return idx;
}

namespace {

std::size_t common_prefix_len(std::string_view a, std::string_view b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

Vec mean_of_range(const std::vector<std::pair<std::string, Vec>>& entries, std::size_t lo,
                  std::size_t hi, std::size_t dim) {
    Vec m(dim, 0.0);
    for (std::size_t i = lo; i < hi; ++i) axpy(1.0, entries[i].second, m);
    scale(m, 1.0 / static_cast<double>(hi - lo));
    return m;
}

}  // namespace

Vec prefix_embed(std::string_view term, const PrefixIndex& index) {
    const auto& entries = index.entries;
    if (entries.empty()) throw std::invalid_argument("prefix_embed: empty index");

    auto pos = std::lower_bound(entries.begin(), entries.end(), term,
                                [](const auto& e, std::string_view t) { return e.first < t; });
    if (pos != entries.end() && pos->first == term) return pos->second;

    // the longest common prefix is achieved at a lexicographic neighbor
    std::size_t best = 0;
    if (pos != entries.end()) best = std::max(best, common_prefix_len(term, pos->first));
    if (pos != entries.begin()) {
        best = std::max(best, common_prefix_len(term, std::prev(pos)->first));
    }
    if (best < index.min_prefix_len) {
        return mean_of_range(entries, 0, entries.size(), index.dim);
    }

    // all entries sharing term's first `best` chars form a contiguous block
    std::string_view prefix = term.substr(0, best);
    auto lo = std::lower_bound(entries.begin(), entries.end(), prefix,
                               [](const auto& e, std::string_view p) { return e.first < p; });
    auto hi = lo;
    while (hi != entries.end() && std::string_view(hi->first).substr(0, best) == prefix) ++hi;
    return mean_of_range(entries, static_cast<std::size_t>(lo - entries.begin()),
                         static_cast<std::size_t>(hi - entries.begin()), index.dim);
}

// ---------------------------------------------------------------------------
// CharLSTM
// ---------------------------------------------------------------------------

std::vector<std::vector<double>*> CharLstmParams::tensors() {
    return {&char_embed.a, &wi.a, &wf.a, &wo.a, &wg.a, &ui.a, &uf.a, &uo.a, &ug.a,
            &bi,           &bf,   &bo,   &bg,   &proj.a, &proj_bias};
}

std::vector<const std::vector<double>*> CharLstmParams::tensors() const {
    return {&char_embed.a, &wi.a, &wf.a, &wo.a, &wg.a, &ui.a, &uf.a, &uo.a, &ug.a,
            &bi,           &bf,   &bo,   &bg,   &proj.a, &proj_bias};
}

double CharLstmParams::global_norm() const {
    double s = 0.0;
    for (const auto* t : tensors()) {
        for (double x : *t) s += x * x;
    }
    return std::sqrt(s);
}

void CharLstmParams::scale_all(double s) {
    for (auto* t : tensors()) {
        for (double& x : *t) x *= s;
    }
}

void CharLstmParams::add_scaled(const CharLstmParams& other, double s) {
    auto dst = tensors();
    auto src = other.tensors();
    for (std::size_t k = 0; k < dst.size(); ++k) {
        auto& d = *dst[k];
        const auto& o = *src[k];
        if (d.size() != o.size()) throw std::invalid_argument("CharLstmParams: shape mismatch");
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += s * o[i];
    }
}

int CharLstmModel::index_of(char c) const {
    char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = char_index.find(lc);
    return it == char_index.end() ? 0 : it->second;
}

CharLstmModel make_charlstm(const std::vector<char>& chars, std::size_t c_dim, std::size_t h_dim,
                            std::size_t out_dim) {
    CharLstmModel m;
    m.c_dim = c_dim;
    m.h_dim = h_dim;
    m.out_dim = out_dim;
    m.chars = chars;
    for (std::size_t i = 0; i < chars.size(); ++i) {
        m.char_index.emplace(chars[i], static_cast<int>(i) + 1);
    }
    const std::size_t n_chars = chars.size() + 1;  // +1 unknown bucket
    m.p.char_embed = Matrix(n_chars, c_dim);
    for (Matrix* w : {&m.p.wi, &m.p.wf, &m.p.wo, &m.p.wg}) *w = Matrix(h_dim, c_dim);
    for (Matrix* u : {&m.p.ui, &m.p.uf, &m.p.uo, &m.p.ug}) *u = Matrix(h_dim, h_dim);
    for (Vec* b : {&m.p.bi, &m.p.bf, &m.p.bo, &m.p.bg}) b->assign(h_dim, 0.0);
    m.p.proj = Matrix(out_dim, h_dim);
    m.p.proj_bias.assign(out_dim, 0.0);
    return m;
}

void randomize_charlstm(CharLstmModel& model, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (auto* t : model.p.tensors()) {
        for (double& x : *t) x = rng.uniform(-0.1, 0.1);
    }
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec mat_vec(const Matrix& w, const Vec& x) {
    Vec y(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) s += w(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

Vec mat_t_vec(const Matrix& w, const Vec& y) {
    Vec x(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        for (std::size_t c = 0; c < w.cols; ++c) x[c] += w(r, c) * y[r];
    }
    return x;
}

void outer_acc(Matrix& dw, const Vec& dy, const Vec& x) {
    for (std::size_t r = 0; r < dw.rows; ++r) {
        for (std::size_t c = 0; c < dw.cols; ++c) dw(r, c) += dy[r] * x[c];
    }
}

Vec embed_row(const CharLstmModel& m, int id) {
    Vec x(m.c_dim);
    for (std::size_t c = 0; c < m.c_dim; ++c) x[c] = m.p.char_embed(id, c);
    return x;
}

}  // namespace

CharLstmForwardResult charlstm_forward(std::string_view term, const CharLstmModel& model) {
    if (term.empty()) throw std::invalid_argument("charlstm_forward: empty term");

    CharLstmForwardResult r;
    const std::size_t h_dim = model.h_dim;
    Vec h(h_dim, 0.0);
    Vec c(h_dim, 0.0);
    for (char ch : term) {
        int id = model.index_of(ch);
        r.char_ids.push_back(id);
        Vec x = embed_row(model, id);

        Vec ai = mat_vec(model.p.wi, x);
        Vec af = mat_vec(model.p.wf, x);
        Vec ao = mat_vec(model.p.wo, x);
        Vec ag = mat_vec(model.p.wg, x);
        axpy(1.0, mat_vec(model.p.ui, h), ai);
        axpy(1.0, mat_vec(model.p.uf, h), af);
        axpy(1.0, mat_vec(model.p.uo, h), ao);
        axpy(1.0, mat_vec(model.p.ug, h), ag);

        Vec gi(h_dim), gf(h_dim), go(h_dim), gg(h_dim), nc(h_dim), nh(h_dim);
        for (std::size_t k = 0; k < h_dim; ++k) {
            gi[k] = sigmoid(ai[k] + model.p.bi[k]);
            gf[k] = sigmoid(af[k] + model.p.bf[k]);
            go[k] = sigmoid(ao[k] + model.p.bo[k]);
            gg[k] = std::tanh(ag[k] + model.p.bg[k]);
            nc[k] = gf[k] * c[k] + gi[k] * gg[k];
            nh[k] = go[k] * std::tanh(nc[k]);
        }
        c = nc;
        h = nh;
        r.gate_i.push_back(std::move(gi));
        r.gate_f.push_back(std::move(gf));
        r.gate_o.push_back(std::move(go));
        r.gate_g.push_back(std::move(gg));
        r.cell.push_back(c);
        r.hidden.push_back(h);
    }

    r.output = mat_vec(model.p.proj, h);
    axpy(1.0, model.p.proj_bias, r.output);
    return r;
}

CharLstmLossGrad charlstm_loss_grad(const CharLstmModel& model, std::string_view term,
                                    const Vec& target, OovLoss loss) {
    if (target.size() != model.out_dim) {
        throw std::invalid_argument("charlstm_loss_grad: target dim mismatch");
    }
    CharLstmForwardResult fw = charlstm_forward(term, model);
    const Vec& y = fw.output;

    CharLstmLossGrad out;
    CharLstmModel zero = make_charlstm(model.chars, model.c_dim, model.h_dim, model.out_dim);
    out.grad = std::move(zero.p);

    Vec dy(model.out_dim, 0.0);
    if (loss == OovLoss::mse) {
        double s = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            double d = y[k] - target[k];
            s += d * d;
            dy[k] = d;
        }
        out.loss = 0.5 * s;
    } else {
        double ny = norm(y);
        double nt = norm(target);
        if (ny == 0.0 || nt == 0.0) {
            out.loss = 1.0;  // gradient left at zero: direction is undefined
        } else {
            double cs = dot(y, target) / (ny * nt);
            out.loss = 1.0 - cs;
            for (std::size_t k = 0; k < y.size(); ++k) {
                dy[k] = -target[k] / (ny * nt) + cs * y[k] / (ny * ny);
            }
        }
    }

    // output layer
    const std::size_t steps = fw.char_ids.size();
    outer_acc(out.grad.proj, dy, fw.hidden[steps - 1]);
    axpy(1.0, dy, out.grad.proj_bias);
    Vec dh = mat_t_vec(model.p.proj, dy);

    // backward through time
    const std::size_t h_dim = model.h_dim;
    Vec dc(h_dim, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        const Vec& gi = fw.gate_i[t];
        const Vec& gf = fw.gate_f[t];
        const Vec& go = fw.gate_o[t];
        const Vec& gg = fw.gate_g[t];
        const Vec& ct = fw.cell[t];
        const Vec zero_state(h_dim, 0.0);
        const Vec& h_prev = t > 0 ? fw.hidden[t - 1] : zero_state;
        const Vec& c_prev = t > 0 ? fw.cell[t - 1] : zero_state;

        Vec dai(h_dim), daf(h_dim), dao(h_dim), dag(h_dim);
        for (std::size_t k = 0; k < h_dim; ++k) {
            double tc = std::tanh(ct[k]);
            double do_k = dh[k] * tc;
            double dc_k = dc[k] + dh[k] * go[k] * (1.0 - tc * tc);
            dai[k] = dc_k * gg[k] * gi[k] * (1.0 - gi[k]);
            daf[k] = dc_k * c_prev[k] * gf[k] * (1.0 - gf[k]);
            dao[k] = do_k * go[k] * (1.0 - go[k]);
            dag[k] = dc_k * gi[k] * (1.0 - gg[k] * gg[k]);
            dc[k] = dc_k * gf[k];  // flows to step t-1
        }

        Vec x = embed_row(model, fw.char_ids[t]);
        outer_acc(out.grad.wi, dai, x);
        outer_acc(out.grad.wf, daf, x);
        outer_acc(out.grad.wo, dao, x);
        outer_acc(out.grad.wg, dag, x);
        outer_acc(out.grad.ui, dai, h_prev);
        outer_acc(out.grad.uf, daf, h_prev);
        outer_acc(out.grad.uo, dao, h_prev);
        outer_acc(out.grad.ug, dag, h_prev);
        axpy(1.0, dai, out.grad.bi);
        axpy(1.0, daf, out.grad.bf);
        axpy(1.0, dao, out.grad.bo);
        axpy(1.0, dag, out.grad.bg);

        Vec dx = mat_t_vec(model.p.wi, dai);
        axpy(1.0, mat_t_vec(model.p.wf, daf), dx);
        axpy(1.0, mat_t_vec(model.p.wo, dao), dx);
        axpy(1.0, mat_t_vec(model.p.wg, dag), dx);
        for (std::size_t cidx = 0; cidx < model.c_dim; ++cidx) {
            out.grad.char_embed(fw.char_ids[t], cidx) += dx[cidx];
        }

        dh = mat_t_vec(model.p.ui, dai);
        axpy(1.0, mat_t_vec(model.p.uf, daf), dh);
        axpy(1.0, mat_t_vec(model.p.uo, dao), dh);
        axpy(1.0, mat_t_vec(model.p.ug, dag), dh);
    }
    return out;
}

CharLstmTrainResult train_charlstm(const EmbeddingTable& table, const OovTrainConfig& cfg) {
    if (table.empty()) throw std::invalid_argument("train_charlstm: empty embedding table");
    if (cfg.batch_size == 0) throw std::invalid_argument("train_charlstm: batch_size must be > 0");

    // character vocabulary from the training labels
    std::set<char> char_set;
    for (const auto& [label, v] : table.entries()) {
        for (char c : label) {
            char_set.insert(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    std::vector<char> chars(char_set.begin(), char_set.end());

    CharLstmModel model = make_charlstm(chars, cfg.c_dim, cfg.h_dim, table.dim());
    randomize_charlstm(model, derive_seed(cfg.seed, "init"));

    const auto& entries = table.entries();
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    SplitMix64 shuffle_rng(derive_seed(cfg.seed, "shuffle"));
    CharLstmTrainResult result;
    result.epoch_loss.reserve(cfg.epochs);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with our own stream for reproducibility
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(shuffle_rng.next_below(i));
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            CharLstmModel zero =
                make_charlstm(model.chars, model.c_dim, model.h_dim, model.out_dim);
            CharLstmParams batch_grad = std::move(zero.p);
            for (std::size_t k = start; k < end; ++k) {
                const auto& [label, target] = entries[order[k]];
                CharLstmLossGrad g = charlstm_loss_grad(model, label, target, cfg.loss);
                if (!std::isfinite(g.loss)) {
                    throw std::runtime_error("train_charlstm: non-finite loss at epoch " +
                                             std::to_string(epoch) +
                                             "; lower the learning rate");
                }
                loss_sum += g.loss;
                batch_grad.add_scaled(g.grad, 1.0 / static_cast<double>(end - start));
            }
            double gnorm = batch_grad.global_norm();
            if (gnorm > cfg.gradient_clip_norm && gnorm > 0.0) {
                batch_grad.scale_all(cfg.gradient_clip_norm / gnorm);
            }
            model.p.add_scaled(batch_grad, -cfg.learning_rate);
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(entries.size()));
    }

    result.model = std::move(model);
    return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "kgrank-charlstm";
constexpr int kModelVersion = 1;

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    char buf[64];
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v[i]);
        if (i > 0) out << ' ';
        out.write(buf, res.ptr - buf);
    }
    out << '\n';
}

std::vector<double> read_doubles(std::istream& in, std::size_t expected, const std::string& path,
                                 std::size_t& lineno) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path + ":" + std::to_string(lineno + 1) + ": unexpected end of file");
    }
    ++lineno;
    std::vector<double> v;
    v.reserve(expected);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
        while (p < end && *p == ' ') ++p;
        if (p >= end) break;
        double x = 0.0;
        auto res = std::from_chars(p, end, x);
        if (res.ec != std::errc()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
        }
        v.push_back(x);
        p = res.ptr;
    }
    if (v.size() != expected) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(expected) + " values, found " + std::to_string(v.size()));
    }
    return v;
}

}  // namespace

void save_charlstm(const CharLstmModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << kModelMagic << ' ' << kModelVersion << '\n';
    out << model.c_dim << ' ' << model.h_dim << ' ' << model.out_dim << ' '
        << model.chars.size() + 1 << '\n';
    for (std::size_t i = 0; i < model.chars.size(); ++i) {
        if (i > 0) out << ' ';
        out << static_cast<int>(static_cast<unsigned char>(model.chars[i]));
    }
    out << '\n';
    for (const auto* t : model.p.tensors()) write_doubles(out, *t);
    if (!out) throw std::runtime_error("write failed: " + path);
}

CharLstmModel load_charlstm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    std::size_t lineno = 0;
    std::string line;

    if (!std::getline(in, line)) throw ParseError(path + ":1: missing header");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string magic;
        int version = 0;
        if (!(hs >> magic >> version) || magic != kModelMagic || version != kModelVersion) {
            throw ParseError(path + ":1: not a charlstm model file (version " +
                             std::to_string(kModelVersion) + " expected)");
        }
    }

    std::size_t c_dim = 0, h_dim = 0, out_dim = 0, n_chars = 0;
    if (!std::getline(in, line)) throw ParseError(path + ":2: missing shape line");
    ++lineno;
    {
        std::istringstream ss(line);
        if (!(ss >> c_dim >> h_dim >> out_dim >> n_chars) || n_chars == 0) {
            throw ParseError(path + ":2: bad shape line");
        }
    }

    if (!std::getline(in, line)) throw ParseError(path + ":3: missing character line");
    ++lineno;
    std::vector<char> chars;
    {
        std::istringstream ss(line);
        int code = 0;
        while (ss >> code) {
            if (code < 0 || code > 255) throw ParseError(path + ":3: bad character code");
            chars.push_back(static_cast<char>(static_cast<unsigned char>(code)));
        }
        if (chars.size() + 1 != n_chars) {
            throw ParseError(path + ":3: expected " + std::to_string(n_chars - 1) +
                             " character codes");
        }
    }

    CharLstmModel model = make_charlstm(chars, c_dim, h_dim, out_dim);
    for (auto* t : model.p.tensors()) {
        *t = read_doubles(in, t->size(), path, lineno);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

Vec oov_embed(const std::string& term, const EmbeddingTable& table, const OovResources& res) {
    if (const Vec* v = table.find(term)) return *v;
    switch (res.strategy) {
        case OovStrategy::prefix:
            if (res.prefix == nullptr) throw std::invalid_argument("oov_embed: no prefix index");
            return prefix_embed(term, *res.prefix);
        case OovStrategy::charlstm:
            if (res.charlstm == nullptr) throw std::invalid_argument("oov_embed: no model");
            return charlstm_forward(term, *res.charlstm).output;
    }
    throw std::logic_error("oov_embed: unknown strategy");
}

}  // namespace kgrank
