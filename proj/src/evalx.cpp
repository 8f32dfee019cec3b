#include "kgrank/evalx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kgrank/errors.hpp"

namespace kgrank {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

Qrels load_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open qrels file: " + path);

    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        if (f.size() != 3) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 3 tab-separated fields, found " +
                             std::to_string(f.size()));
        }
        int grade = 0;
        if (!parse_int(f[2], grade)) {
            if (first) {  // header line like `query-id corpus-id score`
                first = false;
                continue;
            }
            throw ParseError(path + ":" + std::to_string(lineno) + ": non-integer grade '" +
                             f[2] + "'");
        }
        first = false;
        if (grade < 0) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": negative grade");
        }
        if (f[0].empty() || f[1].empty()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": empty id field");
        }
        if (!qrels[f[0]].emplace(f[1], grade).second) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate pair (" + f[0] +
                             ", " + f[1] + ")");
        }
    }
    return qrels;
}

namespace {

const std::vector<std::string>* find_ranked(const EvalRun& run, const std::string& qid) {
    auto it = run.find(qid);
    return it == run.end() ? nullptr : &it->second;
}

int grade_of(const std::map<std::string, int>& judged, const std::string& doc_id) {
    auto it = judged.find(doc_id);
    return it == judged.end() ? 0 : it->second;
}

double finish_macro(MetricResult& r) {
    double sum = 0.0;
    for (const auto& [qid, v] : r.per_query) sum += v;
    r.macro = r.per_query.empty() ? 0.0 : sum / static_cast<double>(r.per_query.size());
    return r.macro;
}

}  // namespace

MetricResult mrr(const EvalRun& run, const Qrels& qrels) {
    bool shared = false;
    for (const auto& [qid, judged] : qrels) {
        if (run.count(qid)) {
            shared = true;
            break;
        }
    }
    if (!shared) throw std::invalid_argument("mrr: run and qrels have disjoint query sets");

    MetricResult r;
    for (const auto& [qid, judged] : qrels) {
        double rr = 0.0;
        if (const auto* ranked = find_ranked(run, qid)) {
            for (std::size_t i = 0; i < ranked->size(); ++i) {
                if (grade_of(judged, (*ranked)[i]) > 0) {
                    rr = 1.0 / static_cast<double>(i + 1);
                    break;
                }
            }
        }
        r.per_query[qid] = rr;
    }
    finish_macro(r);
    return r;
}

MetricResult precision_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
    MetricResult r;
    for (const auto& [qid, judged] : qrels) {
        std::size_t hits = 0;
        if (const auto* ranked = find_ranked(run, qid)) {
            std::size_t depth = std::min(k, ranked->size());
            for (std::size_t i = 0; i < depth; ++i) {
                if (grade_of(judged, (*ranked)[i]) > 0) ++hits;
            }
        }
        r.per_query[qid] = static_cast<double>(hits) / static_cast<double>(k);
    }
    finish_macro(r);
    return r;
}

MetricResult ndcg_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k,
                       bool exponential_gain) {
    if (k == 0) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
    auto gain = [exponential_gain](int grade) {
        return exponential_gain ? std::exp2(static_cast<double>(grade)) - 1.0
                                : static_cast<double>(grade);
    };

    MetricResult r;
    for (const auto& [qid, judged] : qrels) {
        double dcg = 0.0;
        if (const auto* ranked = find_ranked(run, qid)) {
            std::size_t depth = std::min(k, ranked->size());
            for (std::size_t i = 0; i < depth; ++i) {
                dcg += gain(grade_of(judged, (*ranked)[i])) /
                       std::log2(static_cast<double>(i) + 2.0);
            }
        }

        std::vector<int> grades;
        grades.reserve(judged.size());
        for (const auto& [doc, g] : judged) grades.push_back(g);
        std::sort(grades.begin(), grades.end(), std::greater<int>());
        double idcg = 0.0;
        std::size_t depth = std::min(k, grades.size());
        for (std::size_t i = 0; i < depth; ++i) {
            idcg += gain(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
        }

        r.per_query[qid] = idcg > 0.0 ? dcg / idcg : 0.0;
    }
    finish_macro(r);
    return r;
}

MetricResult recall_at_k(const EvalRun& run, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw std::invalid_argument("recall_at_k: k must be >= 1");
    MetricResult r;
    for (const auto& [qid, judged] : qrels) {
        std::size_t relevant = 0;
        for (const auto& [doc, g] : judged) {
            if (g > 0) ++relevant;
        }
        if (relevant == 0) continue;  // query skipped for recall

        std::size_t hits = 0;
        if (const auto* ranked = find_ranked(run, qid)) {
            std::size_t depth = std::min(k, ranked->size());
            for (std::size_t i = 0; i < depth; ++i) {
                if (grade_of(judged, (*ranked)[i]) > 0) ++hits;
            }
        }
        r.per_query[qid] = static_cast<double>(hits) / static_cast<double>(relevant);
    }
    finish_macro(r);
    return r;
}

MetricsReport evaluate(const EvalRun& run, const Qrels& qrels, std::size_t p_k,
                       std::size_t ndcg_k, std::size_t r_k, bool exponential_gain) {
    MetricsReport report;
    report.p_cutoff = p_k;
    report.ndcg_cutoff = ndcg_k;
    report.r_cutoff = r_k;
    report.mrr = mrr(run, qrels);
    report.p_at_k = precision_at_k(run, qrels, p_k);
    report.ndcg_at_k = ndcg_at_k(run, qrels, ndcg_k, exponential_gain);
    report.r_at_k = recall_at_k(run, qrels, r_k);
    return report;
}

std::string format_report_table(const MetricsReport& report, const std::string& run_name) {
    std::ostringstream out;
    std::string p_col = "P@" + std::to_string(report.p_cutoff);
    std::string n_col = "nDCG@" + std::to_string(report.ndcg_cutoff);
    std::string r_col = "R@" + std::to_string(report.r_cutoff);

    auto pad = [](const std::string& s, std::size_t w) {
        return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
    };
    std::size_t name_w = std::max<std::size_t>(run_name.size(), 4) + 2;
    out << pad("run", name_w) << pad("MRR", 9) << pad(p_col, 9) << pad(n_col, 9) << r_col << '\n';

    char buf[32];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    out << pad(run_name, name_w) << pad(fmt(report.mrr.macro), 9)
        << pad(fmt(report.p_at_k.macro), 9) << pad(fmt(report.ndcg_at_k.macro), 9)
        << fmt(report.r_at_k.macro) << '\n';
    return out.str();
}

std::string format_report_jsonl(const MetricsReport& report) {
    std::ostringstream out;
    auto emit = [&out](const std::string& metric, const MetricResult& r) {
        for (const auto& [qid, v] : r.per_query) {
            nlohmann::json obj{{"metric", metric}, {"query_id", qid}, {"value", v}};
            out << obj.dump() << '\n';
        }
        nlohmann::json obj{{"metric", metric}, {"query_id", "all"}, {"value", r.macro}};
        out << obj.dump() << '\n';
    };
    emit("mrr", report.mrr);
    emit("p_at_" + std::to_string(report.p_cutoff), report.p_at_k);
    emit("ndcg_at_" + std::to_string(report.ndcg_cutoff), report.ndcg_at_k);
    emit("recall_at_" + std::to_string(report.r_cutoff), report.r_at_k);
    return out.str();
}

}  // namespace kgrank
