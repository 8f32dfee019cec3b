#include "kgrank/kg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "kgrank/errors.hpp"

namespace kgrank {

int KnowledgeGraph::get_or_add_concept(const std::string& label) {
    auto it = label_index_.find(label);
    if (it != label_index_.end()) return it->second;
    int id = static_cast<int>(labels_.size());
    labels_.push_back(label);
    adjacency_.emplace_back();
    label_index_.emplace(label, id);
    return id;
}

bool KnowledgeGraph::adjacent(int a, int b) const {
    const auto& n = adjacency_[a];
    return std::binary_search(n.begin(), n.end(), b);
}

KnowledgeGraph::EdgeAdd KnowledgeGraph::add_undirected_edge(int head, int tail,
                                                            const std::string& relation) {
    if (head == tail) return EdgeAdd::self_loop;
    if (adjacent(head, tail)) return EdgeAdd::duplicate;
    auto insert_sorted = [](std::vector<int>& list, int v) {
        list.insert(std::lower_bound(list.begin(), list.end(), v), v);
    };
    insert_sorted(adjacency_[head], tail);
    insert_sorted(adjacency_[tail], head);
    edges_.push_back(Edge{head, tail, relation});
    return EdgeAdd::added;
}

std::optional<int> KnowledgeGraph::find_concept(std::string_view normalized_label) const {
    auto it = label_index_.find(std::string(normalized_label));
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
}

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    // strip punctuation off both ends (bytes >= 0x80 are left alone)
    std::size_t begin = 0;
    std::size_t end = out.size();
    auto is_punct = [](unsigned char c) { return c < 0x80 && std::ispunct(c); };
    while (begin < end && is_punct(static_cast<unsigned char>(out[begin]))) ++begin;
    while (end > begin && is_punct(static_cast<unsigned char>(out[end - 1]))) --end;
    return out.substr(begin, end - begin);
}

KnowledgeGraph load_kg(const std::string& path, KgLoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open KG file: " + path);

    KnowledgeGraph g;
    KgLoadStats local;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        std::size_t t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 3 tab-separated fields");
        }
        std::string head = normalize_label(line.substr(0, t1));
        std::string relation = line.substr(t1 + 1, t2 - t1 - 1);
        std::string tail = normalize_label(line.substr(t2 + 1));
        if (head.empty() || tail.empty()) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": concept label is empty after normalization");
        }
        int h = g.get_or_add_concept(head);
        int t = g.get_or_add_concept(tail);
        switch (g.add_undirected_edge(h, t, relation)) {
            case KnowledgeGraph::EdgeAdd::self_loop: ++local.self_loops_dropped; break;
            case KnowledgeGraph::EdgeAdd::duplicate: ++local.duplicates_dropped; break;
            case KnowledgeGraph::EdgeAdd::added: break;
        }
    }
    if (g.concept_count() == 0) throw ParseError(path + ": empty knowledge graph");
    if (stats != nullptr) *stats = local;
    return g;
}

std::optional<int> link_term(std::string_view term, const KnowledgeGraph& graph) {
    return graph.find_concept(normalize_label(term));
}

}  // namespace kgrank
