#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgrank {

struct Edge {
    int head = 0;
    int tail = 0;
    std::string relation;
};

struct KgLoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
};

// Concept graph with an undirected adjacency view. Relation labels are kept
// for provenance only; walks and scoring never look at them.
//
// Immutable after load; concurrent reads are safe.
class KnowledgeGraph {
public:
    // Label must already be normalized. Returns the existing id on repeat.
    int get_or_add_concept(const std::string& label);

    enum class EdgeAdd { added, duplicate, self_loop };

    // Inserts both directions, keeping neighbor lists sorted and dup-free.
    EdgeAdd add_undirected_edge(int head, int tail, const std::string& relation);

    std::optional<int> find_concept(std::string_view normalized_label) const;
    const std::string& label(int id) const { return labels_[id]; }
    const std::vector<int>& neighbors(int id) const { return adjacency_[id]; }
    bool is_isolated(int id) const { return adjacency_[id].empty(); }
    bool adjacent(int a, int b) const;

    int concept_count() const { return static_cast<int>(labels_.size()); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, int> label_index_;
};

// Lowercase, trim, collapse internal whitespace, strip surrounding
// punctuation. Total: any input maps to some (possibly empty) string.
std::string normalize_label(std::string_view raw);

// Tab-separated triples `head \t relation \t tail`; `#` comments and blank
// lines are skipped. Throws ParseError on bad arity or an empty graph.
KnowledgeGraph load_kg(const std::string& path, KgLoadStats* stats = nullptr);

// Exact match on the normalized label.
std::optional<int> link_term(std::string_view term, const KnowledgeGraph& graph);

}  // namespace kgrank
