#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgrank/vec.hpp"

namespace kgrank {

// Label -> dense vector map. Entry order is preserved so that saving the
// table is deterministic.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    // Throws std::invalid_argument on dimension mismatch or duplicate label.
    void insert(const std::string& label, Vec v);

    const Vec* find(const std::string& label) const;
    bool contains(const std::string& label) const { return find(label) != nullptr; }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const std::vector<std::pair<std::string, Vec>>& entries() const { return entries_; }

    // Rescales every vector to unit L2 norm (zero vectors are left alone).
    void l2_normalize();

private:
    std::size_t dim_ = 0;
    std::vector<std::pair<std::string, Vec>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Text format: header `<count> <dim>`, one `<label> <f1> ... <fdim>` row per
// entry at 6 significant digits. Labels may contain spaces; rows are parsed
// from the right, so the last <dim> fields are the vector.
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace kgrank
