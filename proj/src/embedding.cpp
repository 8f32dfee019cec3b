#include "kgrank/embedding.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kgrank/errors.hpp"

namespace kgrank {

void EmbeddingTable::insert(const std::string& label, Vec v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) {
        throw std::invalid_argument("EmbeddingTable: vector for '" + label + "' has dim " +
                                    std::to_string(v.size()) + ", table dim " +
                                    std::to_string(dim_));
    }
    if (index_.count(label) != 0) {
        throw std::invalid_argument("EmbeddingTable: duplicate label '" + label + "'");
    }
    index_.emplace(label, entries_.size());
    entries_.emplace_back(label, std::move(v));
}

const Vec* EmbeddingTable::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return nullptr;
    return &entries_[it->second].second;
}

void EmbeddingTable::l2_normalize() {
    for (auto& [label, v] : entries_) {
        double n = norm(v);
        if (n > 0.0) scale(v, 1.0 / n);
    }
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    if (table.empty()) throw std::invalid_argument("save_embeddings: table is empty");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embedding file: " + path);
    out << table.size() << ' ' << table.dim() << '\n';
    char buf[64];
    for (const auto& [label, v] : table.entries()) {
        out << label;
        for (double x : v) {
            std::snprintf(buf, sizeof(buf), " %.6g", x);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open embedding file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ":1: missing header");
    std::size_t count = 0;
    std::size_t dim = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> count >> dim) || count == 0 || dim == 0) {
            throw ParseError(path + ":1: header must be `<count> <dim>`");
        }
    }

    EmbeddingTable table(dim);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<std::string> fields;
        std::string f;
        while (ls >> f) fields.push_back(std::move(f));
        if (fields.size() < dim + 1) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected a label and " +
                             std::to_string(dim) + " components");
        }
        // everything before the trailing <dim> floats is the label
        Vec v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const std::string& s = fields[fields.size() - dim + i];
            std::size_t pos = 0;
            try {
                v[i] = std::stod(s, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (pos != s.size()) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": bad vector component '" + s + "'");
            }
        }
        std::string label = fields[0];
        for (std::size_t i = 1; i + dim < fields.size(); ++i) label += ' ' + fields[i];
        table.insert(label, std::move(v));
    }
    if (table.size() != count) {
        throw ParseError(path + ": header announces " + std::to_string(count) + " rows, found " +
                         std::to_string(table.size()));
    }
    return table;
}

}  // namespace kgrank
