#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "multidraw/channel.hpp"

namespace multidraw {

// Two strands are consistent iff they agree on every position where both
// are non-erased.
inline bool consistent(const Strand& a, const Strand& b) {
    if (a.len() != b.len()) throw std::invalid_argument("consistent: length mismatch");
    const auto& av = a.values().words();
    const auto& bv = b.values().words();
    const auto& ak = a.known().words();
    const auto& bk = b.known().words();
    for (std::size_t w = 0; w < av.size(); ++w) {
        if ((av[w] ^ bv[w]) & ak[w] & bk[w]) return false;
    }
    return true;
}

// Undirected graph on reads with an edge between every consistent pair.
// Adjacency rows are bit masks over read indices. Content metadata needed by
// the partition enumerator rides along: duplicate classes (reads with
// identical symbol sequences) and all-erased flags.
struct ConsistencyGraph {
    std::size_t n_reads = 0;
    std::size_t edge_count = 0;                        // U
    std::vector<std::vector<std::uint64_t>> adjacency; // n rows of n-bit masks
    std::vector<std::size_t> duplicate_class;          // content-identity class per read
    std::vector<char> all_erased;                      // per read

    bool has_edge(std::size_t i, std::size_t j) const {
        if (i >= n_reads || j >= n_reads) throw std::out_of_range("ConsistencyGraph::has_edge: index out of range");
        if (i == j) return false;
        return (adjacency[i][j / 64] >> (j % 64)) & 1u;
    }
};

struct StrandContentHash {
    std::size_t operator()(const Strand& s) const {
        BitVectorHash h;
        return h(s.values()) * 1000003u ^ h(s.known());
    }
};

inline ConsistencyGraph build_graph(const ReadsView& view) {
    ConsistencyGraph g;
    g.n_reads = view.size();
    std::size_t words = (g.n_reads + 63) / 64;
    g.adjacency.assign(g.n_reads, std::vector<std::uint64_t>(words, 0));
    g.duplicate_class.resize(g.n_reads);
    g.all_erased.resize(g.n_reads);

    std::unordered_map<Strand, std::size_t, StrandContentHash> classes;
    for (std::size_t i = 0; i < g.n_reads; ++i) {
        g.all_erased[i] = view[i].all_erased() ? 1 : 0;
        auto [it, inserted] = classes.try_emplace(view[i], classes.size());
        g.duplicate_class[i] = it->second;
    }

    for (std::size_t i = 0; i < g.n_reads; ++i) {
        for (std::size_t j = i + 1; j < g.n_reads; ++j) {
            if (consistent(view[i], view[j])) {
                g.adjacency[i][j / 64] |= std::uint64_t{1} << (j % 64);
                g.adjacency[j][i / 64] |= std::uint64_t{1} << (i % 64);
                ++g.edge_count;
            }
        }
    }
    return g;
}

}  // namespace multidraw
