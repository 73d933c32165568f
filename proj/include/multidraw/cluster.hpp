#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "multidraw/capacity.hpp"
#include "multidraw/channel.hpp"
#include "multidraw/consistency.hpp"

namespace multidraw {

// A partition of the read indices; every group must be a clique in the
// consistency graph.
struct Clustering {
    std::vector<std::vector<std::size_t>> groups;

    std::size_t group_count() const { return groups.size(); }

    // Sort members and order groups by least member, for comparisons.
    Clustering canonical() const {
        Clustering c = *this;
        for (auto& g : c.groups) std::sort(g.begin(), g.end());
        std::sort(c.groups.begin(), c.groups.end());
        return c;
    }

    friend bool operator==(const Clustering& a, const Clustering& b) { return a.groups == b.groups; }
};

// Groups reads by their origin tags (oracle / genie side only).
inline Clustering true_clustering(const ReadPool& pool) {
    std::size_t m = 0;
    for (std::size_t o : pool.origins) m = std::max(m, o + 1);
    std::vector<std::vector<std::size_t>> by_origin(m);
    for (std::size_t i = 0; i < pool.origins.size(); ++i) by_origin[pool.origins[i]].push_back(i);
    Clustering c;
    for (auto& g : by_origin) {
        if (!g.empty()) c.groups.push_back(std::move(g));
    }
    return c;
}

inline bool is_valid_clustering(const ConsistencyGraph& g, const Clustering& c) {
    std::vector<char> seen(g.n_reads, 0);
    std::size_t covered = 0;
    for (const auto& group : c.groups) {
        if (group.empty()) return false;
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (group[i] >= g.n_reads || seen[group[i]]) return false;
            seen[group[i]] = 1;
            ++covered;
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                if (!g.has_edge(group[i], group[j])) return false;
            }
        }
    }
    return covered == g.n_reads;
}

// Position-wise merge of a pairwise-consistent group: any non-erased symbol
// wins, positions erased everywhere stay erased.
inline Strand consensus(const std::vector<Strand>& group) {
    if (group.empty()) throw std::invalid_argument("consensus: empty group");
    BitVector vals = group.front().values();
    BitVector known = group.front().known();
    for (std::size_t i = 1; i < group.size(); ++i) {
        const Strand& s = group[i];
        if (s.len() != vals.len()) throw std::invalid_argument("consensus: length mismatch");
        for (std::size_t w = 0; w < vals.words().size(); ++w) {
            if ((vals.words()[w] ^ s.values().words()[w]) & known.words()[w] & s.known().words()[w]) {
                throw std::invalid_argument("consensus: group is not pairwise consistent");
            }
            vals.words()[w] |= s.values().words()[w];
            known.words()[w] |= s.known().words()[w];
        }
    }
    return Strand(std::move(vals), std::move(known));
}

inline Strand consensus(const ReadsView& view, const std::vector<std::size_t>& members) {
    std::vector<Strand> group;
    group.reserve(members.size());
    for (std::size_t i : members) group.push_back(view[i]);
    return consensus(group);
}

struct EnumerationBudgetExceeded : std::runtime_error {
    EnumerationBudgetExceeded() : std::runtime_error("clustering enumeration exceeded its node budget") {}
};

namespace detail {

struct PartitionSearch {
    const ConsistencyGraph* g = nullptr;
    std::size_t min_clusters = 0;
    std::size_t max_clusters = 0;
    std::uint64_t max_nodes = 0;
    std::uint64_t nodes = 0;

    std::vector<std::size_t> reps;                        // one read per duplicate class, non-erased
    std::vector<std::vector<std::size_t>> class_members;  // expansion per rep
    std::vector<std::size_t> erased_reads;

    std::vector<std::vector<std::size_t>> groups;             // of rep positions
    std::vector<std::vector<std::uint64_t>> compat;           // per group: AND of members' adjacency

    template <typename Visitor>
    bool run(Visitor&& visit) {
        if (reps.empty()) {
            // Nothing to enumerate; erased reads, if any, form one pinned group.
            Clustering c;
            if (!erased_reads.empty()) c.groups.push_back(erased_reads);
            std::size_t count = c.groups.size();
            if (count >= min_clusters && count <= max_clusters) return visit(c);
            return true;
        }
        return descend(0, visit);
    }

    template <typename Visitor>
    bool descend(std::size_t t, Visitor&& visit) {
        if (++nodes > max_nodes) throw EnumerationBudgetExceeded{};
        if (t == reps.size()) return emit(visit);
        // Even if every remaining rep opens a new group, min_clusters must
        // stay reachable.
        if (groups.size() + (reps.size() - t) < min_clusters) return true;
        std::size_t read = reps[t];
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            if ((compat[gi][read / 64] >> (read % 64)) & 1u) {
                groups[gi].push_back(t);
                std::vector<std::uint64_t> saved = compat[gi];
                for (std::size_t w = 0; w < compat[gi].size(); ++w) compat[gi][w] &= g->adjacency[read][w];
                if (!descend(t + 1, visit)) return false;
                compat[gi] = std::move(saved);
                groups[gi].pop_back();
            }
        }
        if (groups.size() < max_clusters) {
            groups.push_back({t});
            compat.push_back(g->adjacency[read]);
            bool go = descend(t + 1, visit);
            compat.pop_back();
            groups.pop_back();
            if (!go) return false;
        }
        return true;
    }

    template <typename Visitor>
    bool emit(Visitor&& visit) {
        if (groups.size() < min_clusters || groups.size() > max_clusters) return true;
        Clustering c;
        c.groups.resize(groups.size());
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            for (std::size_t item : groups[gi]) {
                const auto& members = class_members[item];
                c.groups[gi].insert(c.groups[gi].end(), members.begin(), members.end());
            }
        }
        // Zero-information reads join the first group; any placement yields
        // the same linear systems.
        c.groups.front().insert(c.groups.front().end(), erased_reads.begin(), erased_reads.end());
        for (auto& grp : c.groups) std::sort(grp.begin(), grp.end());
        return visit(c);
    }
};

}  // namespace detail

// Streams every partition of the reads into cliques whose group count lies
// in [min_clusters, max_clusters]. Identical reads ride together (they are
// exchangeable) and all-erased reads are pinned to the first group. The
// visitor returns false to stop early; the function returns false iff it
// was stopped. max_nodes caps the search-tree size as a hard safety valve.
template <typename Visitor>
bool enumerate_clusterings(const ConsistencyGraph& g, std::size_t min_clusters, std::size_t max_clusters,
                           Visitor&& visit, std::uint64_t max_nodes = 50'000'000) {
    if (min_clusters > max_clusters) throw std::invalid_argument("enumerate_clusterings: min_clusters > max_clusters");
    detail::PartitionSearch search;
    search.g = &g;
    search.min_clusters = min_clusters;
    search.max_clusters = max_clusters;
    search.max_nodes = max_nodes;

    std::vector<std::size_t> rep_of_class;
    for (std::size_t i = 0; i < g.n_reads; ++i) {
        if (g.all_erased[i]) {
            search.erased_reads.push_back(i);
            continue;
        }
        std::size_t cls = g.duplicate_class[i];
        if (cls >= rep_of_class.size()) rep_of_class.resize(cls + 1, static_cast<std::size_t>(-1));
        if (rep_of_class[cls] == static_cast<std::size_t>(-1)) {
            rep_of_class[cls] = search.reps.size();
            search.reps.push_back(i);
            search.class_members.emplace_back();
        }
        search.class_members[rep_of_class[cls]].push_back(i);
    }
    return search.run(visit);
}

inline std::vector<Clustering> collect_clusterings(const ConsistencyGraph& g, std::size_t min_clusters,
                                                   std::size_t max_clusters,
                                                   std::uint64_t max_nodes = 50'000'000) {
    std::vector<Clustering> out;
    enumerate_clusterings(g, min_clusters, max_clusters, [&](const Clustering& c) {
        out.push_back(c);
        return true;
    }, max_nodes);
    return out;
}

// Code-oblivious baseline: each read joins the first group it is consistent
// with in full, else starts a new group.
inline Clustering greedy_cluster(const ReadsView& view) {
    Clustering c;
    std::vector<std::vector<const Strand*>> members;
    for (std::size_t i = 0; i < view.size(); ++i) {
        bool placed = false;
        for (std::size_t gi = 0; gi < c.groups.size() && !placed; ++gi) {
            bool ok = true;
            for (const Strand* s : members[gi]) {
                if (!consistent(*s, view[i])) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                c.groups[gi].push_back(i);
                members[gi].push_back(&view[i]);
                placed = true;
            }
        }
        if (!placed) {
            c.groups.push_back({i});
            members.push_back({&view[i]});
        }
    }
    return c;
}

struct EdgeStats {
    std::size_t correct_edges = 0;    // endpoints share an origin
    std::size_t incorrect_edges = 0;  // Z
    double gamma = 0.0;

    std::size_t total_edges() const { return correct_edges + incorrect_edges; }
};

// Classifies every edge using oracle origin tags; test/analysis path only.
inline EdgeStats edge_stats(const ConsistencyGraph& g, const std::vector<std::size_t>& origins,
                            const ChannelParams& params) {
    if (origins.size() != g.n_reads) throw std::invalid_argument("edge_stats: origins size mismatch");
    EdgeStats stats;
    stats.gamma = gamma_exponent(params.erasure_prob, params.beta);
    for (std::size_t i = 0; i < g.n_reads; ++i) {
        for (std::size_t j = i + 1; j < g.n_reads; ++j) {
            if (!g.has_edge(i, j)) continue;
            if (origins[i] == origins[j]) ++stats.correct_edges;
            else ++stats.incorrect_edges;
        }
    }
    return stats;
}

// Probability that two independent uniform strands, each erased at rate p,
// are consistent: (1 - (1-p)^2 / 2)^L.
inline double pair_consistency_probability(double p, std::size_t strand_bits) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("pair_consistency_probability: p must be in [0,1]");
    return std::pow(1.0 - 0.5 * (1.0 - p) * (1.0 - p), static_cast<double>(strand_bits));
}

}  // namespace multidraw
