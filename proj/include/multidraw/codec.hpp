#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "multidraw/bitmat.hpp"
#include "multidraw/capacity.hpp"
#include "multidraw/channel.hpp"
#include "multidraw/cluster.hpp"
#include "multidraw/consistency.hpp"
#include "multidraw/rng.hpp"

namespace multidraw {

// Messages are materialized up to this count; beyond it membership checks
// regenerate vectors from the message seed on demand.
inline constexpr std::size_t kMaterializeLimit = std::size_t{1} << 20;

// Random linear coding scheme: codewords are G t_i for an ML x B Bernoulli(1/2)
// generator and i.i.d. uniform length-B message vectors. The message set is a
// random subset of the range of G, not the whole range.
class Codebook {
  public:
    Codebook(ChannelParams params, BitMatrix generator, std::size_t num_messages, std::uint64_t message_seed)
        : params_(params),
          generator_(std::move(generator)),
          num_messages_(num_messages),
          message_seed_(message_seed) {
        if (generator_.rows() != params_.total_bits()) throw std::invalid_argument("Codebook: generator must have ML rows");
        if (generator_.cols() > params_.total_bits()) throw std::invalid_argument("Codebook: B must not exceed ML");
        if (generator_.cols() == 0) throw std::invalid_argument("Codebook: B must be positive");
        if (num_messages_ < 2) throw std::invalid_argument("Codebook: need at least 2 messages");
        rate_ = std::log2(static_cast<double>(num_messages_)) / static_cast<double>(params_.total_bits());
        if (num_messages_ <= kMaterializeLimit) {
            messages_.reserve(num_messages_);
            for (std::size_t i = 0; i < num_messages_; ++i) {
                messages_.push_back(generate_(i));
                index_of_.try_emplace(messages_.back(), i);  // collisions keep the first index
            }
        }
    }

    const ChannelParams& params() const { return params_; }
    const BitMatrix& generator() const { return generator_; }
    std::size_t message_bits() const { return generator_.cols(); }  // B
    std::size_t num_messages() const { return num_messages_; }
    double rate() const { return rate_; }
    bool materialized() const { return !messages_.empty(); }

    BitVector message(std::size_t index) const {
        if (index >= num_messages_) throw std::out_of_range("Codebook::message: index out of range");
        if (materialized()) return messages_[index];
        return generate_(index);
    }

    std::optional<std::size_t> find_message(const BitVector& candidate) const {
        if (materialized()) {
            auto it = index_of_.find(candidate);
            if (it == index_of_.end()) return std::nullopt;
            return it->second;
        }
        for (std::size_t i = 0; i < num_messages_; ++i) {
            if (generate_(i) == candidate) return i;
        }
        return std::nullopt;
    }

  private:
    BitVector generate_(std::size_t index) const {
        Rng rng(derive_seed(message_seed_, index));
        return random_vector(generator_.cols(), rng);
    }

    ChannelParams params_;
    BitMatrix generator_;
    std::size_t num_messages_;
    std::uint64_t message_seed_;
    double rate_ = 0.0;
    std::vector<BitVector> messages_;
    std::unordered_map<BitVector, std::size_t, BitVectorHash> index_of_;
};

// B = floor(M L (1-q0-eps)(1-p_eff-eps)(1-eps)): large enough for the true
// system to be uniquely solvable, small enough to survive the union bound.
inline std::size_t choose_B(const ChannelParams& params, const SamplingDistribution& dist, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("choose_B: epsilon must be positive");
    double p_lower = 1.0 - dist.q0() - epsilon;
    double usable = 1.0 - p_eff(dist, params.erasure_prob) - epsilon;
    if (p_lower <= 0.0) throw std::invalid_argument("choose_B: epsilon too large, (1-q0-eps) <= 0");
    if (usable <= 0.0) throw std::invalid_argument("choose_B: epsilon too large, (1-p_eff-eps) <= 0");
    double raw = static_cast<double>(params.total_bits()) * p_lower * usable * (1.0 - epsilon);
    auto b = static_cast<std::size_t>(std::floor(raw + 1e-9));
    if (b < 1) throw std::invalid_argument("choose_B: parameters give B < 1");
    return b;
}

inline Codebook build_codebook(const ChannelParams& params, std::size_t message_bits, std::size_t num_messages,
                               Rng& rng) {
    BitMatrix g = random_matrix(params.total_bits(), message_bits, rng);
    std::uint64_t message_seed = rng.u64();
    return Codebook(params, std::move(g), num_messages, message_seed);
}

// Break a length-ML codeword into M erasure-free strands of length L.
inline std::vector<Strand> split_codeword(const BitVector& codeword, std::size_t strand_count,
                                          std::size_t strand_bits) {
    if (codeword.len() != strand_count * strand_bits) throw std::invalid_argument("split_codeword: length mismatch");
    std::vector<Strand> strands;
    strands.reserve(strand_count);
    for (std::size_t m = 0; m < strand_count; ++m) {
        Strand s(strand_bits);
        for (std::size_t i = 0; i < strand_bits; ++i) {
            s.set_symbol(i, codeword.get(m * strand_bits + i) ? Symbol::One : Symbol::Zero);
        }
        strands.push_back(std::move(s));
    }
    return strands;
}

// The M strands of codeword G t_index.
inline std::vector<Strand> encode(const Codebook& cb, std::size_t message_index) {
    BitVector codeword = mat_vec_mul(cb.generator(), cb.message(message_index));
    return split_codeword(codeword, cb.params().strand_count, cb.params().strand_bits);
}

enum class DecodeStatus {
    Success,
    FailureNoValidSystem,
    FailureAmbiguous,
    FailureBudgetExhausted,
};

inline const char* to_string(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::Success: return "success";
        case DecodeStatus::FailureNoValidSystem: return "failure_no_valid_system";
        case DecodeStatus::FailureAmbiguous: return "failure_ambiguous";
        case DecodeStatus::FailureBudgetExhausted: return "failure_budget_exhausted";
    }
    return "unknown";
}

struct DecodeResult {
    DecodeStatus status = DecodeStatus::FailureNoValidSystem;
    std::optional<std::size_t> message_index;
    std::size_t systems_tried = 0;
};

namespace detail {

// Solve G t = y for one ordered placement of consensus strands. Blocks may
// be null (strand never observed); erased positions and the matching rows
// of G are dropped rather than materialized.
inline SolveReport solve_placement(const BitMatrix& generator, std::size_t strand_bits,
                                   const std::vector<const Strand*>& blocks, std::size_t* equations_out = nullptr) {
    Gf2Eliminator elim(generator.cols());
    std::size_t equations = 0;
    for (std::size_t m = 0; m < blocks.size() && !elim.contradiction(); ++m) {
        const Strand* s = blocks[m];
        if (s == nullptr) continue;
        for (std::size_t i = 0; i < strand_bits; ++i) {
            if (s->symbol(i) == Symbol::Erased) continue;
            elim.absorb(generator.row(m * strand_bits + i), s->symbol(i) == Symbol::One);
            ++equations;
            if (elim.contradiction()) break;
        }
    }
    if (equations_out != nullptr) *equations_out = equations;
    if (equations == 0) return SolveReport{SolveStatus::Multiple, std::nullopt};
    return elim.report();
}

}  // namespace detail

// Converse-side decoder: the genie reveals the true clusters and their
// indices. One system is built from per-origin consensus strands; missing
// strands contribute only erased rows.
inline DecodeResult genie_decode(const Codebook& cb, const ReadPool& pool) {
    std::size_t m = cb.params().strand_count;
    std::vector<std::vector<Strand>> buckets(m);
    for (std::size_t i = 0; i < pool.reads.size(); ++i) {
        if (pool.origins[i] >= m) throw std::invalid_argument("genie_decode: origin tag out of range");
        buckets[pool.origins[i]].push_back(pool.reads[i]);
    }
    std::vector<Strand> merged(m);
    std::vector<const Strand*> blocks(m, nullptr);
    for (std::size_t i = 0; i < m; ++i) {
        if (buckets[i].empty()) continue;
        merged[i] = consensus(buckets[i]);
        blocks[i] = &merged[i];
    }
    std::size_t equations = 0;
    SolveReport rep = detail::solve_placement(cb.generator(), cb.params().strand_bits, blocks, &equations);
    if (equations == 0) return {DecodeStatus::FailureNoValidSystem, std::nullopt, 0};
    DecodeResult result;
    result.systems_tried = 1;
    switch (rep.status) {
        case SolveStatus::Unique:
            if (auto idx = cb.find_message(*rep.witness)) {
                result.status = DecodeStatus::Success;
                result.message_index = idx;
            } else {
                result.status = DecodeStatus::FailureNoValidSystem;
            }
            break;
        case SolveStatus::Multiple:
            result.status = DecodeStatus::FailureAmbiguous;
            break;
        case SolveStatus::Inconsistent:
            result.status = DecodeStatus::FailureNoValidSystem;
            break;
    }
    return result;
}

struct ExhaustiveDecodeOptions {
    double epsilon = 0.05;    // shared slack for p_L, p_U and B sizing
    std::uint64_t budget = 0; // max systems tried; must be set, growth is factorial
    bool first_hit = false;   // stop at the first decoded message
    std::uint64_t max_nodes = 50'000'000;
};

// Code-aware decoder: every valid clustering with between (1-q0-eps)M and
// (1-q0+eps)M clusters, and for each, every injective assignment of clusters
// to strand indices. A system certifies a message only when its solution is
// unique and lies in the codebook. Success requires all certifying systems
// to agree on one message.
inline DecodeResult exhaustive_decode(const Codebook& cb, const ReadsView& view, const SamplingDistribution& dist,
                                      const ExhaustiveDecodeOptions& opts) {
    std::size_t m = cb.params().strand_count;
    if (m > 64) throw std::invalid_argument("exhaustive_decode: supports M <= 64");
    if (opts.budget == 0) throw std::invalid_argument("exhaustive_decode: a nonzero budget is required");
    double p_lower = (1.0 - dist.q0() - opts.epsilon) * static_cast<double>(m);
    double p_upper = (1.0 - dist.q0() + opts.epsilon) * static_cast<double>(m);
    auto k_min = static_cast<std::size_t>(std::max(1.0, std::ceil(p_lower - 1e-9)));
    std::size_t k_max = std::min(m, static_cast<std::size_t>(std::max(0.0, std::floor(p_upper + 1e-9))));

    DecodeResult result;
    if (k_max < k_min) return result;  // no admissible cluster count

    ConsistencyGraph graph = build_graph(view);
    std::vector<std::size_t> candidates;
    bool budget_hit = false;
    bool stop_success = false;

    auto note_candidate = [&](std::size_t idx) {
        for (std::size_t c : candidates) {
            if (c == idx) return;
        }
        candidates.push_back(idx);
    };

    std::vector<const Strand*> blocks(m, nullptr);
    std::vector<std::size_t> assigned;
    std::uint64_t used_mask = 0;

    // Injective assignment of the k consensus strands to indices {0..M-1}.
    auto assign = [&](auto&& self, const std::vector<Strand>& cons, std::size_t depth) -> bool {
        if (depth == cons.size()) {
            if (result.systems_tried >= opts.budget) {
                budget_hit = true;
                return false;
            }
            ++result.systems_tried;
            SolveReport rep = detail::solve_placement(cb.generator(), cb.params().strand_bits, blocks);
            if (rep.status == SolveStatus::Unique) {
                if (auto idx = cb.find_message(*rep.witness)) {
                    note_candidate(*idx);
                    if (opts.first_hit) {
                        stop_success = true;
                        return false;
                    }
                    if (candidates.size() >= 2) return false;  // ambiguity proven
                }
            }
            return true;
        }
        for (std::size_t pos = 0; pos < m; ++pos) {
            if (used_mask & (std::uint64_t{1} << pos)) continue;
            used_mask |= std::uint64_t{1} << pos;
            blocks[pos] = &cons[depth];
            bool go = self(self, cons, depth + 1);
            blocks[pos] = nullptr;
            used_mask &= ~(std::uint64_t{1} << pos);
            if (!go) return false;
        }
        return true;
    };

    try {
        enumerate_clusterings(graph, k_min, k_max, [&](const Clustering& c) {
            std::vector<Strand> cons;
            cons.reserve(c.group_count());
            for (const auto& group : c.groups) cons.push_back(consensus(view, group));
            return assign(assign, cons, 0);
        }, opts.max_nodes);
    } catch (const EnumerationBudgetExceeded&) {
        budget_hit = true;
    }

    if (stop_success) {
        result.status = DecodeStatus::Success;
        result.message_index = candidates.front();
    } else if (candidates.size() >= 2) {
        result.status = DecodeStatus::FailureAmbiguous;
    } else if (budget_hit) {
        // Enumeration was cut short; a single candidate found so far is not
        // certified, since a second system could still contradict it.
        result.status = DecodeStatus::FailureBudgetExhausted;
    } else if (candidates.size() == 1) {
        result.status = DecodeStatus::Success;
        result.message_index = candidates.front();
    } else {
        result.status = DecodeStatus::FailureNoValidSystem;
    }
    return result;
}

struct CollisionBound {
    double exponent_bits = 0.0;  // log2 of the bound
    double bound = 0.0;
};

// Union bound on a wrong system's solution colliding with a message:
// 2^{alpha M} M^{p_U M} 2^{MLR} 2^{-B} = 2^{ML(alpha/L + p_U/beta + R - B/(ML))}.
inline CollisionBound collision_bound(const ChannelParams& params, const SamplingDistribution& dist, double rate,
                                      std::size_t message_bits, double alpha, double epsilon = 0.05) {
    if (!(alpha > 0.0)) throw std::invalid_argument("collision_bound: alpha must be positive");
    double p_upper = 1.0 - dist.q0() + epsilon;
    double ml = static_cast<double>(params.total_bits());
    double exponent = ml * (alpha / static_cast<double>(params.strand_bits) + p_upper / params.beta + rate -
                            static_cast<double>(message_bits) / ml);
    return {exponent, std::exp2(exponent)};
}

// Single-draw specialization with B = ML(1-p-eps): (M!-1) 2^{MLR} 2^{-B}
// < 2^{ML[R - (1-p-eps-1/beta)]}.
inline CollisionBound single_draw_collision_bound(const ChannelParams& params, double rate, double epsilon = 0.05) {
    double ml = static_cast<double>(params.total_bits());
    double exponent = ml * (rate - (1.0 - params.erasure_prob - epsilon - 1.0 / params.beta));
    return {exponent, std::exp2(exponent)};
}

// Generator width for a target design rate: B = round(ML * R), clamped to
// [1, ML]. At desk scale the message count stays small and fixed while B
// carries the rate, preserving the error mechanisms of interest (the true
// system turning underdetermined above capacity, wrong systems colliding
// with a message below it).
inline std::size_t rate_message_bits(std::size_t strand_count, std::size_t strand_bits, double rate) {
    auto ml = static_cast<long long>(strand_count * strand_bits);
    auto b = static_cast<long long>(std::llround(static_cast<double>(ml) * rate));
    return static_cast<std::size_t>(std::max<long long>(1, std::min(b, ml)));
}

// Hoeffding bound on the nonempty-cluster count straying from (1-q0)M by
// more than eps M: 2 exp(-2 M eps^2).
inline double cluster_count_bound(std::size_t m, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("cluster_count_bound: epsilon must be positive");
    return 2.0 * std::exp(-2.0 * static_cast<double>(m) * epsilon * epsilon);
}

}  // namespace multidraw
