#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "multidraw/capacity.hpp"
#include "multidraw/channel.hpp"
#include "multidraw/cluster.hpp"
#include "multidraw/codec.hpp"
#include "multidraw/consistency.hpp"
#include "multidraw/csv.hpp"
#include "multidraw/gf2_stats.hpp"
#include "multidraw/rng.hpp"
#include "multidraw/sampling.hpp"

namespace multidraw {

// Runs body(0..count-1) on a worker pool. Trials derive their own seeds from
// a root seed and results are stored by index, so the outcome is independent
// of scheduling.
inline void parallel_trials(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : std::min(hw, 8u);
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// capacity query

struct CapacityReport {
    double p = 0.0;
    double beta = 0.0;
    double q0 = 0.0;
    double p_eff = 0.0;
    double conditional_bec_capacity = 0.0;  // E[C_BEC,Q | Q >= 1]
    double capacity_conditional_form = 0.0; // (1-q0)(E[C|Q>=1] - 1/beta)
    double capacity_p_eff_form = 0.0;       // (1-q0)(1 - p_eff - 1/beta)
    double capacity = 0.0;                  // clamped at zero
    double gamma = 0.0;
    Regime regime_label = Regime::OpenGray;
};

// The two algebraic forms must agree; a mismatch is a programming error.
inline CapacityReport run_capacity_query(double p, double beta, const SamplingDistribution& dist) {
    CapacityReport r;
    r.p = p;
    r.beta = beta;
    r.q0 = dist.q0();
    r.p_eff = p_eff(dist, p);
    r.conditional_bec_capacity = conditional_bec_capacity(dist, p);
    r.capacity_conditional_form = capacity_via_conditional_expectation(dist, p, beta);
    r.capacity_p_eff_form = capacity_via_p_eff(dist, p, beta);
    if (std::abs(r.capacity_conditional_form - r.capacity_p_eff_form) > 1e-12) {
        throw std::logic_error("capacity forms disagree beyond 1e-12");
    }
    r.capacity = capacity(dist, p, beta);
    r.gamma = gamma_exponent(p, beta);
    r.regime_label = regime(p, beta);
    return r;
}

// ---------------------------------------------------------------------------
// regime boundary curves

struct RegimeCurvesConfig {
    double p_min = 1e-3;
    double p_max = 0.9;
    std::size_t n_points = 50;
};

inline std::vector<BoundaryPoint> regime_curve_points(const RegimeCurvesConfig& cfg) {
    if (!(cfg.p_min > 0.0 && cfg.p_min < cfg.p_max && cfg.p_max < 1.0)) {
        throw std::invalid_argument("regime-curves: need 0 < p_min < p_max < 1");
    }
    if (cfg.n_points < 2) throw std::invalid_argument("regime-curves: need at least 2 points");
    std::vector<double> grid(cfg.n_points);
    double lo = std::log(cfg.p_min);
    double hi = std::log(cfg.p_max);
    for (std::size_t i = 0; i < cfg.n_points; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cfg.n_points - 1));
    }
    return boundary_curves(grid);
}

inline void run_regime_curves(const RegimeCurvesConfig& cfg, const std::string& out_path) {
    auto points = regime_curve_points(cfg);
    CsvWriter csv(out_path);
    csv.header({"p", "beta_blue", "beta_green"});
    for (const auto& pt : points) {
        csv.row_strings({format_double(pt.p), format_double(pt.beta_blue), format_double(pt.beta_green)});
    }
}

// ---------------------------------------------------------------------------
// lemma 1: full-rank probability of random F2 matrices

struct Lemma1Config {
    std::vector<std::size_t> b_values{200};
    std::vector<double> deltas{0.0};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct Lemma1Cell {
    std::size_t b = 0;
    double delta = 0.0;
    std::size_t trials = 0;
    double empirical = 0.0;
    double exact = 0.0;
    double std_error = 0.0;
};

inline std::vector<Lemma1Cell> run_lemma1(const Lemma1Config& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("lemma1: trials must be >= 1");
    std::vector<Lemma1Cell> cells;
    std::size_t cell_index = 0;
    for (std::size_t b : cfg.b_values) {
        for (double delta : cfg.deltas) {
            std::size_t rows = fullrank_trial_rows(b, delta);
            std::uint64_t cell_seed = derive_seed(cfg.seed, cell_index++);
            std::vector<char> success(cfg.trials, 0);
            parallel_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
                Rng rng(derive_seed(cell_seed, t));
                success[t] = fullrank_single_trial(b, rows, rng) ? 1 : 0;
            });
            Lemma1Cell cell;
            cell.b = b;
            cell.delta = delta;
            cell.trials = cfg.trials;
            std::size_t wins = 0;
            for (char s : success) wins += static_cast<std::size_t>(s);
            cell.empirical = static_cast<double>(wins) / static_cast<double>(cfg.trials);
            cell.exact = exact_fullrank_probability(b, delta);
            cell.std_error = std::sqrt(cell.exact * (1.0 - cell.exact) / static_cast<double>(cfg.trials));
            cells.push_back(cell);
        }
    }
    return cells;
}

inline void write_lemma1_csv(const std::vector<Lemma1Cell>& cells, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"B", "delta", "trials", "empirical", "exact", "std_error"});
    for (const auto& c : cells) {
        csv.row_strings({std::to_string(c.b), format_double(c.delta), std::to_string(c.trials),
                         format_double(c.empirical), format_double(c.exact), format_double(c.std_error)});
    }
}

// ---------------------------------------------------------------------------
// lemma 2: consistency-graph edge statistics

struct Lemma2Config {
    std::vector<std::size_t> m_values{8, 16, 32, 64};
    double p = 0.1;
    double beta = 2.0;
    SamplingDistribution dist;
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct Lemma2Row {
    std::size_t m = 0;
    std::size_t l = 0;
    double beta = 0.0;
    double gamma = 0.0;
    std::size_t trials = 0;
    double mean_incorrect = 0.0;   // mean Z
    double p95_incorrect = 0.0;    // 95th percentile of Z
    double incorrect_scale = 0.0;  // M^(2-gamma)
    double p95_bound = 0.0;        // M^(2-gamma+0.5)
    double mean_correct = 0.0;
    double correct_bound = 0.0;    // (M/2) E[Q^2]
    double mean_total_edges = 0.0;
    double edges_per_strand = 0.0; // empirical U / M
};

inline std::vector<Lemma2Row> run_lemma2(const Lemma2Config& cfg) {
    std::vector<Lemma2Row> rows;
    std::size_t m_index = 0;
    for (std::size_t m : cfg.m_values) {
        ChannelParams params = ChannelParams::from_beta(m, cfg.beta, cfg.p);
        std::uint64_t m_seed = derive_seed(cfg.seed, m_index++);
        std::vector<std::size_t> incorrect(cfg.trials, 0);
        std::vector<std::size_t> correct(cfg.trials, 0);
        parallel_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
            Rng rng(derive_seed(m_seed, t));
            std::vector<Strand> input;
            input.reserve(m);
            for (std::size_t i = 0; i < m; ++i) input.push_back(Strand::random(params.strand_bits, rng));
            ReadPool pool = transmit(input, params, cfg.dist, rng);
            ConsistencyGraph g = build_graph(pool.view());
            EdgeStats stats = edge_stats(g, pool.origins, params);
            incorrect[t] = stats.incorrect_edges;
            correct[t] = stats.correct_edges;
        });
        Lemma2Row row;
        row.m = m;
        row.l = params.strand_bits;
        row.beta = params.beta;
        row.gamma = gamma_exponent(cfg.p, params.beta);
        row.trials = cfg.trials;
        double sum_z = 0.0;
        double sum_c = 0.0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            sum_z += static_cast<double>(incorrect[t]);
            sum_c += static_cast<double>(correct[t]);
        }
        row.mean_incorrect = sum_z / static_cast<double>(cfg.trials);
        row.mean_correct = sum_c / static_cast<double>(cfg.trials);
        std::vector<std::size_t> sorted = incorrect;
        std::sort(sorted.begin(), sorted.end());
        std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(cfg.trials)));
        row.p95_incorrect = static_cast<double>(sorted[std::min(cfg.trials - 1, idx == 0 ? 0 : idx - 1)]);
        double md = static_cast<double>(m);
        row.incorrect_scale = std::pow(md, 2.0 - row.gamma);
        row.p95_bound = std::pow(md, 2.0 - row.gamma + 0.5);
        row.correct_bound = 0.5 * md * cfg.dist.second_moment();
        row.mean_total_edges = row.mean_incorrect + row.mean_correct;
        row.edges_per_strand = row.mean_total_edges / md;
        rows.push_back(row);
    }
    return rows;
}

inline void write_lemma2_csv(const std::vector<Lemma2Row>& rows, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"M", "L", "beta", "gamma", "trials", "mean_incorrect", "p95_incorrect", "m_pow_2_minus_gamma",
                "p95_bound", "mean_correct", "correct_bound", "mean_total_edges", "edges_per_strand"});
    for (const auto& r : rows) {
        csv.row_strings({std::to_string(r.m), std::to_string(r.l), format_double(r.beta), format_double(r.gamma),
                         std::to_string(r.trials), format_double(r.mean_incorrect), format_double(r.p95_incorrect),
                         format_double(r.incorrect_scale), format_double(r.p95_bound), format_double(r.mean_correct),
                         format_double(r.correct_bound), format_double(r.mean_total_edges),
                         format_double(r.edges_per_strand)});
    }
}

// ---------------------------------------------------------------------------
// pairwise consistency probability

struct PairConsistencyConfig {
    std::vector<double> p_values{0.1, 0.3, 0.5};
    std::vector<std::size_t> l_values{8, 16};
    std::size_t pairs = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct PairConsistencyCell {
    double p = 0.0;
    std::size_t l = 0;
    std::size_t pairs = 0;
    double empirical = 0.0;
    double predicted = 0.0;
    double std_error = 0.0;
};

inline std::vector<PairConsistencyCell> run_pair_consistency(const PairConsistencyConfig& cfg) {
    std::vector<PairConsistencyCell> cells;
    std::size_t cell_index = 0;
    for (double p : cfg.p_values) {
        for (std::size_t l : cfg.l_values) {
            std::uint64_t cell_seed = derive_seed(cfg.seed, cell_index++);
            std::vector<char> hit(cfg.pairs, 0);
            parallel_trials(cfg.pairs, cfg.threads, [&](std::size_t t) {
                Rng rng(derive_seed(cell_seed, t));
                Strand a = Strand::random(l, rng).erased_copy(p, rng);
                Strand b = Strand::random(l, rng).erased_copy(p, rng);
                hit[t] = consistent(a, b) ? 1 : 0;
            });
            PairConsistencyCell cell;
            cell.p = p;
            cell.l = l;
            cell.pairs = cfg.pairs;
            std::size_t wins = 0;
            for (char h : hit) wins += static_cast<std::size_t>(h);
            cell.empirical = static_cast<double>(wins) / static_cast<double>(cfg.pairs);
            cell.predicted = pair_consistency_probability(p, l);
            cell.std_error = std::sqrt(cell.predicted * (1.0 - cell.predicted) / static_cast<double>(cfg.pairs));
            cells.push_back(cell);
        }
    }
    return cells;
}

inline void write_pair_consistency_csv(const std::vector<PairConsistencyCell>& cells, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"p", "L", "pairs", "empirical", "predicted", "std_error"});
    for (const auto& c : cells) {
        csv.row_strings({format_double(c.p), std::to_string(c.l), std::to_string(c.pairs),
                         format_double(c.empirical), format_double(c.predicted), format_double(c.std_error)});
    }
}

// ---------------------------------------------------------------------------
// Hoeffding bound on the nonempty-cluster count

struct ClusterCountConfig {
    std::size_t m = 50;
    double epsilon = 0.2;
    SamplingDistribution dist;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct ClusterCountResult {
    std::size_t m = 0;
    double epsilon = 0.0;
    std::size_t trials = 0;
    double violation_freq = 0.0;
    double hoeffding_bound = 0.0;
    double mean_nonempty = 0.0;
    double expected_nonempty = 0.0;  // (1-q0) M
};

inline ClusterCountResult run_cluster_count(const ClusterCountConfig& cfg) {
    std::vector<std::size_t> nonempty(cfg.trials, 0);
    parallel_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.seed, t));
        auto counts = sample_draw_counts(cfg.dist, cfg.m, rng);
        std::size_t k = 0;
        for (std::size_t n : counts) k += (n > 0) ? 1 : 0;
        nonempty[t] = k;
    });
    ClusterCountResult res;
    res.m = cfg.m;
    res.epsilon = cfg.epsilon;
    res.trials = cfg.trials;
    res.expected_nonempty = (1.0 - cfg.dist.q0()) * static_cast<double>(cfg.m);
    res.hoeffding_bound = cluster_count_bound(cfg.m, cfg.epsilon);
    std::size_t violations = 0;
    double sum = 0.0;
    for (std::size_t k : nonempty) {
        sum += static_cast<double>(k);
        if (std::abs(static_cast<double>(k) - res.expected_nonempty) >
            cfg.epsilon * static_cast<double>(cfg.m)) {
            ++violations;
        }
    }
    res.violation_freq = static_cast<double>(violations) / static_cast<double>(cfg.trials);
    res.mean_nonempty = sum / static_cast<double>(cfg.trials);
    return res;
}

inline void write_cluster_count_csv(const std::vector<ClusterCountResult>& results, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"M", "epsilon", "trials", "violation_freq", "hoeffding_bound", "mean_nonempty", "expected_nonempty"});
    for (const auto& r : results) {
        csv.row_strings({std::to_string(r.m), format_double(r.epsilon), std::to_string(r.trials),
                         format_double(r.violation_freq), format_double(r.hoeffding_bound),
                         format_double(r.mean_nonempty), format_double(r.expected_nonempty)});
    }
}

// ---------------------------------------------------------------------------
// end-to-end rate sweep

struct E2eSweepConfig {
    std::size_t m = 6;
    std::size_t l = 24;
    double p = 0.1;
    SamplingDistribution dist;
    std::vector<double> rates;
    std::size_t num_messages = 16;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double epsilon = 0.05;
    std::uint64_t budget = 0;  // required for the exhaustive decoder
    bool first_hit = false;
    std::size_t max_exhaustive_m = 8;      // desk-scale guard
    std::size_t max_exhaustive_pool = 16;  // desk-scale guard
    unsigned threads = 0;
};

struct TrialRecord {
    std::size_t rate_index = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double rate = 0.0;
    std::size_t message_bits = 0;
    std::size_t sent_message = 0;
    std::size_t pool_size = 0;
    DecodeStatus genie_status = DecodeStatus::FailureNoValidSystem;
    std::optional<std::size_t> genie_message;
    bool exhaustive_ran = false;
    DecodeStatus exhaustive_status = DecodeStatus::FailureNoValidSystem;
    std::optional<std::size_t> exhaustive_message;
    std::size_t systems_tried = 0;
    double wall_ms = 0.0;  // measured; never persisted, CSV outputs stay byte-identical
};

inline TrialRecord run_e2e_trial(const E2eSweepConfig& cfg, std::size_t rate_index, std::size_t trial) {
    auto start = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.rate_index = rate_index;
    rec.trial = trial;
    rec.rate = cfg.rates.at(rate_index);
    rec.seed = derive_seed(cfg.seed, rate_index * cfg.trials + trial);
    rec.message_bits = rate_message_bits(cfg.m, cfg.l, rec.rate);

    Rng rng(rec.seed);
    ChannelParams params = ChannelParams::from_lengths(cfg.m, cfg.l, cfg.p);
    Codebook cb = build_codebook(params, rec.message_bits, cfg.num_messages, rng);
    rec.sent_message = static_cast<std::size_t>(rng.below(cfg.num_messages));
    std::vector<Strand> input = encode(cb, rec.sent_message);
    ReadPool pool = transmit(input, params, cfg.dist, rng);
    rec.pool_size = pool.reads.size();

    DecodeResult genie = genie_decode(cb, pool);
    rec.genie_status = genie.status;
    rec.genie_message = genie.message_index;

    if (cfg.m <= cfg.max_exhaustive_m && pool.reads.size() <= cfg.max_exhaustive_pool) {
        ExhaustiveDecodeOptions opts;
        opts.epsilon = cfg.epsilon;
        opts.budget = cfg.budget;
        opts.first_hit = cfg.first_hit;
        DecodeResult ex = exhaustive_decode(cb, pool.view(), cfg.dist, opts);
        rec.exhaustive_ran = true;
        rec.exhaustive_status = ex.status;
        rec.exhaustive_message = ex.message_index;
        rec.systems_tried = ex.systems_tried;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

struct E2eRateSummary {
    double rate = 0.0;
    std::size_t message_bits = 0;
    std::size_t num_messages = 0;
    std::size_t trials = 0;
    double genie_error_rate = 0.0;
    std::size_t exhaustive_trials = 0;   // trials where the exhaustive decoder ran
    std::size_t budget_exhausted = 0;    // its own outcome, never folded into errors
    double budget_exhausted_rate = 0.0;
    double error_rate = 0.0;             // exhaustive errors over completed trials
    double mean_systems_tried = 0.0;
    std::size_t agreement_violations = 0;  // both decoders succeeded, indices differ
};

struct E2eSweepResult {
    std::vector<E2eRateSummary> summaries;
    std::vector<TrialRecord> records;  // rate-major, trial-minor
};

inline E2eSweepResult run_e2e_sweep(const E2eSweepConfig& cfg) {
    if (cfg.rates.empty()) throw std::invalid_argument("simulate: rate grid is empty");
    if (cfg.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if (cfg.budget == 0) throw std::invalid_argument("simulate: an enumeration budget is required");
    E2eSweepResult result;
    result.records.resize(cfg.rates.size() * cfg.trials);
    parallel_trials(result.records.size(), cfg.threads, [&](std::size_t i) {
        result.records[i] = run_e2e_trial(cfg, i / cfg.trials, i % cfg.trials);
    });
    for (std::size_t r = 0; r < cfg.rates.size(); ++r) {
        E2eRateSummary s;
        s.rate = cfg.rates[r];
        s.message_bits = rate_message_bits(cfg.m, cfg.l, s.rate);
        s.num_messages = cfg.num_messages;
        s.trials = cfg.trials;
        std::size_t genie_errors = 0;
        std::size_t exhaustive_errors = 0;
        std::size_t systems = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const TrialRecord& rec = result.records[r * cfg.trials + t];
            bool genie_ok = rec.genie_status == DecodeStatus::Success && rec.genie_message == rec.sent_message;
            if (!genie_ok) ++genie_errors;
            if (!rec.exhaustive_ran) continue;
            ++s.exhaustive_trials;
            systems += rec.systems_tried;
            if (rec.exhaustive_status == DecodeStatus::FailureBudgetExhausted) {
                ++s.budget_exhausted;
                continue;
            }
            bool ex_ok = rec.exhaustive_status == DecodeStatus::Success && rec.exhaustive_message == rec.sent_message;
            if (!ex_ok) ++exhaustive_errors;
            if (rec.genie_status == DecodeStatus::Success && rec.exhaustive_status == DecodeStatus::Success &&
                rec.genie_message != rec.exhaustive_message) {
                ++s.agreement_violations;
            }
        }
        s.genie_error_rate = static_cast<double>(genie_errors) / static_cast<double>(cfg.trials);
        std::size_t completed = s.exhaustive_trials - s.budget_exhausted;
        s.error_rate = completed == 0 ? 0.0 : static_cast<double>(exhaustive_errors) / static_cast<double>(completed);
        s.budget_exhausted_rate = s.exhaustive_trials == 0
                                      ? 0.0
                                      : static_cast<double>(s.budget_exhausted) / static_cast<double>(s.exhaustive_trials);
        s.mean_systems_tried = s.exhaustive_trials == 0
                                   ? 0.0
                                   : static_cast<double>(systems) / static_cast<double>(s.exhaustive_trials);
        result.summaries.push_back(s);
    }
    return result;
}

inline void write_e2e_summary_csv(const E2eSweepResult& result, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"R", "B", "num_messages", "trials", "error_rate", "genie_error_rate", "budget_exhausted_rate",
                "mean_systems_tried", "exhaustive_trials", "budget_exhausted", "agreement_violations"});
    for (const auto& s : result.summaries) {
        csv.row_strings({format_double(s.rate), std::to_string(s.message_bits), std::to_string(s.num_messages),
                         std::to_string(s.trials), format_double(s.error_rate), format_double(s.genie_error_rate),
                         format_double(s.budget_exhausted_rate), format_double(s.mean_systems_tried),
                         std::to_string(s.exhaustive_trials), std::to_string(s.budget_exhausted),
                         std::to_string(s.agreement_violations)});
    }
}

inline void write_e2e_trials_csv(const E2eSweepResult& result, const std::string& out_path) {
    CsvWriter csv(out_path);
    csv.header({"rate_index", "trial", "seed", "R", "B", "sent_message", "pool_size", "genie_status", "genie_message",
                "exhaustive_status", "exhaustive_message", "systems_tried"});
    auto opt_str = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
    for (const auto& rec : result.records) {
        csv.row_strings({std::to_string(rec.rate_index), std::to_string(rec.trial), std::to_string(rec.seed),
                         format_double(rec.rate), std::to_string(rec.message_bits), std::to_string(rec.sent_message),
                         std::to_string(rec.pool_size), to_string(rec.genie_status), opt_str(rec.genie_message),
                         rec.exhaustive_ran ? to_string(rec.exhaustive_status) : "disabled",
                         rec.exhaustive_ran ? opt_str(rec.exhaustive_message) : std::string(),
                         std::to_string(rec.systems_tried)});
    }
}

}  // namespace multidraw
